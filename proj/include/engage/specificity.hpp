#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/error.hpp"
#include "engage/llm.hpp"
#include "engage/text.hpp"

namespace engage {

// Presence of who/what, when and where details in a response.
struct SpecificityLabels {
    bool entities = false;
    bool temporal = false;
    bool spatial = false;

    int total() const noexcept { return int(entities) + int(temporal) + int(spatial); }
    // Exactly one of {0, 1/3, 2/3, 1}.
    double normalized() const noexcept { return total() / 3.0; }

    friend bool operator==(const SpecificityLabels&, const SpecificityLabels&) = default;
};

class SpecificityClassifier {
public:
    virtual ~SpecificityClassifier() = default;
    virtual SpecificityLabels classify(std::string_view response) const = 0;
};

// Lower-cased word sequences read from a plain-text list (one phrase per
// line, '#' comments).
class Gazetteer {
public:
    Gazetteer() = default;
    explicit Gazetteer(std::vector<std::string> phrases) {
        for (const auto& p : phrases) add(p);
    }

    static Gazetteer from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open gazetteer: " + path.string());
        Gazetteer g;
        std::string line;
        while (std::getline(in, line)) {
            auto t = text::trim(line);
            if (t.empty() || t.front() == '#') continue;
            g.add(t);
        }
        return g;
    }

    void add(std::string_view phrase) {
        auto words = text::split_whitespace(text::to_lower_ascii(phrase));
        if (!words.empty()) phrases_.push_back(std::move(words));
    }

    bool contains_word(const std::string& lower_word) const {
        for (const auto& p : phrases_)
            if (p.size() == 1 && p[0] == lower_word) return true;
        return false;
    }

    bool matches(const std::vector<std::string>& lower_tokens) const {
        for (const auto& phrase : phrases_) {
            if (phrase.size() > lower_tokens.size()) continue;
            for (std::size_t i = 0; i + phrase.size() <= lower_tokens.size(); ++i) {
                bool hit = true;
                for (std::size_t k = 0; k < phrase.size() && hit; ++k) hit = lower_tokens[i + k] == phrase[k];
                if (hit) return true;
            }
        }
        return false;
    }

    std::size_t size() const noexcept { return phrases_.size(); }

private:
    std::vector<std::vector<std::string>> phrases_;
};

struct SpecificityGazetteers {
    Gazetteer temporal;
    Gazetteer spatial;
    Gazetteer course_prefixes;
    Gazetteer entity_stoplist;

    static SpecificityGazetteers from_directory(const std::filesystem::path& dir) {
        return {Gazetteer::from_file(dir / "temporal.txt"), Gazetteer::from_file(dir / "spatial.txt"),
                Gazetteer::from_file(dir / "course_prefixes.txt"),
                Gazetteer::from_file(dir / "entity_stoplist.txt")};
    }
};

// Deterministic stand-in for the LLM classifier.
//   entities: a capitalised word that does not open a sentence (possessive
//             "'s" ignored, stoplist excluded), or a course code such as
//             "EECS 280" / "MATH101" built from a known department prefix.
//   temporal: a temporal gazetteer phrase, a year (1900-2099) or a clock time.
//   spatial:  a spatial gazetteer phrase.
class RuleSpecificityClassifier final : public SpecificityClassifier {
public:
    explicit RuleSpecificityClassifier(SpecificityGazetteers gazetteers) : g_(std::move(gazetteers)) {}

    SpecificityLabels classify(std::string_view response) const override {
        SpecificityLabels out;
        const auto raw = text::split_whitespace(response);
        std::vector<std::string> words;
        std::vector<bool> sentence_start;
        bool next_starts = true;
        for (const auto& r : raw) {
            auto w = text::strip_edge_punct(r);
            if (w.empty()) continue;
            words.push_back(w);
            sentence_start.push_back(next_starts);
            const char last = r.back();
            next_starts = last == '.' || last == '!' || last == '?';
        }
        std::vector<std::string> lower;
        lower.reserve(words.size());
        for (const auto& w : words) lower.push_back(text::to_lower_ascii(w));

        out.entities = has_entity(words, lower, sentence_start);
        out.temporal = g_.temporal.matches(lower) || has_time_pattern(lower);
        out.spatial = g_.spatial.matches(lower);
        return out;
    }

private:
    static std::string drop_possessive(const std::string& w) {
        if (w.size() > 2 && (w.ends_with("'s") || w.ends_with("'S"))) return w.substr(0, w.size() - 2);
        return w;
    }

    static bool is_capitalized_name(const std::string& w) {
        if (w.empty() || w[0] < 'A' || w[0] > 'Z') return false;
        for (std::size_t i = 1; i < w.size(); ++i)
            if (w[i] >= 'a' && w[i] <= 'z') return true;
        return false;
    }

    static bool all_digits(std::string_view s, std::size_t min_len, std::size_t max_len) {
        if (s.size() < min_len || s.size() > max_len) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    }

    bool is_course_prefix(const std::string& w) const {
        for (char c : w)
            if (c < 'A' || c > 'Z') return false;
        return g_.course_prefixes.contains_word(text::to_lower_ascii(w));
    }

    bool has_entity(const std::vector<std::string>& words, const std::vector<std::string>& lower,
                    const std::vector<bool>& sentence_start) const {
        for (std::size_t i = 0; i < words.size(); ++i) {
            const std::string& w = words[i];
            if (is_course_prefix(w) && i + 1 < words.size() && all_digits(words[i + 1], 2, 4)) return true;
            // Fused form: "MATH101".
            std::size_t split = 0;
            while (split < w.size() && w[split] >= 'A' && w[split] <= 'Z') ++split;
            if (split > 0 && split < w.size() && is_course_prefix(w.substr(0, split)) &&
                all_digits(std::string_view(w).substr(split), 2, 4))
                return true;
            if (!sentence_start[i] && is_capitalized_name(w)) {
                const auto base = text::to_lower_ascii(drop_possessive(w));
                if (!g_.entity_stoplist.contains_word(base) && !g_.entity_stoplist.contains_word(lower[i]))
                    return true;
            }
        }
        return false;
    }

    static bool has_time_pattern(const std::vector<std::string>& lower) {
        static const std::regex year(R"((19|20)\d\d)");
        static const std::regex clock(R"(\d{1,2}(:\d\d)?(am|pm))");
        static const std::regex clock_only(R"(\d{1,2}:\d\d)");
        for (std::size_t i = 0; i < lower.size(); ++i) {
            const auto& w = lower[i];
            if (std::regex_match(w, year) || std::regex_match(w, clock) || std::regex_match(w, clock_only))
                return true;
            if (i + 1 < lower.size() && all_digits(w, 1, 2) && (lower[i + 1] == "am" || lower[i + 1] == "pm"))
                return true;
        }
        return false;
    }

    SpecificityGazetteers g_;
};

// Asks a chat model for three presence bits as JSON at temperature 0.
class RemoteSpecificityClassifier final : public SpecificityClassifier {
public:
    explicit RemoteSpecificityClassifier(std::shared_ptr<const llm::ChatClient> client)
        : client_(std::move(client)) {}

    static std::string system_prompt() {
        return "You label survey responses for episodic specificity. Report whether the response "
               "mentions entities (who/what: named people, organisations, courses, places by name), "
               "temporal references (when), and spatial references (where). Answer with a JSON "
               "object {\"entities\":0|1,\"temporal\":0|1,\"spatial\":0|1} and nothing else.";
    }

    SpecificityLabels classify(std::string_view response) const override {
        if (text::trim(response).empty()) return {};
        std::string reply;
        try {
            reply = client_->complete({{{"system", system_prompt()}, {"user", std::string(response)}}, 0.0, true});
        } catch (const BackendUnavailable& e) {
            throw ClassificationUnavailable(std::string("specificity: ") + e.what());
        }
        auto obj = llm::extract_json_object(reply);
        if (!obj) throw ClassificationUnavailable("specificity: reply is not a JSON object");
        auto bit = [&](const char* key) {
            auto it = obj->find(key);
            if (it == obj->end()) throw ClassificationUnavailable(std::string("specificity: missing ") + key);
            if (it->is_boolean()) return it->get<bool>();
            if (it->is_number_integer() && (it->get<int>() == 0 || it->get<int>() == 1)) return it->get<int>() == 1;
            throw ClassificationUnavailable(std::string("specificity: bad value for ") + key);
        };
        return {bit("entities"), bit("temporal"), bit("spatial")};
    }

private:
    std::shared_ptr<const llm::ChatClient> client_;
};

// Uses `fallback` whenever `primary` reports ClassificationUnavailable.
class FallbackSpecificityClassifier final : public SpecificityClassifier {
public:
    FallbackSpecificityClassifier(std::shared_ptr<const SpecificityClassifier> primary,
                                  std::shared_ptr<const SpecificityClassifier> fallback)
        : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

    SpecificityLabels classify(std::string_view response) const override {
        try {
            return primary_->classify(response);
        } catch (const ClassificationUnavailable&) {
            return fallback_->classify(response);
        }
    }

private:
    std::shared_ptr<const SpecificityClassifier> primary_;
    std::shared_ptr<const SpecificityClassifier> fallback_;
};

}  // namespace engage
