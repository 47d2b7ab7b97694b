#pragma once

// Labelled conversation corpora as JSON lines, one conversation per line:
//
//   {"conversation_id": "c001",
//    "exchanges": [{"bot_question": "...", "action": "specification",
//                   "secondary_actions": ["validation"], "user_response": "..."}]}
//
// "action" may be omitted for raw corpora that still need labelling.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/action_classifier.hpp"
#include "engage/error.hpp"
#include "engage/text.hpp"

namespace engage {

struct CorpusExchange {
    std::string bot_question;
    std::optional<ActionType> action;
    std::vector<ActionType> secondary_actions;
    std::string user_response;

    friend bool operator==(const CorpusExchange&, const CorpusExchange&) = default;
};

struct CorpusConversation {
    std::string conversation_id;
    std::vector<CorpusExchange> exchanges;

    friend bool operator==(const CorpusConversation&, const CorpusConversation&) = default;
};

// Dropped entries per cleaning rule.
struct ExclusionReport {
    std::size_t missing = 0;                 // absent/empty question or response
    std::size_t placeholder = 0;             // "nan", "N/A", ...
    std::size_t duplicate = 0;               // repeat of an earlier exchange in the conversation
    std::size_t zero_words = 0;              // response without a single word
    std::size_t duplicate_conversation = 0;  // conversation id seen before
    std::size_t empty_conversation = 0;      // nothing left after cleaning

    std::size_t exchanges_dropped() const noexcept { return missing + placeholder + duplicate + zero_words; }
    friend bool operator==(const ExclusionReport&, const ExclusionReport&) = default;
};

inline nlohmann::json to_json(const ExclusionReport& r) {
    return {{"missing", r.missing},
            {"placeholder", r.placeholder},
            {"duplicate", r.duplicate},
            {"zero_words", r.zero_words},
            {"duplicate_conversation", r.duplicate_conversation},
            {"empty_conversation", r.empty_conversation}};
}

struct IngestResult {
    std::vector<CorpusConversation> conversations;
    ExclusionReport exclusions;

    std::size_t responses() const {
        std::size_t n = 0;
        for (const auto& c : conversations) n += c.exchanges.size();
        return n;
    }
};

inline bool is_placeholder(std::string_view s) {
    static const std::set<std::string> markers = {"nan", "n/a", "na", "none", "null", "-", "--", "[deleted]"};
    return markers.count(text::to_lower_ascii(text::trim(s))) > 0;
}

namespace corpus_detail {

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_float() && std::isnan(it->get<double>())) return std::string("nan");
    return it->dump();
}

inline ActionType parse_action_label(const std::string& label, std::size_t line) {
    auto a = parse_action(text::to_lower_ascii(text::trim(label)));
    if (!a) throw ParseError("unknown action label '" + label + "'", line);
    return *a;
}

}  // namespace corpus_detail

// Parses and cleans a corpus. Throws ParseError (with line number) on
// malformed JSON or an unknown action label.
inline IngestResult ingest_corpus(std::istream& in) {
    IngestResult result;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("corpus: ") + e.what(), lineno);
        }
        if (!doc.is_object() || !doc.contains("exchanges") || !doc["exchanges"].is_array())
            throw ParseError("corpus: expected an object with an 'exchanges' array", lineno);

        CorpusConversation conv;
        conv.conversation_id = doc.contains("conversation_id") && doc["conversation_id"].is_string()
                                   ? doc["conversation_id"].get<std::string>()
                                   : "line-" + std::to_string(lineno);
        if (!seen_ids.insert(conv.conversation_id).second) {
            ++result.exclusions.duplicate_conversation;
            continue;
        }

        std::set<std::pair<std::string, std::string>> seen_pairs;
        for (const auto& ex : doc["exchanges"]) {
            if (!ex.is_object()) throw ParseError("corpus: exchange is not an object", lineno);
            const auto question = corpus_detail::optional_string(ex, "bot_question");
            const auto response = corpus_detail::optional_string(ex, "user_response");

            // Labels are validated even on rows that get dropped.
            std::optional<ActionType> action;
            if (auto it = ex.find("action"); it != ex.end() && !it->is_null()) {
                if (!it->is_string()) throw ParseError("corpus: action label must be a string", lineno);
                action = corpus_detail::parse_action_label(it->get<std::string>(), lineno);
            }
            std::vector<ActionType> secondary;
            if (auto it = ex.find("secondary_actions"); it != ex.end() && it->is_array())
                for (const auto& s : *it) secondary.push_back(corpus_detail::parse_action_label(s.get<std::string>(), lineno));

            if (!question || !response || text::trim(*question).empty() || text::trim(*response).empty()) {
                ++result.exclusions.missing;
                continue;
            }
            if (is_placeholder(*question) || is_placeholder(*response)) {
                ++result.exclusions.placeholder;
                continue;
            }
            if (!seen_pairs.emplace(*question, *response).second) {
                ++result.exclusions.duplicate;
                continue;
            }
            if (text::tokenize(*response).empty()) {
                ++result.exclusions.zero_words;
                continue;
            }
            conv.exchanges.push_back({*question, action, std::move(secondary), *response});
        }
        if (conv.exchanges.empty()) {
            ++result.exclusions.empty_conversation;
            continue;
        }
        result.conversations.push_back(std::move(conv));
    }
    return result;
}

inline IngestResult ingest_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open corpus: " + path.string());
    return ingest_corpus(in);
}

inline nlohmann::json to_json(const CorpusConversation& c) {
    nlohmann::json exchanges = nlohmann::json::array();
    for (const auto& e : c.exchanges) {
        nlohmann::json row = {{"bot_question", e.bot_question}, {"user_response", e.user_response}};
        row["action"] = e.action ? nlohmann::json(to_string(*e.action)) : nlohmann::json(nullptr);
        if (!e.secondary_actions.empty()) {
            auto& sec = row["secondary_actions"] = nlohmann::json::array();
            for (auto a : e.secondary_actions) sec.push_back(to_string(a));
        }
        exchanges.push_back(std::move(row));
    }
    return {{"conversation_id", c.conversation_id}, {"exchanges", exchanges}};
}

inline void write_corpus(std::ostream& out, const std::vector<CorpusConversation>& conversations) {
    for (const auto& c : conversations) out << to_json(c).dump() << '\n';
}

inline void write_corpus(const std::filesystem::path& path, const std::vector<CorpusConversation>& conversations) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write corpus: " + path.string());
    write_corpus(out, conversations);
}

// Fills in missing primary labels (and secondary labels when the classifier
// offers them). Exchanges that already carry a label keep it. Returns the
// number of exchanges labelled.
inline std::size_t label_missing_actions(std::vector<CorpusConversation>& conversations,
                                         const ActionClassifier& classifier) {
    std::size_t labelled = 0;
    for (auto& c : conversations) {
        for (auto& e : c.exchanges) {
            if (e.action) continue;
            auto label = classifier.classify(e.bot_question);
            e.action = label.primary;
            if (e.secondary_actions.empty()) e.secondary_actions = std::move(label.secondary);
            ++labelled;
        }
    }
    return labelled;
}

}  // namespace engage
