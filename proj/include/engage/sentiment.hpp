#pragma once

// Rule-augmented valence-lexicon sentiment scorer. Reproduces the compound
// score of the VADER 3.3.2 reference implementation: lexicon valence, booster
// and dampener words, negation flips, ALL-CAPS emphasis, "but" contrast,
// "least" handling, special-case idioms and !/? punctuation emphasis.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "engage/error.hpp"
#include "engage/text.hpp"

namespace engage {

namespace vader_detail {

inline constexpr double kBoostIncr = 0.293;
inline constexpr double kBoostDecr = -0.293;
inline constexpr double kCapsIncr = 0.733;
inline constexpr double kNegScalar = -0.74;

inline const std::unordered_set<std::string>& negations() {
    static const std::unordered_set<std::string> words = {
        "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
        "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
        "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
        "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
        "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
        "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
        "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
        "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite"};
    return words;
}

inline const std::unordered_map<std::string, double>& boosters() {
    static const std::unordered_map<std::string, double> words = [] {
        std::unordered_map<std::string, double> m;
        for (const char* w :
             {"absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
              "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
              "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping",
              "flippin", "frackin", "fracking", "fricking", "frickin", "frigging", "friggin",
              "fully", "fuckin", "fucking", "fuggin", "fugging", "greatly", "hella", "highly",
              "hugely", "incredible", "incredibly", "intensely", "major", "majorly", "more",
              "most", "particularly", "purely", "quite", "really", "remarkably", "so",
              "substantially", "thoroughly", "total", "totally", "tremendous", "tremendously",
              "uber", "unbelievably", "unusually", "utter", "utterly", "very"})
            m.emplace(w, kBoostIncr);
        for (const char* w :
             {"almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof",
              "kind-of", "less", "little", "marginal", "marginally", "occasional", "occasionally",
              "partly", "scarce", "scarcely", "slight", "slightly", "somewhat", "sort of",
              "sorta", "sortof", "sort-of"})
            m.emplace(w, kBoostDecr);
        return m;
    }();
    return words;
}

inline const std::unordered_map<std::string, double>& special_cases() {
    static const std::unordered_map<std::string, double> m = {
        {"the shit", 3.0},    {"the bomb", 3.0},        {"bad ass", 1.5},
        {"badass", 1.5},      {"bus stop", 0.0},        {"yeah right", -2.0},
        {"kiss of death", -1.5}, {"to die for", 3.0},   {"beating heart", 3.5}};
    return m;
}

// str.isupper() restricted to ASCII letters.
inline bool is_upper(std::string_view w) {
    bool cased = false;
    for (char c : w) {
        if (c >= 'a' && c <= 'z') return false;
        if (c >= 'A' && c <= 'Z') cased = true;
    }
    return cased;
}

inline std::size_t code_point_count(std::string_view s) {
    std::size_t n = 0;
    for (std::size_t pos = 0; pos < s.size(); ++n) text::next_code_point(s, pos);
    return n;
}

inline std::string strip_ascii_punct(std::string_view token) {
    std::size_t b = 0, e = token.size();
    while (b < e && text::is_ascii_punct(token[b])) ++b;
    while (e > b && text::is_ascii_punct(token[e - 1])) --e;
    return std::string(token.substr(b, e - b));
}

inline bool negated(const std::string& lower_word) {
    return negations().count(lower_word) > 0 || lower_word.find("n't") != std::string::npos;
}

inline std::string utf8_encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

}  // namespace vader_detail

// word -> mean valence rating. Later duplicate entries override earlier ones.
class ValenceLexicon {
public:
    ValenceLexicon() = default;

    static ValenceLexicon from_stream(std::istream& in) {
        ValenceLexicon lex;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (text::trim(line).empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) throw ParseError("valence lexicon: missing tab", lineno);
            const auto tab2 = line.find('\t', tab + 1);
            const std::string measure = line.substr(tab + 1, tab2 == std::string::npos ? std::string::npos : tab2 - tab - 1);
            try {
                lex.valence_[text::trim(line.substr(0, tab))] = std::stod(measure);
            } catch (const std::exception&) {
                throw ParseError("valence lexicon: bad measure '" + measure + "'", lineno);
            }
        }
        return lex;
    }

    static ValenceLexicon from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open valence lexicon: " + path.string());
        return from_stream(in);
    }

    void set(std::string word, double valence) { valence_[std::move(word)] = valence; }

    const double* find(const std::string& lower_word) const {
        auto it = valence_.find(lower_word);
        return it == valence_.end() ? nullptr : &it->second;
    }
    bool contains(const std::string& lower_word) const { return valence_.count(lower_word) > 0; }
    std::size_t size() const noexcept { return valence_.size(); }

private:
    std::unordered_map<std::string, double> valence_;
};

// Single-code-point emoji -> textual description.
class EmojiLexicon {
public:
    static EmojiLexicon from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open emoji lexicon: " + path.string());
        EmojiLexicon lex;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0) continue;
            const std::string key = line.substr(0, tab);
            std::size_t pos = 0;
            const char32_t cp = text::next_code_point(key, pos);
            if (pos != key.size()) continue;  // multi-code-point keys never match per character
            auto rest = line.substr(tab + 1);
            const auto tab2 = rest.find('\t');
            lex.desc_[cp] = tab2 == std::string::npos ? rest : rest.substr(0, tab2);
        }
        return lex;
    }

    const std::string* find(char32_t cp) const {
        auto it = desc_.find(cp);
        return it == desc_.end() ? nullptr : &it->second;
    }
    bool empty() const noexcept { return desc_.empty(); }

private:
    std::unordered_map<char32_t, std::string> desc_;
};

class SentimentAnalyzer {
public:
    explicit SentimentAnalyzer(std::shared_ptr<const ValenceLexicon> lexicon,
                               std::shared_ptr<const EmojiLexicon> emoji = nullptr)
        : lexicon_(std::move(lexicon)), emoji_(std::move(emoji)) {
        if (!lexicon_) throw Error("SentimentAnalyzer requires a lexicon");
    }

    // Loads vader_lexicon.txt and (if present) emoji_utf8_lexicon.txt from `dir`.
    static SentimentAnalyzer from_directory(const std::filesystem::path& dir) {
        auto lex = std::make_shared<const ValenceLexicon>(ValenceLexicon::from_file(dir / "vader_lexicon.txt"));
        std::shared_ptr<const EmojiLexicon> emoji;
        if (std::filesystem::exists(dir / "emoji_utf8_lexicon.txt"))
            emoji = std::make_shared<const EmojiLexicon>(EmojiLexicon::from_file(dir / "emoji_utf8_lexicon.txt"));
        return SentimentAnalyzer(std::move(lex), std::move(emoji));
    }

    // Compound valence in [-1, 1]; 0 when no token carries valence.
    double compound(std::string_view raw) const {
        const std::string prepared = replace_emoji(raw);
        const std::vector<std::string> words = words_and_emoticons(prepared);
        std::vector<std::string> lower;
        lower.reserve(words.size());
        for (const auto& w : words) lower.push_back(text::to_lower_ascii(w));
        const bool cap_diff = allcap_differential(words);

        const auto& boost = vader_detail::boosters();
        std::vector<double> sentiments;
        sentiments.reserve(words.size());
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (boost.count(lower[i])) {
                sentiments.push_back(0.0);
                continue;
            }
            if (i + 1 < words.size() && lower[i] == "kind" && lower[i + 1] == "of") {
                sentiments.push_back(0.0);
                continue;
            }
            sentiments.push_back(word_valence(words, lower, i, cap_diff));
        }
        but_check(lower, sentiments);
        if (sentiments.empty()) return 0.0;

        double sum = 0.0;
        for (double s : sentiments) sum += s;
        const double emphasis = punctuation_emphasis(prepared);
        if (sum > 0)
            sum += emphasis;
        else if (sum < 0)
            sum -= emphasis;
        return normalize(sum);
    }

    static double normalize(double score, double alpha = 15.0) {
        const double n = score / std::sqrt(score * score + alpha);
        if (n < -1.0) return -1.0;
        if (n > 1.0) return 1.0;
        return n;
    }

    const ValenceLexicon& lexicon() const noexcept { return *lexicon_; }

private:
    std::string replace_emoji(std::string_view raw) const {
        std::string out;
        out.reserve(raw.size());
        bool prev_space = true;
        for (std::size_t pos = 0; pos < raw.size();) {
            const std::size_t start = pos;
            const char32_t cp = text::next_code_point(raw, pos);
            const std::string* desc = emoji_ ? emoji_->find(cp) : nullptr;
            if (desc) {
                if (!prev_space) out += ' ';
                out += *desc;
                prev_space = false;
            } else {
                out.append(raw.substr(start, pos - start));
                prev_space = cp == U' ';
            }
        }
        // str.strip(): unicode whitespace at both ends.
        auto words = text::split_whitespace(out);
        if (words.empty()) return {};
        const auto first = out.find(words.front());
        const auto last = out.rfind(words.back()) + words.back().size();
        return out.substr(first, last - first);
    }

    static std::vector<std::string> words_and_emoticons(const std::string& s) {
        std::vector<std::string> out;
        for (auto& tok : text::split_whitespace(s)) {
            std::string stripped = vader_detail::strip_ascii_punct(tok);
            // Short leftovers were probably emoticons such as ":)"; keep the raw token.
            out.push_back(vader_detail::code_point_count(stripped) <= 2 ? std::move(tok) : std::move(stripped));
        }
        return out;
    }

    static bool allcap_differential(const std::vector<std::string>& words) {
        std::size_t caps = 0;
        for (const auto& w : words)
            if (vader_detail::is_upper(w)) ++caps;
        const std::size_t diff = words.size() - caps;
        return diff > 0 && diff < words.size();
    }

    static double scalar_inc_dec(const std::string& word, const std::string& lower, double valence,
                                 bool cap_diff) {
        const auto& boost = vader_detail::boosters();
        auto it = boost.find(lower);
        if (it == boost.end()) return 0.0;
        double scalar = it->second;
        if (valence < 0) scalar *= -1;
        if (vader_detail::is_upper(word) && cap_diff) {
            if (valence > 0)
                scalar += vader_detail::kCapsIncr;
            else
                scalar -= vader_detail::kCapsIncr;
        }
        return scalar;
    }

    double word_valence(const std::vector<std::string>& words, const std::vector<std::string>& lower,
                        std::size_t i, bool cap_diff) const {
        using namespace vader_detail;
        const double* base = lexicon_->find(lower[i]);
        if (!base) return 0.0;
        double valence = *base;
        const std::size_t n = words.size();

        if (lower[i] == "no" && i != n - 1 && lexicon_->contains(lower[i + 1])) valence = 0.0;
        if ((i > 0 && lower[i - 1] == "no") || (i > 1 && lower[i - 2] == "no") ||
            (i > 2 && lower[i - 3] == "no" && (lower[i - 1] == "or" || lower[i - 1] == "nor")))
            valence = *base * kNegScalar;

        if (is_upper(words[i]) && cap_diff) {
            if (valence > 0)
                valence += kCapsIncr;
            else
                valence -= kCapsIncr;
        }

        for (std::size_t start = 0; start < 3; ++start) {
            if (i > start && !lexicon_->contains(lower[i - (start + 1)])) {
                double s = scalar_inc_dec(words[i - (start + 1)], lower[i - (start + 1)], valence, cap_diff);
                if (start == 1 && s != 0) s *= 0.95;
                if (start == 2 && s != 0) s *= 0.9;
                valence += s;
                valence = negation_check(valence, lower, start, i);
                if (start == 2) valence = special_idioms_check(valence, lower, i);
            }
        }
        return least_check(valence, lower, i);
    }

    double least_check(double valence, const std::vector<std::string>& lower, std::size_t i) const {
        using vader_detail::kNegScalar;
        if (i > 1 && !lexicon_->contains(lower[i - 1]) && lower[i - 1] == "least") {
            if (lower[i - 2] != "at" && lower[i - 2] != "very") valence *= kNegScalar;
        } else if (i > 0 && !lexicon_->contains(lower[i - 1]) && lower[i - 1] == "least") {
            valence *= kNegScalar;
        }
        return valence;
    }

    static double negation_check(double valence, const std::vector<std::string>& lower, std::size_t start,
                                 std::size_t i) {
        using namespace vader_detail;
        if (start == 0) {
            if (negated(lower[i - 1])) valence *= kNegScalar;
        } else if (start == 1) {
            if (lower[i - 2] == "never" && (lower[i - 1] == "so" || lower[i - 1] == "this"))
                valence *= 1.25;
            else if (lower[i - 2] == "without" && lower[i - 1] == "doubt")
                ;
            else if (negated(lower[i - 2]))
                valence *= kNegScalar;
        } else {
            if ((lower[i - 3] == "never" && (lower[i - 2] == "so" || lower[i - 2] == "this")) ||
                (lower[i - 1] == "so" || lower[i - 1] == "this"))
                valence *= 1.25;
            else if (lower[i - 3] == "without" && (lower[i - 2] == "doubt" || lower[i - 1] == "doubt"))
                ;
            else if (negated(lower[i - 3]))
                valence *= kNegScalar;
        }
        return valence;
    }

    // Only reached with i >= 3.
    static double special_idioms_check(double valence, const std::vector<std::string>& lower, std::size_t i) {
        const auto& special = vader_detail::special_cases();
        const std::string onezero = lower[i - 1] + " " + lower[i];
        const std::string twoonezero = lower[i - 2] + " " + lower[i - 1] + " " + lower[i];
        const std::string twoone = lower[i - 2] + " " + lower[i - 1];
        const std::string threetwoone = lower[i - 3] + " " + lower[i - 2] + " " + lower[i - 1];
        const std::string threetwo = lower[i - 3] + " " + lower[i - 2];
        for (const auto* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
            if (auto it = special.find(*seq); it != special.end()) {
                valence = it->second;
                break;
            }
        }
        if (lower.size() - 1 > i) {
            if (auto it = special.find(lower[i] + " " + lower[i + 1]); it != special.end()) valence = it->second;
        }
        if (lower.size() - 1 > i + 1) {
            if (auto it = special.find(lower[i] + " " + lower[i + 1] + " " + lower[i + 2]); it != special.end())
                valence = it->second;
        }
        const auto& boost = vader_detail::boosters();
        for (const auto* gram : {&threetwoone, &threetwo, &twoone}) {
            if (auto it = boost.find(*gram); it != boost.end()) valence += it->second;
        }
        return valence;
    }

    // Mirrors the reference: each element is located by value (first equal
    // element in the partially rewritten list), which matters when equal
    // non-zero valences straddle the first "but".
    static void but_check(const std::vector<std::string>& lower, std::vector<double>& sentiments) {
        std::size_t bi = lower.size();
        for (std::size_t k = 0; k < lower.size(); ++k) {
            if (lower[k] == "but") {
                bi = k;
                break;
            }
        }
        if (bi == lower.size()) return;
        for (std::size_t k = 0; k < sentiments.size(); ++k) {
            const double value = sentiments[k];
            std::size_t si = 0;
            while (sentiments[si] != value) ++si;
            if (si < bi)
                sentiments[si] = value * 0.5;
            else if (si > bi)
                sentiments[si] = value * 1.5;
        }
    }

    static double punctuation_emphasis(std::string_view s) {
        std::size_t ep = 0, qm = 0;
        for (char c : s) {
            if (c == '!') ++ep;
            if (c == '?') ++qm;
        }
        if (ep > 4) ep = 4;
        const double ep_amp = static_cast<double>(ep) * 0.292;
        double qm_amp = 0.0;
        if (qm > 1) qm_amp = qm <= 3 ? static_cast<double>(qm) * 0.18 : 0.96;
        return ep_amp + qm_amp;
    }

    std::shared_ptr<const ValenceLexicon> lexicon_;
    std::shared_ptr<const EmojiLexicon> emoji_;
};

}  // namespace engage
