#pragma once

// Seeded synthetic corpus with the shape of the historical one: 96
// conversations, 467 responses (28 single-exchange, 20 two-exchange, the rest
// three or more; median length 2.5) and the exact historical action mix,
// shuffled. Optional junk rows are planted and counted so ingest's exclusion
// report can be checked against them.

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

#include "engage/action.hpp"
#include "engage/corpus.hpp"
#include "engage/error.hpp"
#include "engage/question_gen.hpp"
#include "engage/rng.hpp"
#include "engage/simulant.hpp"

namespace engage {

struct SyntheticCorpusSpec {
    std::size_t singles = 28;
    std::size_t doubles = 20;
    std::size_t longer = 48;
    std::size_t responses = 467;
    std::size_t max_length = 15;
    std::array<std::size_t, kActionCount> action_counts{291, 110, 60, 4, 2};
    double duplicate_rate = 0.0;    // planted repeats per valid exchange
    double placeholder_rate = 0.0;  // planted "N/A"-style rows per valid exchange
    double missing_rate = 0.0;      // planted empty responses per valid exchange
    double zero_word_rate = 0.0;    // planted punctuation-only responses per valid exchange
    std::uint64_t seed = 20241015;
};

struct SyntheticCorpus {
    std::vector<CorpusConversation> clean;  // what ingest should return
    std::vector<CorpusConversation> raw;    // clean plus planted junk
    ExclusionReport planted;
};

inline SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
    const std::size_t conversations = spec.singles + spec.doubles + spec.longer;
    const std::size_t fixed = spec.singles + 2 * spec.doubles + 3 * spec.longer;
    if (spec.responses < fixed || spec.responses > spec.singles + 2 * spec.doubles + spec.max_length * spec.longer)
        throw DomainError("synthetic corpus: response total incompatible with the length buckets");
    std::size_t labels_total = 0;
    for (auto c : spec.action_counts) labels_total += c;
    if (labels_total != spec.responses) throw DomainError("synthetic corpus: action counts must sum to responses");

    Rng rng(spec.seed);

    // Lengths: longer conversations start at 3; the surplus is spread over all
    // but the first so at least one stays at exactly 3.
    std::vector<std::size_t> lengths(spec.singles, 1);
    lengths.insert(lengths.end(), spec.doubles, 2);
    std::vector<std::size_t> longer(spec.longer, 3);
    for (std::size_t extra = spec.responses - fixed; extra > 0;) {
        if (spec.longer < 2) {
            if (spec.longer == 1 && longer[0] < spec.max_length) { ++longer[0]; --extra; continue; }
            throw DomainError("synthetic corpus: cannot place surplus responses");
        }
        auto& l = longer[1 + rng.uniform_index(spec.longer - 1)];
        if (l < spec.max_length) {
            ++l;
            --extra;
        }
    }
    lengths.insert(lengths.end(), longer.begin(), longer.end());
    for (std::size_t i = lengths.size(); i > 1; --i) std::swap(lengths[i - 1], lengths[rng.uniform_index(i)]);

    std::vector<ActionType> actions;
    for (auto a : kAllActions) actions.insert(actions.end(), spec.action_counts[index_of(a)], a);
    for (std::size_t i = actions.size(); i > 1; --i) std::swap(actions[i - 1], actions[rng.uniform_index(i)]);

    const auto profiles = default_profiles();
    TemplateQuestionGenerator questions;
    SyntheticCorpus out;
    std::size_t next_action = 0;
    for (std::size_t c = 0; c < conversations; ++c) {
        CorpusConversation conv;
        char id[32];
        std::snprintf(id, sizeof id, "syn%03zu", c + 1);
        conv.conversation_id = id;
        ScriptedRespondent respondent(profiles[c % profiles.size()], rng.next());
        std::vector<Turn> history;
        std::set<std::pair<std::string, std::string>> seen;
        for (std::size_t t = 0; t < lengths[c]; ++t) {
            const ActionType action = actions[next_action++];
            const std::string q = questions.generate(action, history);
            std::string r = respondent.respond(q, action, history);
            // Redraw on an accidental repeat so only planted duplicates exist.
            for (std::size_t salt = 0; !seen.emplace(q, r).second; ++salt)
                r = r.substr(0, r.size() - 1) + " " + std::string(neutral_filler_words()[salt % 40]) + ".";
            conv.exchanges.push_back({q, action, {}, r});
            history.push_back({q, r});
        }
        out.clean.push_back(conv);

        CorpusConversation raw{conv.conversation_id, {}};
        for (const auto& ex : conv.exchanges) {
            raw.exchanges.push_back(ex);
            if (rng.bernoulli(spec.duplicate_rate)) {
                raw.exchanges.push_back(ex);
                ++out.planted.duplicate;
            }
            if (rng.bernoulli(spec.placeholder_rate)) {
                static constexpr std::array<const char*, 3> markers = {"N/A", "nan", "None"};
                raw.exchanges.push_back({ex.bot_question, ex.action, {}, markers[rng.uniform_index(3)]});
                ++out.planted.placeholder;
            }
            if (rng.bernoulli(spec.missing_rate)) {
                raw.exchanges.push_back({ex.bot_question, ex.action, {}, ""});
                ++out.planted.missing;
            }
            if (rng.bernoulli(spec.zero_word_rate)) {
                raw.exchanges.push_back({ex.bot_question, ex.action, {}, "..."});
                ++out.planted.zero_words;
            }
        }
        out.raw.push_back(std::move(raw));
    }
    return out;
}

}  // namespace engage
