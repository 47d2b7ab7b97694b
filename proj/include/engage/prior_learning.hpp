#pragma once

// Offline priors: score each conversation, assign states, link consecutive
// responses into exchange pairs and estimate per-cell expected value
//   EV(s, a) = P(dQ > 0 | s, a) * mean(dQ | dQ > 0, s, a).

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/corpus.hpp"
#include "engage/error.hpp"
#include "engage/lsde.hpp"
#include "engage/policy.hpp"
#include "engage/state.hpp"

namespace engage {

struct ExchangePair {
    EngagementState state_before;
    ActionType action;
    double delta_q;

    friend bool operator==(const ExchangePair&, const ExchangePair&) = default;
};

// Pairs (state_t, action asked before response t+1, Q_{t+1} - Q_t) within each
// conversation. States use the delta to the conversation's own previous
// response, zero for its first. Throws if a needed action label is missing.
inline std::vector<ExchangePair> build_pairs(std::span<const CorpusConversation> corpus, const ResponseScorer& scorer) {
    std::vector<ExchangePair> pairs;
    std::vector<double> q;
    for (const auto& conv : corpus) {
        q.clear();
        for (const auto& ex : conv.exchanges) q.push_back(scorer.score(ex.user_response).composite);
        const auto states = assign_states(q);
        for (std::size_t t = 0; t + 1 < q.size(); ++t) {
            const auto& next = conv.exchanges[t + 1];
            if (!next.action)
                throw Error("conversation '" + conv.conversation_id + "' exchange " + std::to_string(t + 2) +
                            " has no action label");
            pairs.push_back({states[t], *next.action, q[t + 1] - q[t]});
        }
    }
    return pairs;
}

// Single pass; sums accumulate in pair order. Cells with no pairs stay (0, 0).
inline EvTable compute_ev(std::span<const ExchangePair> pairs) {
    struct Acc {
        std::uint64_t n = 0;
        std::uint64_t improved = 0;
        double gain_sum = 0.0;
    };
    std::array<std::array<Acc, kActionCount>, kStateCount> acc{};
    for (const auto& p : pairs) {
        auto& a = acc[index_of(p.state_before)][index_of(p.action)];
        ++a.n;
        if (p.delta_q > 0.0) {
            ++a.improved;
            a.gain_sum += p.delta_q;
        }
    }
    EvTable table;
    for (auto s : kAllStates) {
        for (auto act : kAllActions) {
            const auto& a = acc[index_of(s)][index_of(act)];
            auto& cell = table.at(s, act);
            cell.n = a.n;
            if (a.improved == 0) continue;
            const double p_improve = static_cast<double>(a.improved) / static_cast<double>(a.n);
            const double mean_gain = a.gain_sum / static_cast<double>(a.improved);
            cell.ev = p_improve * mean_gain;
        }
    }
    return table;
}

struct PriorsBuildReport {
    std::size_t conversations = 0;
    std::size_t responses = 0;
    std::size_t pairs = 0;
    std::size_t labelled_by_classifier = 0;
    ExclusionReport exclusions;
};

inline nlohmann::json to_json(const PriorsBuildReport& r) {
    return {{"conversations", r.conversations},
            {"responses", r.responses},
            {"pairs", r.pairs},
            {"labelled_by_classifier", r.labelled_by_classifier},
            {"exclusions", to_json(r.exclusions)}};
}

// ingest -> label missing actions -> pairs -> EV.
inline EvTable build_priors(const std::filesystem::path& corpus_path, const ResponseScorer& scorer,
                            const ActionClassifier& classifier, PriorsBuildReport* report = nullptr) {
    auto ingested = ingest_corpus(corpus_path);
    const auto labelled = label_missing_actions(ingested.conversations, classifier);
    const auto pairs = build_pairs(ingested.conversations, scorer);
    if (report) {
        report->conversations = ingested.conversations.size();
        report->responses = ingested.responses();
        report->pairs = pairs.size();
        report->labelled_by_classifier = labelled;
        report->exclusions = ingested.exclusions;
    }
    return compute_ev(pairs);
}

}  // namespace engage
