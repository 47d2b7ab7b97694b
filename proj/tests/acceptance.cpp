// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/experiment.hpp"
#include "engage/prior_learning.hpp"
#include "engage/session.hpp"
#include "engage/stats.hpp"
#include "test_support.hpp"

using namespace engage;
using ES = EngagementState;
using AT = ActionType;
namespace t = engage::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void expect(Outcome& o, bool cond, const std::string& what) {
    if (!cond && o.pass) {
        o.pass = false;
        o.detail = what;
    }
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs > budget_s) expect(o, false, "runtime over budget");
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %-28s %7.3fs%s%s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.empty() ? "" : "  ",
                o.detail.c_str());
    std::fflush(stdout);
}

// ---------------------------------------------------------------------------

Outcome lsde_formulas() {
    Outcome o;
    expect(o, lsde::kLengthCap == 29.0 && lsde::kPronounCap == 3.0, "caps");
    expect(o,
           lsde::kLengthWeight == 0.20 && lsde::kDisclosureWeight == 0.20 && lsde::kEmotionWeight == 0.35 &&
               lsde::kSpecificityWeight == 0.25,
           "weights");

    const auto& scorer = *t::shared_scorer();
    const std::set<std::string> pronouns = {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"};
    const std::vector<std::string> pool = {"I",       "my",      "We",     "OUR",   "me",       "us",     "mine",
                                           "myself",  "loved",   "hated",  "great", "terrible", "library", "table",
                                           "Professor", "Smith", "semester", "yesterday", "campus", "not", "very",
                                           "dorm",    "friends", "boring", "happy", "Michigan", "Monday", "classes"};
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        // Half the cases exercise the formulas on raw inputs, half on real text.
        std::size_t words, prons;
        double compound;
        SpecificityLabels spec;
        LsdeComponents got;
        if (i % 2 == 0) {
            words = rng.uniform_index(80);
            prons = rng.uniform_index(8);
            compound = rng.uniform01() * 2.0 - 1.0;
            spec = {rng.bernoulli(0.5), rng.bernoulli(0.5), rng.bernoulli(0.5)};
            got = make_components(words, prons, compound, spec);
        } else {
            std::string text;
            words = rng.uniform_index(45);
            prons = 0;
            for (std::size_t k = 0; k < words; ++k) {
                const auto& w = pool[rng.uniform_index(pool.size())];
                std::string lower = w;
                for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                prons += pronouns.count(lower);
                text += (k ? " " : "") + w;
            }
            got = scorer.components(text);
            compound = got.sentiment_compound;
            spec = got.specificity;
            expect(o, got.word_count == words, "word count: " + text);
            expect(o, got.pronoun_count == prons, "pronoun count: " + text);
        }
        const double l = std::min(double(words) / 29.0, 1.0);
        const double d = std::min(double(prons) / 3.0, 1.0);
        const double e = std::fabs(compound);
        const double s = double(int(spec.entities) + int(spec.temporal) + int(spec.spatial)) / 3.0;
        const double q = 0.20 * l + 0.20 * d + 0.35 * e + 0.25 * s;
        expect(o, got.l_norm == l && got.d_norm == d && got.e_norm == e && got.s_norm == s, "component mismatch");
        expect(o, composite_score(got).composite == q, "composite mismatch");
    }
    return o;
}

Outcome sentiment_fixtures() {
    Outcome o;
    std::ifstream in(t::data_dir() / "fixtures" / "sentiment_fixtures.jsonl");
    expect(o, bool(in), "fixture file missing");
    std::string line;
    std::size_t total = 0, close = 0;
    double worst = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto rec = nlohmann::json::parse(line);
        const double diff = std::fabs(t::shared_analyzer().compound(rec.at("text").get<std::string>()) -
                                      rec.at("compound").get<double>());
        ++total;
        close += diff <= 1e-4;
        worst = std::max(worst, diff);
    }
    expect(o, total >= 200, "fewer than 200 fixtures");
    expect(o, double(close) >= 0.95 * double(total), "under 95% within 1e-4");
    expect(o, worst <= 0.05, "worst case above 0.05");
    o.detail = std::to_string(close) + "/" + std::to_string(total) + " within 1e-4, worst " + std::to_string(worst);
    return o;
}

Outcome state_grid() {
    Outcome o;
    std::size_t checked = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double q = i / 1000.0;
        for (int j = -1000; j <= 1000; ++j) {
            const double delta = j / 1000.0;
            ES expected;
            if (q < 0.3)
                expected = delta > 0.05 ? ES::low_improving : ES::low_stable;
            else if (q >= 0.6)
                expected = delta > 0.05 ? ES::high_improving : ES::high_stable;
            else
                expected = ES::medium;
            if (assign_state(q, delta) != expected) {
                expect(o, false, "mismatch at q=" + std::to_string(q) + " delta=" + std::to_string(delta));
                return o;
            }
            ++checked;
        }
    }
    expect(o, assign_state(0.3, 0.1) == ES::medium && assign_state(0.6, 0.05) == ES::high_stable &&
                  assign_state(0.29, 0.05) == ES::low_stable,
           "boundaries");
    o.detail = std::to_string(checked) + " grid points";
    return o;
}

EvTable brute_force_ev(const std::vector<ExchangePair>& pairs) {
    EvTable table;
    for (auto s : kAllStates)
        for (auto a : kAllActions) {
            std::vector<double> cell, pos;
            for (const auto& p : pairs)
                if (p.state_before == s && p.action == a) cell.push_back(p.delta_q);
            for (double d : cell)
                if (d > 0.0) pos.push_back(d);
            double sum = 0;
            for (double d : pos) sum += d;
            table.at(s, a).n = cell.size();
            if (!pos.empty()) table.at(s, a).ev = (double(pos.size()) / double(cell.size())) * (sum / double(pos.size()));
        }
    return table;
}

Outcome offline_ev() {
    Outcome o;
    std::vector<ExchangePair> worked;
    for (int i = 0; i < 16; ++i) worked.push_back({ES::low_stable, AT::topic_probe, 0.3815});
    for (int i = 0; i < 4; ++i) worked.push_back({ES::low_stable, AT::topic_probe, -0.05 * (i + 1)});
    const auto w = compute_ev(worked).at(ES::low_stable, AT::topic_probe);
    const double mean_gain = brute_force_ev(worked).at(ES::low_stable, AT::topic_probe).ev / 0.80;
    expect(o, w.n == 20, "worked example n");
    expect(o, std::fabs(mean_gain - 0.3815) < 1e-15, "worked example mean gain");
    expect(o, w.ev == 0.80 * mean_gain, "worked example factorisation");
    expect(o, std::round(w.ev * 1000.0) / 1000.0 == 0.305, "worked example rounds to 0.305");

    Rng rng(4);
    for (int set = 0; set < 1000; ++set) {
        std::vector<ExchangePair> pairs(rng.uniform_index(300));
        for (auto& p : pairs) {
            p.state_before = kAllStates[rng.uniform_index(kStateCount)];
            p.action = kAllActions[rng.uniform_index(kActionCount)];
            p.delta_q = rng.bernoulli(0.05) ? 0.0 : rng.uniform01() * 2.0 - 1.0;
        }
        if (!(compute_ev(pairs) == brute_force_ev(pairs))) {
            expect(o, false, "random set " + std::to_string(set) + " differs from oracle");
            break;
        }
    }
    o.detail = "EV(low_stable, topic_probe) = " + std::to_string(w.ev);
    return o;
}

Outcome priors_fixture() {
    Outcome o;
    // Published prior EV estimates, in state and action enum order.
    const double ev[5][5] = {{0.058, 0.047, 0.032, 0.0, 0.0},
                             {0.288, 0.170, 0.305, 0.348, 0.476},
                             {0.071, 0.073, 0.039, 0.0, 0.0},
                             {0.004, 0.020, 0.000, 0.0, 0.0},
                             {0.040, 0.083, 0.028, 0.0, 0.0}};
    const std::uint64_t n[5][5] = {
        {15, 9, 3, 0, 0}, {112, 27, 20, 4, 1}, {66, 28, 22, 0, 0}, {33, 14, 4, 0, 0}, {9, 1, 3, 0, 0}};
    const auto table = load_priors(t::data_dir() / "priors" / "historical.json");
    std::size_t cells = 0, zero_cells = 0;
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < 5; ++s)
        for (std::size_t a = 0; a < 5; ++a) {
            const auto& e = table.at(kAllStates[s], kAllActions[a]);
            expect(o, e.ev == ev[s][a] && e.n == n[s][a],
                   std::string(to_string(kAllStates[s])) + "/" + std::string(to_string(kAllActions[a])));
            ++cells;
            total += e.n;
            if (e.n == 0) {
                ++zero_cells;
                expect(o, e.ev == 0.0, "n=0 cell with nonzero ev");
            }
        }
    expect(o, cells == 25 && zero_cells == 8 && total == 371, "cell/zero/total counts");
    return o;
}

Outcome policy_behaviour() {
    Outcome o;
    const auto& table = *t::historical_priors();
    for (double eps : {0.15, 0.30}) {
        Rng rng(derive_seed(20241015, "acceptance/eps"));
        std::size_t explore = 0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) explore += select_action(table, ES::medium, eps, rng).mode == SelectionMode::explore;
        const double frac = double(explore) / n;
        expect(o, std::fabs(frac - eps) <= 0.01, "explore fraction " + std::to_string(frac));
    }
    Rng rng(3);
    for (auto s : kAllStates) {
        ActionType best = AT::specification;
        for (auto a : kAllActions)
            if (table.ev(s, a) > table.ev(s, best)) best = a;
        for (int i = 0; i < 1000; ++i) expect(o, select_action(table, s, 0.0, rng).action == best, "greedy != argmax");
    }
    const ExplorationSchedule decay = LinearDecayEpsilon{0.40, 0.05, 15.0};
    expect(o, epsilon_at(decay, 0) == 0.40 && epsilon_at(decay, 15) == 0.05, "decay endpoints");
    return o;
}

Outcome td_update_properties() {
    Outcome o;
    Rng rng(7);
    // Dyadic grid: every operation is exact, so the identity must hold bit for bit.
    for (int i = 0; i < 10000; ++i) {
        EvTable tab;
        const double ev = double(rng.uniform_index(1025)) / 1024.0;
        const double r = double(rng.uniform_index(2049)) / 1024.0 - 1.0;
        const double alpha = double(rng.uniform_index(16) + 1) / 16.0;
        tab.at(ES::medium, AT::validation).ev = ev;
        const double next = td_update(tab, ES::medium, AT::validation, r, alpha).ev;
        expect(o, std::fabs(next - r) == (1.0 - alpha) * std::fabs(ev - r), "dyadic contraction");
    }
    // Arbitrary doubles: identity up to rounding.
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
        EvTable tab;
        const double ev = rng.uniform01();
        const double r = rng.uniform01() * 2.0 - 1.0;
        const double alpha = 0.01 + 0.99 * rng.uniform01();
        tab.at(ES::medium, AT::validation).ev = ev;
        const double next = td_update(tab, ES::medium, AT::validation, r, alpha).ev;
        worst = std::max(worst, std::fabs(std::fabs(next - r) - (1.0 - alpha) * std::fabs(ev - r)));
    }
    expect(o, worst <= 1e-15, "real-valued contraction off by " + std::to_string(worst));

    EvTable tab;
    Rng noise(derive_seed(20241015, "acceptance/td"));
    const double mu = 0.35;
    for (int step = 0; step < 500; ++step)
        td_update(tab, ES::low_stable, AT::specification, mu + noise.normal(0.0, 0.02), 0.3);
    const double final_ev = tab.ev(ES::low_stable, AT::specification);
    expect(o, std::fabs(final_ev - mu) <= 0.02, "did not converge: " + std::to_string(final_ev));
    o.detail = "500-step ev " + std::to_string(final_ev) + " vs mean " + std::to_string(mu);
    return o;
}

Outcome baseline() {
    Outcome o;
    const auto dist = BaselineDistribution::historical();
    Rng rng(derive_seed(20241015, "acceptance/baseline"));
    std::array<std::size_t, kActionCount> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[index_of(baseline_select(dist, rng))];
    const double target[] = {62.3, 23.6, 12.8, 0.9, 0.4};
    std::string shares;
    for (std::size_t i = 0; i < kActionCount; ++i) {
        const double pct = 100.0 * double(counts[i]) / n;
        expect(o, std::fabs(pct - target[i]) <= 0.5, "share " + std::to_string(pct));
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.1f ", pct);
        shares += buf;
    }
    // Quality paths that hold each of the five states as long as possible.
    const std::vector<std::function<double(int)>> paths = {
        [](int i) { return 0.05 + 0.06 * (i % 4); },  // low, rising in steps
        [](int) { return 0.1; },
        [](int) { return 0.45; },
        [](int i) { return 0.6 + 0.06 * (i % 6); },
        [](int) { return 0.9; }};
    std::vector<std::vector<AT>> sequences;
    std::set<ES> seen_states;
    for (const auto& path : paths) {
        SessionConfig cfg;
        cfg.kind = PolicyKind::baseline;
        cfg.policy.rng_seed = 99;
        Session s("baseline", cfg, t::historical_priors(), nullptr, std::make_shared<TemplateQuestionGenerator>());
        auto& seq = sequences.emplace_back();
        for (int i = 0; i < 15; ++i) {
            QualityScore q;
            q.composite = path(i);
            s.submit_scored("r", q);
            seen_states.insert(s.records().back().state);
            if (!s.ended()) seq.push_back(s.current_action());
        }
    }
    for (const auto& seq : sequences) expect(o, seq == sequences.front(), "baseline sequence depends on state");
    expect(o, seen_states.size() == kStateCount, "not every state visited");
    o.detail = "shares " + shares;
    return o;
}

Outcome isolation_and_replay() {
    Outcome o;
    SessionConfig cfg;
    cfg.policy.schedule = FixedEpsilon{0.30};
    cfg.policy.rng_seed = 12345;
    std::vector<std::string> lines;
    Session a("a", cfg, t::historical_priors(), t::shared_scorer(), std::make_shared<TemplateQuestionGenerator>(),
              [&](const std::string& l) { lines.push_back(l); });
    ScriptedRespondent who(default_profiles()[2], 77);
    std::vector<Turn> history;
    while (!a.ended()) {
        const auto q = a.current_question();
        const auto r = who.respond(q, a.current_action(), history);
        history.push_back({q, r});
        a.submit(r);
    }
    expect(o, !(a.table() == *t::historical_priors()), "session did not learn");
    Session b("b", cfg, t::historical_priors(), t::shared_scorer(), std::make_shared<TemplateQuestionGenerator>());
    expect(o, b.table() == *t::historical_priors(), "new session table differs from priors");
    expect(o, *t::historical_priors() == load_priors(t::data_dir() / "priors" / "historical.json"), "priors mutated");

    t::TempDir dir("acceptance");
    {
        std::ofstream out(dir.path() / "a.jsonl");
        for (const auto& l : lines) out << l << '\n';
    }
    const auto log = load_session_log(dir.path() / "a.jsonl");
    const auto replay = replay_session(log, t::historical_priors(), t::shared_scorer());
    expect(o, replay.identical && replay.records_checked == 15, "replay diverged");
    for (std::size_t i = 0; i < log.records.size() && i < replay.replayed.size(); ++i) {
        expect(o, replay.replayed[i].action == log.records[i].action, "action trajectory");
        expect(o, replay.replayed[i].update == log.records[i].update, "EV trajectory");
    }
    return o;
}

Outcome directional_experiment() {
    Outcome o;
    const auto cfg = default_experiment_config();
    ExperimentBackends b;
    b.priors = t::historical_priors();
    b.scorer = t::shared_scorer();
    const auto runs = run_grid(cfg, b);
    const auto result = aggregate(cfg, runs);
    expect(o, result.at("counts").at("complete") == 80, "not all 80 conversations completed");
    auto condition = [&](const char* key, const std::string& name) -> const nlohmann::json& {
        for (const auto& row : result.at(key))
            if (row.at("condition") == name) return row;
        throw Error("missing condition " + name);
    };
    const double base_dq = condition("conditions", "baseline").at("delta_q").at("mean").get<double>();
    const double eps_dq = condition("conditions", "adaptive_eps_0.30").at("delta_q").at("mean").get<double>();
    const auto& base_act = condition("action_distribution", "baseline").at("shares");
    const auto& eps_act = condition("action_distribution", "adaptive_eps_0.30").at("shares");
    expect(o, eps_dq > base_dq, "adaptive dQ not above baseline");
    expect(o, eps_act.at("specification").get<double>() < base_act.at("specification").get<double>(),
           "specification share not lower");
    expect(o, eps_act.at("validation").get<double>() > base_act.at("validation").get<double>(),
           "validation share not higher");
    char buf[160];
    std::snprintf(buf, sizeof buf, "dQ %+.3f vs %+.3f; spec %.1f%% vs %.1f%%; valid %.1f%% vs %.1f%%", eps_dq, base_dq,
                  eps_act.at("specification").get<double>(), base_act.at("specification").get<double>(),
                  eps_act.at("validation").get<double>(), base_act.at("validation").get<double>());
    o.detail = buf;
    return o;
}

Outcome statistics() {
    Outcome o;
    const auto doc = nlohmann::json::parse(t::read_file(t::data_dir() / "fixtures" / "stats_fixtures.json"));
    std::size_t cases = 0;
    for (const auto& c : doc.at("cases")) {
        const auto a = c.at("a").get<std::vector<double>>();
        const auto b = c.at("b").get<std::vector<double>>();
        const auto s = stats::student_t(a, b);
        const auto name = c.at("name").get<std::string>();
        expect(o, std::fabs(s.t - c.at("student").at("t").get<double>()) <= 1e-6, name + " t");
        expect(o, std::fabs(s.p - c.at("student").at("p").get<double>()) <= 1e-6, name + " p");
        expect(o, s.df == c.at("student").at("df").get<double>(), name + " df");
        expect(o, std::fabs(stats::cohens_d(a, b) - c.at("cohens_d").get<double>()) <= 1e-6, name + " d");
        if (a.size() == 20 && b.size() == 20) expect(o, s.df == 38.0, "df for 20+20");
        ++cases;
    }
    expect(o, cases >= 3, "too few fixtures");
    o.detail = std::to_string(cases) + " fixtures";
    return o;
}

}  // namespace

int main() {
    criterion(1, "LSDE formulas", 5, lsde_formulas);
    criterion(2, "sentiment fixtures", 5, sentiment_fixtures);
    criterion(3, "state assignment grid", 10, state_grid);
    criterion(4, "offline EV", 10, offline_ev);
    criterion(5, "priors fixture", 0, priors_fixture);
    criterion(6, "policy behaviour", 10, policy_behaviour);
    criterion(7, "TD update", 0, td_update_properties);
    criterion(8, "baseline", 0, baseline);
    criterion(9, "session isolation + replay", 0, isolation_and_replay);
    criterion(10, "directional experiment", 60, directional_experiment);
    criterion(11, "statistics", 0, statistics);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures;
}
