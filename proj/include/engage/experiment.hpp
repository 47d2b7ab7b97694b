#pragma once

// Simulation experiments: every (condition, profile, repetition) cell runs one
// session against a simulated respondent. Aggregation is a sequential fold in
// cell order, so results do not depend on thread scheduling.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/error.hpp"
#include "engage/policy.hpp"
#include "engage/question_gen.hpp"
#include "engage/rng.hpp"
#include "engage/session.hpp"
#include "engage/simulant.hpp"
#include "engage/stats.hpp"

namespace engage {

// ---------------------------------------------------------------------------
// Per-conversation metrics over the quality sequence Q_1..Q_n.

// Q_n - Q_1 (last available exchange when the conversation ended early).
inline double quality_improvement(std::span<const double> q) {
    if (q.empty()) throw InsufficientData("quality improvement of an empty conversation");
    return q.back() - q.front();
}

struct PhaseChanges {
    std::optional<double> early;  // exchanges 1-5
    std::optional<double> mid;    // 6-10
    std::optional<double> late;   // 11-15
};

// Each phase: Q at its last available exchange minus Q at its first. A phase
// with no exchanges is undefined.
inline PhaseChanges phase_changes(std::span<const double> q) {
    auto phase = [&](std::size_t first, std::size_t last) -> std::optional<double> {
        if (q.size() < first) return std::nullopt;
        return q[std::min(last, q.size()) - 1] - q[first - 1];
    };
    return {phase(1, 5), phase(6, 10), phase(11, 15)};
}

// Share of defined deltas (exchanges 2..n) that are positive.
inline double exchange_success_rate(std::span<const double> q) {
    if (q.size() < 2) throw InsufficientData("success rate needs at least two exchanges");
    std::size_t up = 0;
    for (std::size_t t = 1; t < q.size(); ++t)
        if (q[t] - q[t - 1] > 0.0) ++up;
    return static_cast<double>(up) / static_cast<double>(q.size() - 1);
}

inline std::vector<double> qualities(const std::vector<ExchangeRecord>& records) {
    std::vector<double> q;
    q.reserve(records.size());
    for (const auto& r : records) q.push_back(r.score.composite);
    return q;
}

struct ActionCounts {
    std::array<std::size_t, kActionCount> counts{};
    std::size_t total() const {
        std::size_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }
    // Percentages; all zero when empty.
    std::array<double, kActionCount> shares() const {
        std::array<double, kActionCount> s{};
        const auto n = total();
        if (n == 0) return s;
        for (std::size_t i = 0; i < kActionCount; ++i) s[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(n);
        return s;
    }
};

// Counts policy-chosen actions; the fixed opening question is excluded.
inline void count_actions(const std::vector<ExchangeRecord>& records, ActionCounts& into) {
    for (const auto& r : records)
        if (r.mode != SelectionMode::opening) ++into.counts[index_of(r.action)];
}

// ---------------------------------------------------------------------------
// Configuration

struct ConditionSpec {
    std::string name;
    SessionConfig session;  // seed is replaced per conversation
};

enum class RespondentBackend { scripted, remote };
enum class TestKind { student, welch };

struct ExperimentConfig {
    std::vector<ConditionSpec> conditions;
    std::vector<SimulatedProfile> profiles;
    std::size_t repetitions = 5;
    std::size_t exchanges = 15;
    std::uint64_t master_seed = 20241015;
    std::string baseline_condition = "baseline";
    TestKind test = TestKind::student;
    std::size_t threads = 1;
    RespondentBackend respondent = RespondentBackend::scripted;
    bool remote_generator = false;
    llm::HttpClientConfig llm;

    void validate() const {
        if (conditions.empty()) throw DomainError("experiment needs at least one condition");
        if (profiles.empty()) throw DomainError("experiment needs at least one profile");
        if (repetitions < 1) throw DomainError("repetitions must be at least 1");
        if (exchanges < 1) throw DomainError("exchanges must be at least 1");
        for (const auto& p : profiles) p.validate();
        std::set<std::string> names;
        for (const auto& c : conditions) {
            c.session.validate();
            if (!names.insert(c.name).second) throw DomainError("duplicate condition '" + c.name + "'");
        }
    }
};

inline std::vector<ConditionSpec> default_conditions() {
    auto adaptive = [](std::string name, ExplorationSchedule schedule) {
        ConditionSpec c{std::move(name), {}};
        c.session.kind = PolicyKind::adaptive;
        c.session.policy.schedule = schedule;
        return c;
    };
    ConditionSpec baseline{"baseline", {}};
    baseline.session.kind = PolicyKind::baseline;
    return {baseline, adaptive("adaptive_eps_0.15", FixedEpsilon{0.15}), adaptive("adaptive_eps_0.30", FixedEpsilon{0.30}),
            adaptive("adaptive_decay", LinearDecayEpsilon{0.40, 0.05, 15.0})};
}

inline ExperimentConfig default_experiment_config() {
    ExperimentConfig c;
    c.conditions = default_conditions();
    c.profiles = default_profiles();
    return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& cond : c.conditions) {
        auto s = to_json(cond.session);
        s["policy"].erase("seed");
        conds.push_back({{"name", cond.name}, {"session", s}});
    }
    nlohmann::json profs = nlohmann::json::array();
    for (const auto& p : c.profiles) profs.push_back(to_json(p));
    nlohmann::json llm_cfg;
    to_json(llm_cfg, c.llm);
    return {{"conditions", conds},
            {"profiles", profs},
            {"repetitions", c.repetitions},
            {"exchanges", c.exchanges},
            {"master_seed", c.master_seed},
            {"baseline_condition", c.baseline_condition},
            {"test", c.test == TestKind::student ? "student" : "welch"},
            {"threads", c.threads},
            {"respondent", c.respondent == RespondentBackend::scripted ? "scripted" : "remote"},
            {"generator", c.remote_generator ? "remote" : "template"},
            {"llm", llm_cfg}};
}

// Missing keys keep the defaults; "profiles": "default" selects the bundled set.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c = default_experiment_config();
    if (auto it = j.find("conditions"); it != j.end()) {
        c.conditions.clear();
        for (const auto& cj : *it) {
            ConditionSpec cond;
            cond.name = cj.at("name").get<std::string>();
            cond.session = session_config_from_json(cj.contains("session") ? cj.at("session") : cj);
            c.conditions.push_back(std::move(cond));
        }
    }
    if (auto it = j.find("profiles"); it != j.end() && it->is_array()) {
        c.profiles.clear();
        for (const auto& pj : *it) c.profiles.push_back(profile_from_json(pj));
    }
    c.repetitions = j.value("repetitions", c.repetitions);
    c.exchanges = j.value("exchanges", c.exchanges);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.baseline_condition = j.value("baseline_condition", c.baseline_condition);
    if (auto t = j.value("test", std::string("student")); t == "welch") c.test = TestKind::welch;
    else if (t != "student") throw Error("unknown test '" + t + "'");
    c.threads = std::max<std::size_t>(1, j.value("threads", c.threads));
    if (auto r = j.value("respondent", std::string("scripted")); r == "remote") c.respondent = RespondentBackend::remote;
    else if (r != "scripted") throw Error("unknown respondent backend '" + r + "'");
    if (auto g = j.value("generator", std::string("template")); g == "remote") c.remote_generator = true;
    else if (g != "template") throw Error("unknown generator backend '" + g + "'");
    if (j.contains("llm")) from_json(j.at("llm"), c.llm);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Running

enum class ConversationStatus { complete, incomplete, failed };

inline std::string_view to_string(ConversationStatus s) noexcept {
    switch (s) {
        case ConversationStatus::complete: return "complete";
        case ConversationStatus::incomplete: return "incomplete";
        case ConversationStatus::failed: return "failed";
    }
    return "?";
}

struct ConversationRun {
    std::string condition;
    std::string profile;
    std::size_t repetition = 0;  // 1-based
    ConversationStatus status = ConversationStatus::failed;
    std::string error;
    SessionLog log;
};

inline std::string conversation_id(const std::string& condition, const std::string& profile, std::size_t rep) {
    return condition + "__" + profile + "__r" + std::to_string(rep);
}

struct ExperimentBackends {
    std::shared_ptr<const EvTable> priors;
    std::shared_ptr<const ResponseScorer> scorer;
    std::shared_ptr<const QuestionGenerator> generator;  // null means templates
    // Builds the respondent for a cell; null means the scripted respondent.
    std::function<std::unique_ptr<Respondent>(const SimulatedProfile&, std::uint64_t seed)> respondent_factory;
};

// The respondent seed depends on (profile, repetition) only, so every
// condition meets the same simulated student.
inline ConversationRun run_conversation(const ExperimentConfig& cfg, const ExperimentBackends& backends,
                                        const ConditionSpec& cond, const SimulatedProfile& profile, std::size_t rep) {
    ConversationRun run{cond.name, profile.name, rep, ConversationStatus::failed, {}, {}};
    const auto cell = conversation_id(cond.name, profile.name, rep);
    const auto respondent_seed = derive_seed(cfg.master_seed, "respondent/" + profile.name + "/" + std::to_string(rep));
    SessionConfig sc = cond.session;
    sc.max_exchanges = cfg.exchanges;
    sc.policy.rng_seed = derive_seed(cfg.master_seed, "policy/" + cell);
    try {
        std::unique_ptr<Respondent> respondent =
            backends.respondent_factory ? backends.respondent_factory(profile, respondent_seed)
                                        : std::make_unique<ScriptedRespondent>(profile, respondent_seed);
        auto generator = backends.generator ? backends.generator : std::make_shared<TemplateQuestionGenerator>();
        Session session(cell, sc, backends.priors, backends.scorer, generator);
        std::vector<Turn> history;
        try {
            while (!session.ended()) {
                const std::string question = session.current_question();
                const auto reply = respondent->respond(question, session.current_action(), history);
                session.submit(reply);
                history.push_back({question, reply});
            }
            run.status = ConversationStatus::complete;
        } catch (const std::exception& e) {
            run.error = e.what();
            run.status = session.records().empty() ? ConversationStatus::failed : ConversationStatus::incomplete;
        }
        run.log = session.log();
    } catch (const std::exception& e) {
        run.error = e.what();
        run.status = ConversationStatus::failed;
    }
    return run;
}

// Runs every cell in (condition, profile, repetition) order; with threads > 1
// cells are distributed over workers but stored by cell index.
inline std::vector<ConversationRun> run_grid(const ExperimentConfig& cfg, const ExperimentBackends& backends) {
    cfg.validate();
    struct Cell {
        std::size_t c, p, r;
    };
    std::vector<Cell> cells;
    for (std::size_t c = 0; c < cfg.conditions.size(); ++c)
        for (std::size_t p = 0; p < cfg.profiles.size(); ++p)
            for (std::size_t r = 1; r <= cfg.repetitions; ++r) cells.push_back({c, p, r});
    std::vector<ConversationRun> runs(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            runs[i] = run_conversation(cfg, backends, cfg.conditions[cells[i].c], cfg.profiles[cells[i].p], cells[i].r);
    };
    const std::size_t n = std::min(cfg.threads, cells.size());
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return runs;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace experiment_detail {

inline nlohmann::json summary(const std::vector<double>& x) {
    if (x.empty()) return {{"n", 0}, {"mean", nullptr}, {"sd", nullptr}};
    auto sd = stats::stddev(x);
    return {{"n", x.size()}, {"mean", stats::mean(x)}, {"sd", sd ? nlohmann::json(*sd) : nlohmann::json(nullptr)}};
}

inline nlohmann::json shares_json(const std::array<double, kActionCount>& s) {
    nlohmann::json j = nlohmann::json::object();
    for (auto a : kAllActions) j[std::string(to_string(a))] = s[index_of(a)];
    return j;
}

inline nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace experiment_detail

// Builds the result document from raw runs. Everything here is recomputable
// from the session logs alone.
inline nlohmann::json aggregate(const ExperimentConfig& cfg, const std::vector<ConversationRun>& runs) {
    using namespace experiment_detail;
    struct Group {
        std::vector<double> dq, qbar, qfinal, success, early, mid, late;
        ActionCounts actions;
        std::size_t complete = 0, incomplete = 0, failed = 0;
    };
    std::map<std::string, Group> groups;
    nlohmann::json conversations = nlohmann::json::array();
    std::size_t complete = 0, incomplete = 0, failed = 0;

    for (const auto& run : runs) {
        auto& g = groups[run.condition];
        nlohmann::json row = {{"condition", run.condition},
                              {"profile", run.profile},
                              {"repetition", run.repetition},
                              {"session_id", conversation_id(run.condition, run.profile, run.repetition)},
                              {"status", to_string(run.status)},
                              {"exchanges", run.log.records.size()}};
        if (!run.error.empty()) row["error"] = run.error;
        if (run.status == ConversationStatus::failed || run.log.records.empty()) {
            ++g.failed, ++failed;
            conversations.push_back(row);
            continue;
        }
        (run.status == ConversationStatus::complete ? (++g.complete, ++complete) : (++g.incomplete, ++incomplete));
        const auto q = qualities(run.log.records);
        const double dq = quality_improvement(q);
        const double qbar = stats::mean(q);
        const auto ph = phase_changes(q);
        g.dq.push_back(dq);
        g.qbar.push_back(qbar);
        g.qfinal.push_back(q.back());
        row["delta_q"] = dq;
        row["mean_quality"] = qbar;
        row["final_quality"] = q.back();
        if (q.size() >= 2) {
            const double sr = exchange_success_rate(q);
            g.success.push_back(sr);
            row["success_rate"] = sr;
        } else {
            row["success_rate"] = nullptr;
        }
        if (ph.early) g.early.push_back(*ph.early);
        if (ph.mid) g.mid.push_back(*ph.mid);
        if (ph.late) g.late.push_back(*ph.late);
        row["phases"] = {{"early", opt(ph.early)}, {"mid", opt(ph.mid)}, {"late", opt(ph.late)}};
        count_actions(run.log.records, g.actions);
        conversations.push_back(row);
    }

    nlohmann::json conditions = nlohmann::json::array(), phases = nlohmann::json::array(),
                   actions = nlohmann::json::array(), comparisons = nlohmann::json::array();
    const Group* base = groups.count(cfg.baseline_condition) ? &groups.at(cfg.baseline_condition) : nullptr;
    const auto base_shares = base ? base->actions.shares() : std::array<double, kActionCount>{};
    for (const auto& cond : cfg.conditions) {
        const auto it = groups.find(cond.name);
        const Group empty;
        const Group& g = it == groups.end() ? empty : it->second;
        conditions.push_back({{"condition", cond.name},
                              {"complete", g.complete},
                              {"incomplete", g.incomplete},
                              {"failed", g.failed},
                              {"delta_q", summary(g.dq)},
                              {"mean_quality", summary(g.qbar)},
                              {"final_quality", summary(g.qfinal)},
                              {"success_rate", summary(g.success)}});
        phases.push_back({{"condition", cond.name},
                          {"early", summary(g.early)},
                          {"mid", summary(g.mid)},
                          {"late", summary(g.late)}});
        const auto shares = g.actions.shares();
        nlohmann::json row = {{"condition", cond.name}, {"total", g.actions.total()}, {"shares", shares_json(shares)}};
        if (base) {
            std::array<double, kActionCount> pp{};
            for (std::size_t i = 0; i < kActionCount; ++i) pp[i] = shares[i] - base_shares[i];
            row["delta_pp"] = shares_json(pp);
        }
        actions.push_back(row);

        if (base && cond.name != cfg.baseline_condition) {
            nlohmann::json cmp = {{"a", cond.name}, {"b", cfg.baseline_condition}, {"metric", "delta_q"},
                                  {"test", cfg.test == TestKind::student ? "student" : "welch"}};
            if (g.dq.size() >= 2 && base->dq.size() >= 2) {
                const auto t = cfg.test == TestKind::student ? stats::student_t(g.dq, base->dq)
                                                             : stats::welch_t(g.dq, base->dq);
                cmp["t"] = t.t;
                cmp["df"] = t.df;
                cmp["p"] = t.p;
                cmp["cohens_d"] = stats::cohens_d(g.dq, base->dq);
            } else {
                cmp["t"] = cmp["df"] = cmp["p"] = cmp["cohens_d"] = nullptr;
            }
            comparisons.push_back(cmp);
        }
    }

    return {{"config", to_json(cfg)},
            {"counts", {{"planned", runs.size()}, {"complete", complete}, {"incomplete", incomplete}, {"failed", failed}}},
            {"conditions", conditions},
            {"phases", phases},
            {"action_distribution", actions},
            {"comparisons", comparisons},
            {"conversations", conversations}};
}

// ---------------------------------------------------------------------------
// Human-readable tables

inline std::string render_tables(const nlohmann::json& result) {
    std::ostringstream os;
    auto num = [](const nlohmann::json& v, int prec = 3, bool sign = false) {
        if (v.is_null()) return std::string("n/a");
        char buf[32];
        std::snprintf(buf, sizeof buf, sign ? "%+.*f" : "%.*f", prec, v.get<double>());
        return std::string(buf);
    };
    auto msd = [&](const nlohmann::json& s, bool sign = false) {
        return num(s.at("mean"), 3, sign) + " +/- " + num(s.at("sd"));
    };
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };

    const auto& counts = result.at("counts");
    os << "Conversations: " << counts.at("complete") << " complete, " << counts.at("incomplete") << " incomplete, "
       << counts.at("failed") << " failed of " << counts.at("planned") << " planned\n\n";

    os << "Quality by condition\n";
    os << pad("condition", 22) << pad("n", 5) << pad("dQ", 20) << pad("mean Q", 20) << pad("final Q", 20)
       << "success rate\n";
    for (const auto& c : result.at("conditions"))
        os << pad(c.at("condition").get<std::string>(), 22) << pad(std::to_string(c.at("delta_q").at("n").get<int>()), 5)
           << pad(msd(c.at("delta_q"), true), 20) << pad(msd(c.at("mean_quality")), 20)
           << pad(msd(c.at("final_quality")), 20) << msd(c.at("success_rate")) << "\n";

    os << "\nComparisons against " << result.at("config").at("baseline_condition").get<std::string>() << " (dQ, "
       << result.at("config").at("test").get<std::string>() << " t-test, uncorrected)\n";
    for (const auto& c : result.at("comparisons")) {
        os << pad(c.at("a").get<std::string>(), 22) << "t(" << num(c.at("df"), 0) << ") = " << num(c.at("t"))
           << ", p = " << num(c.at("p")) << ", d = " << num(c.at("cohens_d")) << "\n";
    }

    os << "\nQuality change by phase (mean +/- sd)\n";
    os << pad("condition", 22) << pad("exchanges 1-5", 22) << pad("6-10", 22) << "11-15\n";
    for (const auto& p : result.at("phases"))
        os << pad(p.at("condition").get<std::string>(), 22) << pad(msd(p.at("early"), true), 22)
           << pad(msd(p.at("mid"), true), 22) << msd(p.at("late"), true) << "\n";

    os << "\nAction distribution (% of policy-selected questions";
    os << "; change vs baseline in pp)\n" << pad("condition", 22);
    for (auto a : kAllActions) os << pad(std::string(to_string(a)), 22);
    os << "\n";
    for (const auto& a : result.at("action_distribution")) {
        os << pad(a.at("condition").get<std::string>(), 22);
        for (auto act : kAllActions) {
            const std::string key(to_string(act));
            std::string cell = num(a.at("shares").at(key), 1);
            if (a.contains("delta_pp")) cell += " (" + num(a.at("delta_pp").at(key), 1, true) + ")";
            os << pad(cell, 22);
        }
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Output directory layout:
//   config.json          resolved configuration
//   manifest.json        one entry per cell: ids, status, log file
//   logs/<cell>.jsonl    session logs
//   result.json          aggregate
//   tables.txt           rendered tables

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

inline nlohmann::json write_experiment(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                                       const std::vector<ConversationRun>& runs) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "logs");
    nlohmann::json manifest = nlohmann::json::array();
    for (const auto& run : runs) {
        const auto id = conversation_id(run.condition, run.profile, run.repetition);
        nlohmann::json entry = {{"condition", run.condition},
                                {"profile", run.profile},
                                {"repetition", run.repetition},
                                {"status", to_string(run.status)},
                                {"error", run.error}};
        if (!run.log.records.empty() || run.status != ConversationStatus::failed) {
            const auto file = "logs/" + id + ".jsonl";
            write_text(dir / file, serialize_log(run.log));
            entry["log"] = file;
        } else {
            entry["log"] = nullptr;
        }
        manifest.push_back(entry);
    }
    const auto result = aggregate(cfg, runs);
    write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    write_text(dir / "result.json", result.dump(2) + "\n");
    write_text(dir / "tables.txt", render_tables(result));
    return result;
}

// Rebuilds the runs of an experiment directory from its manifest and logs.
inline std::pair<ExperimentConfig, std::vector<ConversationRun>> read_experiment(const std::filesystem::path& dir) {
    auto read_json = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error("cannot open " + p.string());
        return nlohmann::json::parse(in);
    };
    const auto cfg = experiment_config_from_json(read_json(dir / "config.json"));
    std::vector<ConversationRun> runs;
    for (const auto& e : read_json(dir / "manifest.json")) {
        ConversationRun run;
        run.condition = e.at("condition").get<std::string>();
        run.profile = e.at("profile").get<std::string>();
        run.repetition = e.at("repetition").get<std::size_t>();
        const auto status = e.at("status").get<std::string>();
        run.status = status == "complete"     ? ConversationStatus::complete
                     : status == "incomplete" ? ConversationStatus::incomplete
                                              : ConversationStatus::failed;
        run.error = e.value("error", "");
        if (!e.at("log").is_null()) run.log = load_session_log(dir / e.at("log").get<std::string>());
        runs.push_back(std::move(run));
    }
    return {cfg, runs};
}

}  // namespace engage
