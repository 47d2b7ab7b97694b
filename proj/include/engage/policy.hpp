#pragma once

// Tabular expected-value policy: the (state x action) EV table, epsilon-greedy
// selection with fixed or linearly decaying exploration, the constant-step TD
// update, and the state-blind prior-distribution baseline.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/error.hpp"
#include "engage/rng.hpp"
#include "engage/state.hpp"

namespace engage {

struct EvEntry {
    double ev = 0.0;
    std::uint64_t n = 0;  // bookkeeping only; never consulted by selection

    friend bool operator==(const EvEntry&, const EvEntry&) = default;
};

// All 25 (state, action) cells are always present.
class EvTable {
public:
    EvEntry& at(EngagementState s, ActionType a) { return cells_[index_of(s)][index_of(a)]; }
    const EvEntry& at(EngagementState s, ActionType a) const { return cells_[index_of(s)][index_of(a)]; }
    double ev(EngagementState s, ActionType a) const { return at(s, a).ev; }

    // Greedy action; ties go to the earliest action in enum order.
    ActionType argmax(EngagementState s) const {
        const auto& row = cells_[index_of(s)];
        std::size_t best = 0;
        for (std::size_t i = 1; i < kActionCount; ++i)
            if (row[i].ev > row[best].ev) best = i;
        return kAllActions[best];
    }

    bool all_finite() const {
        for (const auto& row : cells_)
            for (const auto& c : row)
                if (!std::isfinite(c.ev)) return false;
        return true;
    }

    friend bool operator==(const EvTable&, const EvTable&) = default;

private:
    std::array<std::array<EvEntry, kActionCount>, kStateCount> cells_{};
};

// ---------------------------------------------------------------------------
// Exploration schedules

struct FixedEpsilon {
    double epsilon = 0.30;
    friend bool operator==(const FixedEpsilon&, const FixedEpsilon&) = default;
};

// epsilon_t = max(start - (start - floor) * t / horizon, floor)
struct LinearDecayEpsilon {
    double start = 0.40;
    double floor = 0.05;
    double horizon = 15.0;
    friend bool operator==(const LinearDecayEpsilon&, const LinearDecayEpsilon&) = default;
};

using ExplorationSchedule = std::variant<FixedEpsilon, LinearDecayEpsilon>;

inline void validate(const ExplorationSchedule& schedule) {
    auto in_unit = [](double e) { return e >= 0.0 && e <= 1.0; };
    if (const auto* f = std::get_if<FixedEpsilon>(&schedule)) {
        if (!in_unit(f->epsilon)) throw DomainError("epsilon outside [0, 1]");
    } else {
        const auto& d = std::get<LinearDecayEpsilon>(schedule);
        if (!in_unit(d.start) || !in_unit(d.floor)) throw DomainError("decay epsilon outside [0, 1]");
        if (d.floor > d.start) throw DomainError("decay floor above start");
        if (!(d.horizon > 0.0)) throw DomainError("decay horizon must be positive");
    }
}

// `t` counts policy selections from 0.
inline double epsilon_at(const ExplorationSchedule& schedule, std::size_t t) {
    if (const auto* f = std::get_if<FixedEpsilon>(&schedule)) return f->epsilon;
    const auto& d = std::get<LinearDecayEpsilon>(schedule);
    if (static_cast<double>(t) >= d.horizon) return d.floor;
    const double e = d.start - (d.start - d.floor) * static_cast<double>(t) / d.horizon;
    return std::max(e, d.floor);
}

struct PolicyConfig {
    ExplorationSchedule schedule = FixedEpsilon{0.30};
    double alpha = 0.30;
    std::uint64_t rng_seed = 0;

    void validate() const {
        engage::validate(schedule);
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha outside (0, 1]");
    }
    friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

inline nlohmann::json to_json(const ExplorationSchedule& s) {
    if (const auto* f = std::get_if<FixedEpsilon>(&s)) return {{"kind", "fixed"}, {"epsilon", f->epsilon}};
    const auto& d = std::get<LinearDecayEpsilon>(s);
    return {{"kind", "linear_decay"}, {"start", d.start}, {"floor", d.floor}, {"horizon", d.horizon}};
}

inline ExplorationSchedule schedule_from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    ExplorationSchedule s;
    if (kind == "fixed") {
        s = FixedEpsilon{j.at("epsilon").get<double>()};
    } else if (kind == "linear_decay") {
        LinearDecayEpsilon d;
        d.start = j.value("start", d.start);
        d.floor = j.value("floor", d.floor);
        d.horizon = j.value("horizon", d.horizon);
        s = d;
    } else {
        throw ParseError("unknown schedule kind '" + kind + "'", 0);
    }
    validate(s);
    return s;
}

inline nlohmann::json to_json(const PolicyConfig& c) {
    return {{"schedule", to_json(c.schedule)}, {"alpha", c.alpha}, {"seed", c.rng_seed}};
}

inline PolicyConfig policy_config_from_json(const nlohmann::json& j) {
    PolicyConfig c;
    if (j.contains("schedule")) c.schedule = schedule_from_json(j.at("schedule"));
    c.alpha = j.value("alpha", c.alpha);
    c.rng_seed = j.value("seed", c.rng_seed);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Selection and update

enum class SelectionMode { explore, exploit, baseline, opening };

inline constexpr std::string_view to_string(SelectionMode m) noexcept {
    switch (m) {
        case SelectionMode::explore: return "explore";
        case SelectionMode::exploit: return "exploit";
        case SelectionMode::baseline: return "baseline";
        case SelectionMode::opening: return "opening";
    }
    return "?";
}

inline std::optional<SelectionMode> parse_selection_mode(std::string_view s) noexcept {
    for (auto m : {SelectionMode::explore, SelectionMode::exploit, SelectionMode::baseline, SelectionMode::opening})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

struct Selection {
    ActionType action;
    SelectionMode mode;
};

// One uniform draw decides explore vs exploit; exploring draws uniformly over
// all five actions, the greedy one included.
inline Selection select_action(const EvTable& table, EngagementState state, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon outside [0, 1]");
    if (rng.uniform01() < epsilon)
        return {kAllActions[rng.uniform_index(kActionCount)], SelectionMode::explore};
    return {table.argmax(state), SelectionMode::exploit};
}

// ev <- ev + alpha * (reward - ev); n <- n + 1. Returns the updated entry.
inline EvEntry td_update(EvTable& table, EngagementState state, ActionType action, double reward, double alpha) {
    if (!std::isfinite(reward)) throw DomainError("non-finite reward");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha outside (0, 1]");
    auto& e = table.at(state, action);
    e.ev = e.ev + alpha * (reward - e.ev);
    ++e.n;
    return e;
}

// ---------------------------------------------------------------------------
// Prior-distribution baseline

class BaselineDistribution {
public:
    explicit BaselineDistribution(std::array<double, kActionCount> weights) : weights_(weights) {
        double sum = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("baseline weight must be finite and >= 0");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw DomainError("baseline weights must sum to 1");
    }

    // Historical action mix: 291/110/60/4/2 of 467 labelled questions.
    static BaselineDistribution historical() {
        return BaselineDistribution({291.0 / 467.0, 110.0 / 467.0, 60.0 / 467.0, 4.0 / 467.0, 2.0 / 467.0});
    }

    static BaselineDistribution degenerate(ActionType a) {
        std::array<double, kActionCount> w{};
        w[index_of(a)] = 1.0;
        return BaselineDistribution(w);
    }

    double weight(ActionType a) const noexcept { return weights_[index_of(a)]; }
    const std::array<double, kActionCount>& weights() const noexcept { return weights_; }

private:
    std::array<double, kActionCount> weights_;
};

// Categorical draw; state is deliberately not an input.
inline ActionType baseline_select(const BaselineDistribution& dist, Rng& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < kActionCount; ++i) {
        const double w = dist.weights()[i];
        if (w > 0.0) last_positive = i;
        cumulative += w;
        if (u < cumulative && w > 0.0) return kAllActions[i];
    }
    return kAllActions[last_positive];
}

// ---------------------------------------------------------------------------
// Priors file: JSON array of {state, action, ev, n} rows.

namespace priors_detail {

inline std::size_t line_of_offset(const std::string& s, std::size_t offset) {
    return 1 + static_cast<std::size_t>(std::count(s.begin(), s.begin() + std::min(offset, s.size()), '\n'));
}

// Line on which each top-level array element starts.
inline std::vector<std::size_t> element_lines(const std::string& s) {
    std::vector<std::size_t> lines;
    std::size_t line = 1;
    int depth = 0;
    bool in_string = false, escape = false;
    bool expecting = false;
    for (char c : s) {
        if (c == '\n') ++line;
        if (in_string) {
            if (escape)
                escape = false;
            else if (c == '\\')
                escape = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (depth == 1 && expecting && !std::isspace(static_cast<unsigned char>(c)) && c != ']') {
            lines.push_back(line);
            expecting = false;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '[' || c == '{') {
            ++depth;
            if (depth == 1 && c == '[') expecting = true;
        } else if (c == ']' || c == '}') {
            --depth;
        } else if (c == ',' && depth == 1) {
            expecting = true;
        }
    }
    return lines;
}

}  // namespace priors_detail

inline EvTable parse_priors(const std::string& content) {
    EvTable table;
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) return table;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("priors: ") + e.what(), priors_detail::line_of_offset(content, e.byte ? e.byte - 1 : 0));
    }
    if (doc.is_object() && doc.contains("rows")) doc = doc.at("rows");
    if (!doc.is_array()) throw ParseError("priors: expected an array of rows", 1);
    const auto lines = priors_detail::element_lines(content);
    std::array<std::array<bool, kActionCount>, kStateCount> seen{};
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::size_t line = i < lines.size() ? lines[i] : 0;
        const auto& row = doc[i];
        try {
            const auto state = parse_state(row.at("state").get<std::string>());
            if (!state) throw ParseError("priors: unknown state '" + row.at("state").get<std::string>() + "'", line);
            const auto action = parse_action(row.at("action").get<std::string>());
            if (!action) throw ParseError("priors: unknown action '" + row.at("action").get<std::string>() + "'", line);
            const double ev = row.at("ev").get<double>();
            if (!std::isfinite(ev)) throw ParseError("priors: non-finite ev", line);
            const auto n = row.value("n", std::uint64_t{0});
            if (seen[index_of(*state)][index_of(*action)])
                throw ParseError("priors: duplicate (" + std::string(to_string(*state)) + ", " +
                                     std::string(to_string(*action)) + ")",
                                 line);
            seen[index_of(*state)][index_of(*action)] = true;
            table.at(*state, *action) = {ev, n};
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("priors: malformed row: ") + e.what(), line);
        }
    }
    return table;
}

inline EvTable load_priors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open priors file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_priors(ss.str());
}

// One row per line, all 25 cells in (state, action) enum order.
inline std::string serialize_priors(const EvTable& table) {
    std::string out = "[\n";
    bool first = true;
    for (auto s : kAllStates) {
        for (auto a : kAllActions) {
            if (!first) out += ",\n";
            first = false;
            const auto& e = table.at(s, a);
            nlohmann::json row = {{"state", to_string(s)}, {"action", to_string(a)}, {"ev", e.ev}, {"n", e.n}};
            out += row.dump();
        }
    }
    out += "\n]\n";
    return out;
}

inline void save_priors(const EvTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write priors file: " + path.string());
    out << serialize_priors(table);
}

// Stable fingerprint recorded in session logs.
inline std::string priors_hash(const EvTable& table) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_priors(table))));
    return buf;
}

// ---------------------------------------------------------------------------

// Per-session learner: a working copy of the priors, the exploration schedule
// and the session's random stream. Single writer.
class SessionLearner {
public:
    SessionLearner(std::shared_ptr<const EvTable> priors, PolicyConfig config)
        : priors_(std::move(priors)), config_(config), table_(*priors_), rng_(config.rng_seed) {
        config_.validate();
    }

    Selection select(EngagementState state) {
        const double eps = epsilon_at(config_.schedule, selections_++);
        return select_action(table_, state, eps, rng_);
    }

    EvEntry update(EngagementState state, ActionType action, double reward) {
        return td_update(table_, state, action, reward, config_.alpha);
    }

    EvTable snapshot() const { return table_; }
    void reset() {
        table_ = *priors_;
        rng_ = Rng(config_.rng_seed);
        selections_ = 0;
    }

    const EvTable& table() const noexcept { return table_; }
    const EvTable& priors() const noexcept { return *priors_; }
    const PolicyConfig& config() const noexcept { return config_; }
    std::size_t selections() const noexcept { return selections_; }

private:
    std::shared_ptr<const EvTable> priors_;
    PolicyConfig config_;
    EvTable table_;
    Rng rng_;
    std::size_t selections_ = 0;
};

}  // namespace engage
