#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/error.hpp"

namespace engage {

enum class EngagementState { low_improving, low_stable, medium, high_improving, high_stable };

inline constexpr std::size_t kStateCount = 5;
inline constexpr std::array<EngagementState, kStateCount> kAllStates = {
    EngagementState::low_improving, EngagementState::low_stable, EngagementState::medium,
    EngagementState::high_improving, EngagementState::high_stable};

inline constexpr std::size_t index_of(EngagementState s) noexcept { return static_cast<std::size_t>(s); }

inline constexpr std::string_view to_string(EngagementState s) noexcept {
    switch (s) {
        case EngagementState::low_improving: return "low_improving";
        case EngagementState::low_stable: return "low_stable";
        case EngagementState::medium: return "medium";
        case EngagementState::high_improving: return "high_improving";
        case EngagementState::high_stable: return "high_stable";
    }
    return "?";
}

inline std::optional<EngagementState> parse_state(std::string_view name) noexcept {
    for (auto s : kAllStates)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

namespace thresholds {
inline constexpr double kLowBelow = 0.3;
inline constexpr double kHighFrom = 0.6;
inline constexpr double kImproving = 0.05;
}  // namespace thresholds

// Quality level from q (low < 0.3 <= medium < 0.6 <= high); within low and
// high, "improving" iff the signed delta exceeds 0.05. A large drop is
// therefore "stable". Comparisons are exact IEEE doubles.
inline EngagementState assign_state(double quality, double delta) {
    if (!(quality >= 0.0 && quality <= 1.0)) throw DomainError("quality outside [0, 1]");
    if (quality < thresholds::kLowBelow)
        return delta > thresholds::kImproving ? EngagementState::low_improving : EngagementState::low_stable;
    if (quality < thresholds::kHighFrom) return EngagementState::medium;
    return delta > thresholds::kImproving ? EngagementState::high_improving : EngagementState::high_stable;
}

// States for one conversation's composite scores; the first delta is 0.
inline std::vector<EngagementState> assign_states(std::span<const double> qualities) {
    std::vector<EngagementState> out;
    out.reserve(qualities.size());
    for (std::size_t t = 0; t < qualities.size(); ++t)
        out.push_back(assign_state(qualities[t], t == 0 ? 0.0 : qualities[t] - qualities[t - 1]));
    return out;
}

struct StateDistributionRow {
    EngagementState state;
    std::size_t count = 0;
    double percent = 0.0;
    std::optional<double> mean_quality;  // absent when count == 0
};

struct StateDistribution {
    std::size_t total = 0;
    double mean_quality = 0.0;
    std::array<StateDistributionRow, kStateCount> rows{};
};

// `conversations` holds each conversation's composite scores in order.
inline StateDistribution state_distribution(std::span<const std::vector<double>> conversations) {
    StateDistribution d;
    std::array<double, kStateCount> sums{};
    double all = 0;
    for (std::size_t i = 0; i < kStateCount; ++i) d.rows[i].state = kAllStates[i];
    for (const auto& conv : conversations) {
        const auto states = assign_states(conv);
        for (std::size_t t = 0; t < conv.size(); ++t) {
            auto& row = d.rows[index_of(states[t])];
            ++row.count;
            sums[index_of(states[t])] += conv[t];
            all += conv[t];
            ++d.total;
        }
    }
    if (d.total == 0) throw InsufficientData("state distribution of an empty corpus");
    d.mean_quality = all / static_cast<double>(d.total);
    for (std::size_t i = 0; i < kStateCount; ++i) {
        auto& row = d.rows[i];
        row.percent = 100.0 * static_cast<double>(row.count) / static_cast<double>(d.total);
        if (row.count) row.mean_quality = sums[i] / static_cast<double>(row.count);
    }
    return d;
}

inline nlohmann::json to_json(const StateDistribution& d) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : d.rows) {
        rows.push_back({{"state", to_string(r.state)},
                        {"count", r.count},
                        {"percent", r.percent},
                        {"mean_quality", r.mean_quality ? nlohmann::json(*r.mean_quality) : nlohmann::json(nullptr)}});
    }
    return {{"total", d.total}, {"mean_quality", d.mean_quality}, {"states", rows}};
}

}  // namespace engage
