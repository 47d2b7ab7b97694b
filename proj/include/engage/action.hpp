#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace engage {

// Question strategies, in the fixed order used for argmax tie-breaking.
enum class ActionType { specification, elaboration, topic_probe, validation, continuation };

inline constexpr std::size_t kActionCount = 5;
inline constexpr std::array<ActionType, kActionCount> kAllActions = {
    ActionType::specification, ActionType::elaboration, ActionType::topic_probe, ActionType::validation,
    ActionType::continuation};

inline constexpr std::size_t index_of(ActionType a) noexcept { return static_cast<std::size_t>(a); }

inline constexpr std::string_view to_string(ActionType a) noexcept {
    switch (a) {
        case ActionType::specification: return "specification";
        case ActionType::elaboration: return "elaboration";
        case ActionType::topic_probe: return "topic_probe";
        case ActionType::validation: return "validation";
        case ActionType::continuation: return "continuation";
    }
    return "?";
}

// Accepts the canonical names plus "topic probe" as written in labelled corpora.
inline std::optional<ActionType> parse_action(std::string_view name) noexcept {
    for (auto a : kAllActions)
        if (to_string(a) == name) return a;
    if (name == "topic probe" || name == "topic-probe") return ActionType::topic_probe;
    return std::nullopt;
}

}  // namespace engage
