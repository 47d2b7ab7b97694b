#pragma once

// Labels historical bot questions with their primary action type. The keyword
// backend is deterministic; the remote backend asks a chat model for a
// structured label with confidence and reasoning.

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/error.hpp"
#include "engage/llm.hpp"
#include "engage/text.hpp"

namespace engage {

struct ActionLabel {
    ActionType primary = ActionType::topic_probe;
    std::vector<ActionType> secondary;  // metadata only; never used for learning
    double confidence = 1.0;
    std::string reasoning;
};

class ActionClassifier {
public:
    virtual ~ActionClassifier() = default;
    virtual ActionLabel classify(std::string_view question) const = 0;

    std::vector<ActionLabel> classify_all(const std::vector<std::string>& questions) const {
        std::vector<ActionLabel> out;
        out.reserve(questions.size());
        for (const auto& q : questions) out.push_back(classify(q));
        return out;
    }
};

// Priority-ordered cue rules; the first matching rule gives the primary label
// and later matches become secondary labels.
//   gratitude / acknowledgment   -> validation
//   "anything else"               -> continuation
//   "more about"                  -> elaboration
//   specific / instance / example -> specification
//   otherwise                     -> topic_probe
class KeywordActionClassifier final : public ActionClassifier {
public:
    ActionLabel classify(std::string_view question) const override {
        const std::string q = " " + normalise(question) + " ";
        std::vector<std::pair<ActionType, std::string>> hits;
        for (const auto& rule : rules()) {
            for (const auto& cue : rule.cues) {
                if (q.find(cue) != std::string::npos) {
                    hits.emplace_back(rule.action, cue);
                    break;
                }
            }
        }
        ActionLabel label;
        if (hits.empty()) {
            label.primary = ActionType::topic_probe;
            label.confidence = 0.5;
            label.reasoning = "no cue matched; default topic_probe";
            return label;
        }
        label.primary = hits.front().first;
        label.reasoning = "matched cue '" + text::trim(hits.front().second) + "'";
        for (std::size_t i = 1; i < hits.size(); ++i) label.secondary.push_back(hits[i].first);
        return label;
    }

private:
    struct Rule {
        ActionType action;
        std::vector<std::string> cues;
    };

    static const std::vector<Rule>& rules() {
        static const std::vector<Rule> r = {
            {ActionType::validation,
             {" thank you", " thanks", " appreciate", " that's valuable", " that is valuable",
              " your perspective is", " i hear you", " that makes sense", " sounds like"}},
            {ActionType::continuation, {" anything else", " what else", " anything more"}},
            {ActionType::elaboration,
             {" more about", " tell me more", " expand on", " elaborate", " say more", " go deeper"}},
            {ActionType::specification,
             {" specific", " instance", " example", " particular", " concrete"}},
        };
        return r;
    }

    // Lower-case with typographic apostrophes folded to ASCII.
    static std::string normalise(std::string_view s) {
        std::string out = text::to_lower_ascii(s);
        const std::string curly = "\xE2\x80\x99";
        for (auto pos = out.find(curly); pos != std::string::npos; pos = out.find(curly, pos))
            out.replace(pos, curly.size(), "'");
        return out;
    }
};

class RemoteActionClassifier final : public ActionClassifier {
public:
    explicit RemoteActionClassifier(std::shared_ptr<const llm::ChatClient> client) : client_(std::move(client)) {}

    static std::string system_prompt() {
        return "Classify the communicative function of a survey chatbot question. Categories: "
               "specification (requests concrete examples or particular cases), elaboration (asks to "
               "expand on the current topic), topic_probe (introduces a new aspect of campus life), "
               "validation (acknowledges the respondent without requesting information), continuation "
               "(open invitation to keep going). Reply with JSON: {\"primary\": <category>, "
               "\"secondary\": [<categories>], \"confidence\": <0..1>, \"reasoning\": <short text>}.";
    }

    ActionLabel classify(std::string_view question) const override {
        std::string reply;
        try {
            reply = client_->complete({{{"system", system_prompt()}, {"user", std::string(question)}}, 0.0, true});
        } catch (const BackendUnavailable& e) {
            throw ClassificationUnavailable(std::string("action classifier: ") + e.what());
        }
        auto obj = llm::extract_json_object(reply);
        if (!obj || !obj->contains("primary") || !(*obj)["primary"].is_string())
            throw ClassificationUnavailable("action classifier: reply lacks a primary label");
        auto primary = parse_action((*obj)["primary"].get<std::string>());
        if (!primary) throw ClassificationUnavailable("action classifier: unknown label in reply");
        ActionLabel label;
        label.primary = *primary;
        if (auto it = obj->find("secondary"); it != obj->end() && it->is_array())
            for (const auto& s : *it)
                if (s.is_string())
                    if (auto a = parse_action(s.get<std::string>()); a && *a != *primary) label.secondary.push_back(*a);
        if (auto it = obj->find("confidence"); it != obj->end() && it->is_number())
            label.confidence = std::clamp(it->get<double>(), 0.0, 1.0);
        if (auto it = obj->find("reasoning"); it != obj->end() && it->is_string()) label.reasoning = it->get<std::string>();
        return label;
    }

private:
    std::shared_ptr<const llm::ChatClient> client_;
};

}  // namespace engage
