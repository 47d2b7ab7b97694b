#pragma once

// Simulated survey respondents.
//
// Scripted model: the respondent carries a latent engagement e in [0, 1].
// Each question of action a moves it by effect = responsiveness[a] - 1,
// less `repeat_specification_penalty` when a specification follows a
// specification. Gains saturate (e += effect * (1 - e)); losses are
// multiplicative (e *= 1 + effect). Optional Gaussian noise, then clamp.
// The response is composed from e:
//   words    = max(1, round(e * verbosity))
//   pronouns = round(e * disclosure * 3)
//   emotion  = round(e * emotionality * 3)      (level 0..3)
//   entity, temporal, spatial ~ Bernoulli(e * specificity) each
// Every response consumes the same number of draws, so two conditions sharing
// a simulant seed see common random numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/compose.hpp"
#include "engage/error.hpp"
#include "engage/llm.hpp"
#include "engage/question_gen.hpp"
#include "engage/rng.hpp"

namespace engage {

struct SimulatedProfile {
    std::string name;
    std::string persona;
    double initial_engagement = 0.5;            // [0, 1]
    double verbosity = 30.0;                    // words at full engagement, [1, 200]
    double disclosure = 0.5;                    // [0, 1]
    double emotionality = 0.5;                  // [0, 1]
    double specificity = 0.5;                   // [0, 1]
    double negative_affect = 0.0;               // probability an emotional reply is negative, [0, 1]
    std::array<double, kActionCount> responsiveness{1.0, 1.0, 1.0, 1.0, 1.0};  // [0, 2], enum order
    double repeat_specification_penalty = 0.0;  // [0, 1]
    double noise_sd = 0.0;                      // [0, 0.5]

    double responsiveness_to(ActionType a) const noexcept { return responsiveness[index_of(a)]; }

    void validate() const {
        auto in = [](double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; };
        bool ok = in(initial_engagement, 0, 1) && in(verbosity, 1, 200) && in(disclosure, 0, 1) &&
                  in(emotionality, 0, 1) && in(specificity, 0, 1) && in(negative_affect, 0, 1) &&
                  in(repeat_specification_penalty, 0, 1) && in(noise_sd, 0, 0.5);
        for (double r : responsiveness) ok = ok && in(r, 0, 2);
        if (!ok) throw DomainError("profile '" + name + "': parameter outside its documented range");
    }
};

inline nlohmann::json to_json(const SimulatedProfile& p) {
    nlohmann::json resp = nlohmann::json::object();
    for (auto a : kAllActions) resp[std::string(to_string(a))] = p.responsiveness_to(a);
    return {{"name", p.name},
            {"persona", p.persona},
            {"initial_engagement", p.initial_engagement},
            {"verbosity", p.verbosity},
            {"disclosure", p.disclosure},
            {"emotionality", p.emotionality},
            {"specificity", p.specificity},
            {"negative_affect", p.negative_affect},
            {"responsiveness", resp},
            {"repeat_specification_penalty", p.repeat_specification_penalty},
            {"noise_sd", p.noise_sd}};
}

inline SimulatedProfile profile_from_json(const nlohmann::json& j) {
    SimulatedProfile p;
    p.name = j.at("name").get<std::string>();
    p.persona = j.value("persona", "");
    p.initial_engagement = j.value("initial_engagement", p.initial_engagement);
    p.verbosity = j.value("verbosity", p.verbosity);
    p.disclosure = j.value("disclosure", p.disclosure);
    p.emotionality = j.value("emotionality", p.emotionality);
    p.specificity = j.value("specificity", p.specificity);
    p.negative_affect = j.value("negative_affect", p.negative_affect);
    if (auto it = j.find("responsiveness"); it != j.end()) {
        for (const auto& [key, value] : it->items()) {
            auto a = parse_action(key);
            if (!a) throw Error("profile '" + p.name + "': unknown action '" + key + "'");
            p.responsiveness[index_of(*a)] = value.get<double>();
        }
    }
    p.repeat_specification_penalty = j.value("repeat_specification_penalty", p.repeat_specification_penalty);
    p.noise_sd = j.value("noise_sd", p.noise_sd);
    p.validate();
    return p;
}

// The four student personas used by the default experiment. All of them
// respond well to acknowledgement and tire of being pressed for examples.
inline std::vector<SimulatedProfile> default_profiles() {
    auto make = [](std::string name, std::string persona, double e0, double verbosity, double disclosure,
                   double emotionality, double specificity, double negative,
                   std::array<double, kActionCount> resp, double repeat, double noise) {
        SimulatedProfile p;
        p.name = std::move(name);
        p.persona = std::move(persona);
        p.initial_engagement = e0;
        p.verbosity = verbosity;
        p.disclosure = disclosure;
        p.emotionality = emotionality;
        p.specificity = specificity;
        p.negative_affect = negative;
        p.responsiveness = resp;
        p.repeat_specification_penalty = repeat;
        p.noise_sd = noise;
        return p;
    };
    //                       spec  elab  probe valid cont
    return {
        make("biology_senior", "Biology senior, pre-med, busy with research and applications.", 0.45, 34, 0.6, 0.5,
             0.7, 0.2, {0.92, 1.06, 1.00, 1.25, 1.08}, 0.10, 0.03),
        make("psychology_junior", "Psychology junior, reflective and open about feelings.", 0.50, 40, 0.9, 0.8, 0.5,
             0.3, {0.90, 1.08, 1.02, 1.30, 1.10}, 0.12, 0.03),
        make("cs_sophomore", "Computer science sophomore, terse and matter-of-fact.", 0.35, 22, 0.4, 0.3, 0.6, 0.2,
             {0.93, 1.04, 1.03, 1.20, 1.05}, 0.08, 0.03),
        make("english_senior", "English senior, articulate and expressive.", 0.55, 45, 0.7, 0.9, 0.6, 0.4,
             {0.91, 1.07, 1.01, 1.28, 1.09}, 0.10, 0.03),
    };
}

class Respondent {
public:
    virtual ~Respondent() = default;
    // `history` holds completed turns, oldest first. Throws BackendUnavailable.
    virtual std::string respond(const std::string& question, ActionType action, std::span<const Turn> history) = 0;
};

class ScriptedRespondent final : public Respondent {
public:
    ScriptedRespondent(SimulatedProfile profile, std::uint64_t seed)
        : profile_(std::move(profile)), rng_(seed), engagement_(profile_.initial_engagement) {
        profile_.validate();
    }

    std::string respond(const std::string&, ActionType action, std::span<const Turn>) override {
        return compose_response(advance(action), rng_);
    }

    // Applies the action's effect and draws the next response features.
    ResponseFeatures advance(ActionType action) {
        double effect = profile_.responsiveness_to(action) - 1.0;
        if (action == ActionType::specification && last_action_ == ActionType::specification)
            effect -= profile_.repeat_specification_penalty;
        effect = std::max(effect, -1.0);
        if (effect >= 0.0)
            engagement_ += effect * (1.0 - engagement_);
        else
            engagement_ *= 1.0 + effect;
        const double noise = rng_.normal(0.0, 1.0) * profile_.noise_sd;
        engagement_ = std::clamp(engagement_ + noise, 0.0, 1.0);
        last_action_ = action;

        const double e = engagement_;
        ResponseFeatures f;
        f.words = static_cast<std::size_t>(std::max(1.0, std::round(e * profile_.verbosity)));
        f.pronouns = static_cast<std::size_t>(std::round(e * profile_.disclosure * 3.0));
        f.emotion = static_cast<int>(std::round(e * profile_.emotionality * 3.0));
        const double p_spec = e * profile_.specificity;
        f.entity = rng_.bernoulli(p_spec);
        f.temporal = rng_.bernoulli(p_spec);
        f.spatial = rng_.bernoulli(p_spec);
        f.negative = rng_.bernoulli(profile_.negative_affect);
        return f;
    }

    double engagement() const noexcept { return engagement_; }
    const SimulatedProfile& profile() const noexcept { return profile_; }

private:
    SimulatedProfile profile_;
    Rng rng_;
    double engagement_;
    std::optional<ActionType> last_action_;
};

// Role-plays the persona through a chat model at temperature 0.8.
class LlmRespondent final : public Respondent {
public:
    LlmRespondent(std::shared_ptr<const llm::ChatClient> client, SimulatedProfile profile, double temperature = 0.8)
        : client_(std::move(client)), profile_(std::move(profile)), temperature_(temperature) {}

    std::string respond(const std::string& question, ActionType, std::span<const Turn> history) override {
        llm::Request req;
        req.temperature = temperature_;
        req.messages.push_back({"system", "You are a university student taking a campus-climate survey. " +
                                              profile_.persona +
                                              " Answer naturally in your own voice, in one short paragraph."});
        for (const auto& t : history) {
            req.messages.push_back({"user", t.question});
            req.messages.push_back({"assistant", t.response});
        }
        req.messages.push_back({"user", question});
        auto reply = text::trim(client_->complete(req));
        if (reply.empty()) throw BackendUnavailable("simulated respondent returned empty text");
        return reply;
    }

private:
    std::shared_ptr<const llm::ChatClient> client_;
    SimulatedProfile profile_;
    double temperature_;
};

}  // namespace engage
