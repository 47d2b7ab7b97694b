// Runs one adaptive session against a scripted student and prints each turn
// with its LSDE score, engagement state and the EV update it caused.

#include <cstdio>
#include <cstdlib>
#include <memory>

#include "engage/config.hpp"
#include "engage/session.hpp"
#include "engage/simulant.hpp"

int main(int argc, char** argv) {
    using namespace engage;
    const AppConfig app;
    auto priors = std::make_shared<const EvTable>(load_priors(app.data_dir / "priors" / "historical.json"));

    SessionConfig cfg;
    cfg.policy.schedule = FixedEpsilon{0.30};
    cfg.policy.rng_seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
    Session session("demo", cfg, priors, make_scorer(app), make_generator(app));
    ScriptedRespondent student(default_profiles()[0], cfg.policy.rng_seed + 1);

    std::vector<Turn> history;
    while (!session.ended()) {
        const auto question = session.current_question();
        const auto answer = student.respond(question, session.current_action(), history);
        history.push_back({question, answer});
        session.submit(answer);
        const auto& r = session.records().back();
        std::printf("%2zu [%-13s %-7s] Q=%.3f %-14s %s\n     > %s\n", r.index, std::string(to_string(r.action)).c_str(),
                    std::string(to_string(r.mode)).c_str(), r.score.composite,
                    std::string(to_string(r.state)).c_str(), question.c_str(), answer.c_str());
        if (r.update)
            std::printf("     EV(%s, %s) %.3f -> %.3f\n", std::string(to_string(r.update->state)).c_str(),
                        std::string(to_string(r.update->action)).c_str(), r.update->ev_before, r.update->ev_after);
    }
    const auto& rec = session.records();
    std::printf("dQ = %+.3f over %zu exchanges\n", rec.back().score.composite - rec.front().score.composite, rec.size());
}
