#include <catch_amalgamated.hpp>

#include <cmath>

#include "engage/policy.hpp"
#include "engage/state.hpp"
#include "test_support.hpp"

using namespace engage;
using ES = EngagementState;
using AT = ActionType;

TEST_CASE("state assignment branches and boundaries", "[state]") {
    CHECK(assign_state(0.25, 0.10) == ES::low_improving);
    CHECK(assign_state(0.45, -0.30) == ES::medium);
    CHECK(assign_state(0.65, 0.00) == ES::high_stable);
    CHECK(assign_state(0.30, 0.10) == ES::medium);
    CHECK(assign_state(0.60, 0.10) == ES::high_improving);
    CHECK(assign_state(0.20, 0.05) == ES::low_stable);
    CHECK(assign_state(0.20, -0.50) == ES::low_stable);  // signed delta: a drop is not "improving"
    CHECK_THROWS_AS(assign_state(-0.01, 0.0), DomainError);
    CHECK_THROWS_AS(assign_state(1.01, 0.0), DomainError);
}

TEST_CASE("first exchange uses a zero delta", "[state]") {
    const std::vector<double> q = {0.1, 0.5, 0.7, 0.2};
    const auto s = assign_states(q);
    CHECK(s == std::vector<ES>{ES::low_stable, ES::medium, ES::high_improving, ES::low_stable});
    for (double q0 : {0.0, 0.29, 0.3, 0.59, 0.6, 1.0}) {
        const auto first = assign_states(std::vector<double>{q0}).front();
        CHECK((first == ES::low_stable || first == ES::medium || first == ES::high_stable));
    }
}

TEST_CASE("state distribution report", "[state]") {
    std::vector<std::vector<double>> corpus = {{0.1}, {0.1, 0.5}};
    const auto d = state_distribution(corpus);
    CHECK(d.total == 3);
    CHECK(d.rows[index_of(ES::low_stable)].count == 2);
    CHECK(d.rows[index_of(ES::medium)].count == 1);
    CHECK(*d.rows[index_of(ES::medium)].mean_quality == 0.5);
    CHECK_FALSE(d.rows[index_of(ES::high_stable)].mean_quality.has_value());
    CHECK_THROWS_AS(state_distribution(std::vector<std::vector<double>>{}), InsufficientData);
}

TEST_CASE("historical priors load exactly", "[policy][priors]") {
    const auto& t = *testing::historical_priors();
    CHECK(t.at(ES::low_stable, AT::topic_probe) == EvEntry{0.305, 20});
    CHECK(t.at(ES::medium, AT::validation) == EvEntry{0.0, 0});
    CHECK(t.at(ES::low_stable, AT::continuation) == EvEntry{0.476, 1});
    CHECK(t.at(ES::medium, AT::specification) == EvEntry{0.071, 66});
    std::uint64_t n = 0;
    for (auto s : kAllStates)
        for (auto a : kAllActions) n += t.at(s, a).n;
    CHECK(n == 371);
}

TEST_CASE("priors parsing errors and round trip", "[policy][priors]") {
    CHECK(parse_priors("") == EvTable{});
    CHECK(parse_priors("  \n ") == EvTable{});
    const auto partial = parse_priors(R"([{"state":"medium","action":"elaboration","ev":0.5,"n":3}])");
    CHECK(partial.at(ES::medium, AT::elaboration) == EvEntry{0.5, 3});
    CHECK(partial.at(ES::medium, AT::specification) == EvEntry{0.0, 0});

    try {
        parse_priors("[\n{\"state\":\"medium\",\"action\":\"validation\",\"ev\":0.1,\"n\":1},\n"
                     "{\"state\":\"medium\",\"action\":\"validation\",\"ev\":0.2,\"n\":1}\n]");
        FAIL("duplicate accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse_priors("[\n{\"state\":\"bored\",\"action\":\"validation\",\"ev\":0.1,\"n\":1}\n]");
        FAIL("unknown state accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_priors("[{\"state\":"), ParseError);

    const auto& t = *testing::historical_priors();
    CHECK(parse_priors(serialize_priors(t)) == t);
    CHECK(priors_hash(t) == priors_hash(parse_priors(serialize_priors(t))));
}

TEST_CASE("epsilon schedules", "[policy]") {
    const ExplorationSchedule decay = LinearDecayEpsilon{0.40, 0.05, 15.0};
    CHECK(epsilon_at(decay, 0) == 0.40);
    CHECK(epsilon_at(decay, 15) == 0.05);
    CHECK(epsilon_at(decay, 40) == 0.05);
    CHECK(epsilon_at(decay, 5) == Catch::Approx(0.40 - 0.35 * 5.0 / 15.0));
    const ExplorationSchedule fixed = FixedEpsilon{0.30};
    for (std::size_t t : {0, 1, 14, 100}) CHECK(epsilon_at(fixed, t) == 0.30);
    CHECK_THROWS_AS(validate(ExplorationSchedule{LinearDecayEpsilon{0.1, 0.2, 15}}), DomainError);
    CHECK_THROWS_AS(validate(ExplorationSchedule{FixedEpsilon{1.5}}), DomainError);
}

TEST_CASE("greedy selection and tie-break", "[policy]") {
    Rng rng(1);
    const auto& t = *testing::historical_priors();
    auto sel = select_action(t, ES::low_stable, 0.0, rng);
    CHECK(sel.action == AT::continuation);
    CHECK(sel.mode == SelectionMode::exploit);
    CHECK(select_action(EvTable{}, ES::medium, 0.0, rng).action == AT::specification);

    // Adding a constant to a state's row leaves the greedy choice alone.
    EvTable shifted = t;
    for (auto a : kAllActions) shifted.at(ES::medium, a).ev += 0.25;
    CHECK(shifted.argmax(ES::medium) == t.argmax(ES::medium));
}

TEST_CASE("uniform exploration at epsilon one", "[policy]") {
    Rng rng(99);
    std::array<int, kActionCount> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto s = select_action(*testing::historical_priors(), ES::medium, 1.0, rng);
        CHECK(s.mode == SelectionMode::explore);
        ++counts[index_of(s.action)];
    }
    for (int c : counts) CHECK(std::abs(c / double(n) - 0.2) <= 0.01);
}

TEST_CASE("td update arithmetic", "[policy]") {
    EvTable t = *testing::historical_priors();
    const auto e = td_update(t, ES::low_stable, AT::specification, 0.5, 0.3);
    CHECK(e.ev == Catch::Approx(0.3516).epsilon(1e-12));
    CHECK(e.n == 113);
    EvTable u;
    u.at(ES::medium, AT::validation).ev = 0.42;
    CHECK(td_update(u, ES::medium, AT::validation, 0.42, 0.3).ev == 0.42);
    CHECK_THROWS_AS(td_update(u, ES::medium, AT::validation, std::nan(""), 0.3), DomainError);
    CHECK_THROWS_AS(td_update(u, ES::medium, AT::validation, 0.1, 0.0), DomainError);
}

TEST_CASE("baseline sampling", "[policy][baseline]") {
    const auto dist = BaselineDistribution::historical();
    Rng rng(2024);
    std::array<int, kActionCount> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[index_of(baseline_select(dist, rng))];
    CHECK(std::abs(counts[0] / double(n) - 0.623) <= 0.005);
    CHECK(std::abs(counts[3] / double(n) - 0.009) <= 0.002);

    Rng r2(5);
    const auto only = BaselineDistribution::degenerate(AT::specification);
    for (int i = 0; i < 1000; ++i) CHECK(baseline_select(only, r2) == AT::specification);
    CHECK_THROWS_AS(BaselineDistribution({0.5, 0.5, 0.5, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(BaselineDistribution({1.5, -0.5, 0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("session learner snapshot and reset", "[policy]") {
    PolicyConfig cfg;
    cfg.rng_seed = 17;
    SessionLearner learner(testing::historical_priors(), cfg);
    const auto snap = learner.snapshot();
    learner.update(ES::low_stable, AT::specification, 0.9);
    CHECK(snap == *testing::historical_priors());
    CHECK_FALSE(learner.table() == *testing::historical_priors());
    std::vector<AT> first;
    for (int i = 0; i < 10; ++i) first.push_back(learner.select(ES::medium).action);
    learner.reset();
    CHECK(learner.table() == *testing::historical_priors());
    std::vector<AT> second;
    for (int i = 0; i < 10; ++i) second.push_back(learner.select(ES::medium).action);
    CHECK(first == second);
    CHECK(learner.table().all_finite());
}

TEST_CASE("policy config JSON round trip", "[policy]") {
    PolicyConfig c;
    c.schedule = LinearDecayEpsilon{0.4, 0.05, 15};
    c.alpha = 0.25;
    c.rng_seed = 123456789012345ull;
    CHECK(policy_config_from_json(to_json(c)) == c);
    CHECK_THROWS(policy_config_from_json(nlohmann::json{{"alpha", 0.0}}));
}
