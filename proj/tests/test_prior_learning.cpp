#include <catch_amalgamated.hpp>

#include <sstream>

#include "engage/action_classifier.hpp"
#include "engage/prior_learning.hpp"
#include "engage/rng.hpp"
#include "engage/synthetic.hpp"
#include "test_support.hpp"

using namespace engage;
using ES = EngagementState;
using AT = ActionType;

namespace {

IngestResult ingest_string(const std::string& s) {
    std::istringstream in(s);
    return ingest_corpus(in);
}

// Direct two-pass filtering, independent of compute_ev's accumulator layout.
EvTable brute_force_ev(const std::vector<ExchangePair>& pairs) {
    EvTable t;
    for (auto s : kAllStates) {
        for (auto a : kAllActions) {
            std::vector<double> cell;
            for (const auto& p : pairs)
                if (p.state_before == s && p.action == a) cell.push_back(p.delta_q);
            std::vector<double> positive;
            for (double d : cell)
                if (d > 0.0) positive.push_back(d);
            double sum = 0.0;
            for (double d : positive) sum += d;
            t.at(s, a).n = cell.size();
            if (!positive.empty())
                t.at(s, a).ev = (double(positive.size()) / double(cell.size())) * (sum / double(positive.size()));
        }
    }
    return t;
}

}  // namespace

TEST_CASE("ingest drops placeholder rows and counts them", "[priors][ingest]") {
    const auto r = ingest_string(
        R"({"conversation_id":"c1","exchanges":[{"bot_question":"How was class?","action":"topic_probe","user_response":"Fine overall."},)"
        R"({"bot_question":"Could you share more about that?","action":"elaboration","user_response":"N/A"}]})"
        "\n");
    REQUIRE(r.conversations.size() == 1);
    CHECK(r.conversations[0].exchanges.size() == 1);
    CHECK(r.exclusions.placeholder == 1);
    CHECK(r.exclusions.exchanges_dropped() == 1);
}

TEST_CASE("ingest rules apply in order", "[priors][ingest]") {
    const std::string corpus =
        R"({"conversation_id":"a","exchanges":[)"
        R"({"bot_question":"Q1","action":"topic_probe","user_response":"first answer"},)"
        R"({"bot_question":"Q1","action":"topic_probe","user_response":"first answer"},)"
        R"({"bot_question":"Q2","action":"topic_probe","user_response":null},)"
        R"({"bot_question":"Q3","action":"topic_probe","user_response":"nan"},)"
        R"({"bot_question":"Q4","action":"topic_probe","user_response":"..."}]})"
        "\n"
        R"({"conversation_id":"a","exchanges":[{"bot_question":"Q","action":"validation","user_response":"x"}]})"
        "\n"
        R"({"conversation_id":"b","exchanges":[{"bot_question":"Q","action":"validation","user_response":"--"}]})"
        "\n\n";
    const auto r = ingest_string(corpus);
    CHECK(r.conversations.size() == 1);
    CHECK(r.responses() == 1);
    CHECK(r.exclusions.duplicate == 1);
    CHECK(r.exclusions.missing == 1);
    CHECK(r.exclusions.placeholder == 2);
    CHECK(r.exclusions.zero_words == 1);
    CHECK(r.exclusions.duplicate_conversation == 1);
    CHECK(r.exclusions.empty_conversation == 1);
}

TEST_CASE("ingest errors carry line and label", "[priors][ingest]") {
    try {
        ingest_string("\n{\"exchanges\":[{\"bot_question\":\"q\",\"action\":\"flattery\",\"user_response\":\"r\"}]}\n");
        FAIL("unknown label accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("flattery") != std::string::npos);
    }
    CHECK_THROWS_AS(ingest_string("{not json\n"), ParseError);
    CHECK_THROWS_AS(ingest_corpus(std::filesystem::path("/nonexistent/corpus.jsonl")), Error);
}

TEST_CASE("synthetic corpus: planted junk equals the exclusion report", "[priors][synthetic]") {
    SyntheticCorpusSpec spec;
    spec.duplicate_rate = spec.placeholder_rate = spec.missing_rate = spec.zero_word_rate = 0.1;
    const auto corpus = generate_synthetic_corpus(spec);
    CHECK(corpus.planted.duplicate > 0);

    std::ostringstream raw;
    write_corpus(raw, corpus.raw);
    const auto ingested = ingest_string(raw.str());
    CHECK(ingested.exclusions == corpus.planted);
    CHECK(ingested.conversations == corpus.clean);

    std::ostringstream clean;
    write_corpus(clean, ingested.conversations);
    const auto again = ingest_string(clean.str());
    CHECK(again.conversations == ingested.conversations);
    CHECK(again.exclusions == ExclusionReport{});
}

TEST_CASE("synthetic corpus shape and pair count", "[priors][synthetic]") {
    const auto corpus = generate_synthetic_corpus({});
    CHECK(corpus.clean.size() == 96);
    std::size_t responses = 0;
    std::vector<std::size_t> lengths;
    std::array<std::size_t, kActionCount> actions{};
    for (const auto& c : corpus.clean) {
        responses += c.exchanges.size();
        lengths.push_back(c.exchanges.size());
        for (const auto& e : c.exchanges) ++actions[index_of(*e.action)];
    }
    CHECK(responses == 467);
    CHECK(actions == std::array<std::size_t, kActionCount>{291, 110, 60, 4, 2});
    std::sort(lengths.begin(), lengths.end());
    CHECK((lengths[47] + lengths[48]) / 2.0 == 2.5);
    CHECK(lengths.back() <= 15);

    const auto pairs = build_pairs(corpus.clean, *testing::shared_scorer());
    CHECK(pairs.size() == 371);
}

TEST_CASE("pair construction", "[priors]") {
    const auto& scorer = *testing::shared_scorer();
    CorpusConversation one{"one", {{"q", AT::topic_probe, {}, "A single answer."}}};
    CHECK(build_pairs(std::vector{one}, scorer).empty());

    CorpusConversation three{"three",
                             {{"q1", AT::topic_probe, {}, "table"},
                              {"q2", AT::elaboration, {}, "I loved my classes with Professor Lee last semester."},
                              {"q3", AT::validation, {}, "table table"}}};
    const auto pairs = build_pairs(std::vector{three}, scorer);
    REQUIRE(pairs.size() == 2);
    const double q1 = scorer.score("table").composite;
    const double q2 = scorer.score(three.exchanges[1].user_response).composite;
    CHECK(pairs[0] == ExchangePair{assign_state(q1, 0.0), AT::elaboration, q2 - q1});
    CHECK(pairs[1].action == AT::validation);
    CHECK(pairs[1].state_before == assign_state(q2, q2 - q1));

    three.exchanges[2].action.reset();
    CHECK_THROWS_AS(build_pairs(std::vector{three}, scorer), Error);
}

TEST_CASE("worked EV example", "[priors][ev]") {
    std::vector<ExchangePair> pairs;
    for (int i = 0; i < 16; ++i) pairs.push_back({ES::low_stable, AT::topic_probe, 0.3815});
    for (int i = 0; i < 4; ++i) pairs.push_back({ES::low_stable, AT::topic_probe, i == 0 ? 0.0 : -0.1});
    const auto t = compute_ev(pairs);
    const auto e = t.at(ES::low_stable, AT::topic_probe);
    CHECK(e.n == 20);
    CHECK(e.ev == Catch::Approx(0.80 * 0.3815).epsilon(1e-14));
    CHECK(std::round(e.ev * 1000.0) / 1000.0 == 0.305);
    CHECK(t.at(ES::medium, AT::validation) == EvEntry{0.0, 0});

    std::vector<ExchangePair> none = {{ES::medium, AT::specification, -0.2}, {ES::medium, AT::specification, 0.0}};
    CHECK(compute_ev(none).at(ES::medium, AT::specification) == EvEntry{0.0, 2});
}

TEST_CASE("compute_ev equals brute force on random pair sets", "[priors][ev]") {
    Rng rng(20241015);
    for (int set = 0; set < 1000; ++set) {
        std::vector<ExchangePair> pairs(rng.uniform_index(200));
        double max_gain = 0.0;
        for (auto& p : pairs) {
            p.state_before = kAllStates[rng.uniform_index(kStateCount)];
            p.action = kAllActions[rng.uniform_index(kActionCount)];
            p.delta_q = rng.uniform01() * 2.0 - 1.0;
            if (rng.bernoulli(0.05)) p.delta_q = 0.0;
            max_gain = std::max(max_gain, p.delta_q);
        }
        const auto t = compute_ev(pairs);
        REQUIRE(t == brute_force_ev(pairs));
        for (auto s : kAllStates)
            for (auto a : kAllActions) REQUIRE((t.ev(s, a) >= 0.0 && t.ev(s, a) <= max_gain));
    }
}

TEST_CASE("keyword action classifier", "[priors][classifier]") {
    KeywordActionClassifier c;
    CHECK(c.classify("Thank you for sharing that.").primary == AT::validation);
    CHECK(c.classify("Could you share more about the challenges you've faced in Greek life?").primary ==
          AT::elaboration);
    CHECK(c.classify("Is there anything else you'd like to share?").primary == AT::continuation);
    CHECK(c.classify("Can you give a specific example?").primary == AT::specification);
    CHECK(c.classify("How do you feel about dining halls?").primary == AT::topic_probe);
    const auto both = c.classify("Thanks! Could you tell me more about a specific time?");
    CHECK(both.primary == AT::validation);
    CHECK(both.secondary == std::vector<AT>{AT::elaboration, AT::specification});
}

TEST_CASE("build_priors end to end labels missing actions", "[priors]") {
    testing::TempDir dir("priors");
    auto corpus = generate_synthetic_corpus({}).clean;
    std::size_t stripped = 0;
    for (auto& conv : corpus)
        for (auto& e : conv.exchanges)
            if (e.action == AT::validation) e.action.reset(), ++stripped;
    write_corpus(dir.path() / "c.jsonl", corpus);
    PriorsBuildReport report;
    const auto t = build_priors(dir.path() / "c.jsonl", *testing::shared_scorer(), KeywordActionClassifier{}, &report);
    CHECK(report.pairs == 371);
    CHECK(report.labelled_by_classifier == stripped);
    std::uint64_t n = 0;
    for (auto s : kAllStates)
        for (auto a : kAllActions) n += t.at(s, a).n;
    CHECK(n == 371);
    CHECK(to_json(report).at("exclusions").at("placeholder") == 0);
}
