#pragma once

// One survey conversation. Each submitted response is scored, rewards the
// previous (state, action) with the quality change, gets a state, and the
// policy picks the action for the next question. The working EV table lives
// and dies with the session; only the log persists.
//
// Log format (JSON lines): a header
//   {"type":"header","session_id","config","priors_hash","seed"}
// then one {"type":"exchange", ...} record per answered question.

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action.hpp"
#include "engage/error.hpp"
#include "engage/lsde.hpp"
#include "engage/policy.hpp"
#include "engage/question_gen.hpp"
#include "engage/state.hpp"

namespace engage {

enum class PolicyKind { adaptive, baseline };

inline std::string_view to_string(PolicyKind k) noexcept { return k == PolicyKind::adaptive ? "adaptive" : "baseline"; }

struct SessionConfig {
    PolicyKind kind = PolicyKind::adaptive;
    PolicyConfig policy;  // schedule, alpha and the session seed
    std::array<double, kActionCount> baseline_weights = BaselineDistribution::historical().weights();
    std::size_t max_exchanges = 15;
    ActionType opening_action = ActionType::topic_probe;
    std::size_t history_window = 3;

    void validate() const {
        policy.validate();
        BaselineDistribution check(baseline_weights);
        if (max_exchanges == 0) throw DomainError("max_exchanges must be at least 1");
    }
};

inline nlohmann::json to_json(const SessionConfig& c) {
    nlohmann::json w = nlohmann::json::object();
    for (auto a : kAllActions) w[std::string(to_string(a))] = c.baseline_weights[index_of(a)];
    return {{"kind", to_string(c.kind)},
            {"policy", to_json(c.policy)},
            {"baseline_weights", w},
            {"max_exchanges", c.max_exchanges},
            {"opening_action", to_string(c.opening_action)},
            {"history_window", c.history_window}};
}

inline SessionConfig session_config_from_json(const nlohmann::json& j) {
    SessionConfig c;
    if (auto it = j.find("kind"); it != j.end()) {
        const auto k = it->get<std::string>();
        if (k == "adaptive") c.kind = PolicyKind::adaptive;
        else if (k == "baseline") c.kind = PolicyKind::baseline;
        else throw Error("unknown policy kind '" + k + "'");
    }
    if (j.contains("policy")) c.policy = policy_config_from_json(j.at("policy"));
    if (auto it = j.find("baseline_weights"); it != j.end()) {
        for (const auto& [key, value] : it->items()) {
            auto a = parse_action(key);
            if (!a) throw Error("baseline_weights: unknown action '" + key + "'");
            c.baseline_weights[index_of(*a)] = value.get<double>();
        }
    }
    c.max_exchanges = j.value("max_exchanges", c.max_exchanges);
    if (auto it = j.find("opening_action"); it != j.end()) {
        auto a = parse_action(it->get<std::string>());
        if (!a) throw Error("unknown opening_action '" + it->get<std::string>() + "'");
        c.opening_action = *a;
    }
    c.history_window = j.value("history_window", c.history_window);
    c.validate();
    return c;
}

struct EvUpdate {
    EngagementState state;
    ActionType action;
    double reward;
    double ev_before;
    double ev_after;
    std::uint64_t n_after;

    friend bool operator==(const EvUpdate&, const EvUpdate&) = default;
};

struct ExchangeRecord {
    std::size_t index = 0;  // 1-based
    std::string question;
    ActionType action = ActionType::topic_probe;
    SelectionMode mode = SelectionMode::opening;
    std::optional<double> epsilon;  // adaptive selections only
    bool generator_fallback = false;
    std::string response;
    QualityScore score;
    double delta = 0.0;
    EngagementState state = EngagementState::low_stable;
    std::optional<EvUpdate> update;  // absent iff index == 1

    friend bool operator==(const ExchangeRecord&, const ExchangeRecord&) = default;
};

// ---------------------------------------------------------------------------
// JSON for records

inline nlohmann::json to_json(const LsdeComponents& c) {
    return {{"word_count", c.word_count},
            {"pronoun_count", c.pronoun_count},
            {"sentiment_compound", c.sentiment_compound},
            {"entities", c.specificity.entities},
            {"temporal", c.specificity.temporal},
            {"spatial", c.specificity.spatial},
            {"l", c.l_norm},
            {"d", c.d_norm},
            {"e", c.e_norm},
            {"s", c.s_norm}};
}

inline LsdeComponents components_from_json(const nlohmann::json& j) {
    LsdeComponents c;
    c.word_count = j.at("word_count").get<std::size_t>();
    c.pronoun_count = j.at("pronoun_count").get<std::size_t>();
    c.sentiment_compound = j.at("sentiment_compound").get<double>();
    c.specificity.entities = j.at("entities").get<bool>();
    c.specificity.temporal = j.at("temporal").get<bool>();
    c.specificity.spatial = j.at("spatial").get<bool>();
    c.l_norm = j.at("l").get<double>();
    c.d_norm = j.at("d").get<double>();
    c.e_norm = j.at("e").get<double>();
    c.s_norm = j.at("s").get<double>();
    return c;
}

inline nlohmann::json to_json(const ExchangeRecord& r) {
    nlohmann::json j = {{"type", "exchange"},
                        {"index", r.index},
                        {"question", r.question},
                        {"action", to_string(r.action)},
                        {"selection_mode", to_string(r.mode)},
                        {"epsilon", r.epsilon ? nlohmann::json(*r.epsilon) : nlohmann::json(nullptr)},
                        {"generator_fallback", r.generator_fallback},
                        {"response", r.response},
                        {"quality", r.score.composite},
                        {"components", to_json(r.score.components)},
                        {"delta", r.delta},
                        {"state", to_string(r.state)}};
    if (r.update) {
        j["reward_applied_to"] = {{"state", to_string(r.update->state)},
                                  {"action", to_string(r.update->action)},
                                  {"reward", r.update->reward},
                                  {"ev_before", r.update->ev_before},
                                  {"ev_after", r.update->ev_after},
                                  {"n_after", r.update->n_after}};
    } else {
        j["reward_applied_to"] = nullptr;
    }
    return j;
}

inline ExchangeRecord record_from_json(const nlohmann::json& j) {
    auto need_state = [](const nlohmann::json& v) {
        auto s = parse_state(v.get<std::string>());
        if (!s) throw Error("unknown state '" + v.get<std::string>() + "'");
        return *s;
    };
    auto need_action = [](const nlohmann::json& v) {
        auto a = parse_action(v.get<std::string>());
        if (!a) throw Error("unknown action '" + v.get<std::string>() + "'");
        return *a;
    };
    ExchangeRecord r;
    r.index = j.at("index").get<std::size_t>();
    r.question = j.at("question").get<std::string>();
    r.action = need_action(j.at("action"));
    auto mode = parse_selection_mode(j.at("selection_mode").get<std::string>());
    if (!mode) throw Error("unknown selection mode");
    r.mode = *mode;
    if (!j.at("epsilon").is_null()) r.epsilon = j.at("epsilon").get<double>();
    r.generator_fallback = j.at("generator_fallback").get<bool>();
    r.response = j.at("response").get<std::string>();
    r.score.composite = j.at("quality").get<double>();
    r.score.components = components_from_json(j.at("components"));
    r.delta = j.at("delta").get<double>();
    r.state = need_state(j.at("state"));
    if (const auto& u = j.at("reward_applied_to"); !u.is_null())
        r.update = EvUpdate{need_state(u.at("state")),        need_action(u.at("action")),
                            u.at("reward").get<double>(),      u.at("ev_before").get<double>(),
                            u.at("ev_after").get<double>(),    u.at("n_after").get<std::uint64_t>()};
    return r;
}

struct SessionHeader {
    std::string session_id;
    SessionConfig config;
    std::string priors_hash;
    std::uint64_t seed = 0;

    friend bool operator==(const SessionHeader& a, const SessionHeader& b) {
        return a.session_id == b.session_id && to_json(a.config) == to_json(b.config) &&
               a.priors_hash == b.priors_hash && a.seed == b.seed;
    }
};

inline nlohmann::json to_json(const SessionHeader& h) {
    return {{"type", "header"},
            {"session_id", h.session_id},
            {"config", to_json(h.config)},
            {"priors_hash", h.priors_hash},
            {"seed", h.seed}};
}

struct SessionLog {
    SessionHeader header;
    std::vector<ExchangeRecord> records;

    friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

inline std::string serialize_log(const SessionLog& log) {
    std::string out = to_json(log.header).dump() + "\n";
    for (const auto& r : log.records) out += to_json(r).dump() + "\n";
    return out;
}

// Record numbers in errors are 1-based exchange indices; 0 is the header.
inline SessionLog parse_session_log(std::istream& in) {
    SessionLog log;
    std::string line;
    std::size_t record = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ParseError("session log: record " + std::to_string(record) + " is truncated or malformed", record);
        try {
            if (!have_header) {
                if (j.value("type", "") != "header") throw Error("missing header");
                log.header.session_id = j.at("session_id").get<std::string>();
                log.header.config = session_config_from_json(j.at("config"));
                log.header.priors_hash = j.at("priors_hash").get<std::string>();
                log.header.seed = j.at("seed").get<std::uint64_t>();
                have_header = true;
            } else {
                auto r = record_from_json(j);
                if (r.index != record) throw Error("index " + std::to_string(r.index) + " out of sequence");
                log.records.push_back(std::move(r));
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError("session log: record " + std::to_string(record) + ": " + e.what(), record);
        }
        ++record;
    }
    if (!have_header) throw ParseError("session log: empty", 0);
    return log;
}

inline SessionLog load_session_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open session log: " + path.string());
    return parse_session_log(in);
}

// ---------------------------------------------------------------------------

struct SubmitResult {
    std::size_t exchange_index = 0;
    bool done = false;
    std::optional<std::string> question;  // next question unless done
};

class Session {
public:
    using Sink = std::function<void(const std::string& line)>;

    Session(std::string id, SessionConfig config, std::shared_ptr<const EvTable> priors,
            std::shared_ptr<const ResponseScorer> scorer, std::shared_ptr<const QuestionGenerator> generator,
            Sink sink = {})
        : id_(std::move(id)),
          config_(config),
          priors_(std::move(priors)),
          scorer_(std::move(scorer)),
          generator_(std::move(generator)),
          sink_(std::move(sink)),
          baseline_(config.baseline_weights) {
        if (!priors_) throw Error("priors unavailable");
        config_.validate();
        learner_.emplace(priors_, config_.policy);
        if (sink_) sink_(to_json(header()).dump());
        pending_ = {config_.opening_action, SelectionMode::opening, std::nullopt};
        ask(config_.opening_action);
    }

    const std::string& id() const noexcept { return id_; }
    const SessionConfig& config() const noexcept { return config_; }
    bool ended() const noexcept { return ended_; }
    const std::string& current_question() const noexcept { return pending_question_; }
    ActionType current_action() const noexcept { return pending_.action; }
    const std::vector<ExchangeRecord>& records() const noexcept { return records_; }
    const EvTable& table() const { return learner_->table(); }

    SessionHeader header() const { return {id_, config_, priors_hash(*priors_), config_.policy.rng_seed}; }
    SessionLog log() const { return {header(), records_}; }

    SubmitResult submit(const std::string& response, bool terminate = false) {
        if (ended_) throw SessionEnded("session " + id_ + " has ended");
        if (!scorer_) throw Error("session has no scorer");
        return submit_scored(response, scorer_->score(response), terminate);
    }

    // Same as submit() with an externally supplied score (used by replay).
    SubmitResult submit_scored(const std::string& response, const QualityScore& score, bool terminate = false) {
        if (ended_) throw SessionEnded("session " + id_ + " has ended");
        ExchangeRecord r;
        r.index = records_.size() + 1;
        r.question = pending_question_;
        r.action = pending_.action;
        r.mode = pending_.mode;
        r.epsilon = pending_.epsilon;
        r.generator_fallback = pending_fallback_;
        r.response = response;
        r.score = score;
        if (r.index > 1) {
            const auto& prev = records_.back();
            r.delta = score.composite - prev.score.composite;
            const double before = learner_->table().ev(prev.state, r.action);
            const auto after = learner_->update(prev.state, r.action, r.delta);
            r.update = EvUpdate{prev.state, r.action, r.delta, before, after.ev, after.n};
        }
        r.state = assign_state(score.composite, r.delta);
        records_.push_back(r);
        if (sink_) sink_(to_json(r).dump());

        SubmitResult out;
        out.exchange_index = r.index;
        if (terminate || records_.size() >= config_.max_exchanges) {
            ended_ = true;
            out.done = true;
            return out;
        }
        select_next(r.state);
        ask(pending_.action);
        out.question = pending_question_;
        return out;
    }

    void end() noexcept { ended_ = true; }

private:
    struct Pending {
        ActionType action;
        SelectionMode mode;
        std::optional<double> epsilon;
    };

    void select_next(EngagementState state) {
        if (config_.kind == PolicyKind::baseline) {
            // Own stream, seeded like the learner, so one seed drives either policy.
            pending_ = {baseline_select(baseline_, baseline_rng()), SelectionMode::baseline, std::nullopt};
            return;
        }
        const double eps = epsilon_at(config_.policy.schedule, learner_->selections());
        const auto sel = learner_->select(state);
        pending_ = {sel.action, sel.mode, eps};
    }

    Rng& baseline_rng() { return baseline_rng_ ? *baseline_rng_ : baseline_rng_.emplace(config_.policy.rng_seed); }

    void ask(ActionType action) {
        std::vector<Turn> history;
        const std::size_t start =
            records_.size() > config_.history_window ? records_.size() - config_.history_window : 0;
        for (std::size_t i = start; i < records_.size(); ++i)
            history.push_back({records_[i].question, records_[i].response});
        pending_fallback_ = false;
        if (generator_) {
            try {
                pending_question_ = generator_->generate(action, history);
                return;
            } catch (const std::exception&) {
                pending_fallback_ = true;
            }
        }
        pending_question_ = fallback_.generate(action, history);
    }

    std::string id_;
    SessionConfig config_;
    std::shared_ptr<const EvTable> priors_;
    std::shared_ptr<const ResponseScorer> scorer_;
    std::shared_ptr<const QuestionGenerator> generator_;
    TemplateQuestionGenerator fallback_;
    Sink sink_;
    BaselineDistribution baseline_;
    std::optional<SessionLearner> learner_;
    std::optional<Rng> baseline_rng_;
    std::vector<ExchangeRecord> records_;
    Pending pending_{};
    std::string pending_question_;
    bool pending_fallback_ = false;
    bool ended_ = false;
};

// Appends each log line to a file as it is produced.
inline Session::Sink file_sink(const std::filesystem::path& path) {
    auto out = std::make_shared<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*out) throw Error("cannot write session log: " + path.string());
    return [out](const std::string& line) {
        *out << line << '\n';
        out->flush();
    };
}

// ---------------------------------------------------------------------------
// Replay

struct ReplayResult {
    bool identical = false;
    std::size_t records_checked = 0;
    std::optional<std::size_t> first_mismatch;  // 1-based exchange index
    std::vector<ExchangeRecord> replayed;
};

// Re-runs the policy over the logged responses with the logged seed. With a
// scorer the responses are re-scored; otherwise the logged scores are reused.
// Compares actions, selection modes, states and every EV update.
inline ReplayResult replay_session(const SessionLog& log, std::shared_ptr<const EvTable> priors,
                                   std::shared_ptr<const ResponseScorer> scorer = nullptr) {
    if (priors_hash(*priors) != log.header.priors_hash)
        throw Error("replay: priors do not match the log's priors_hash");
    Session s(log.header.session_id, log.header.config, std::move(priors), scorer,
              std::make_shared<TemplateQuestionGenerator>());
    ReplayResult out;
    out.identical = true;
    for (const auto& rec : log.records) {
        if (s.ended()) {
            out.identical = false;
            out.first_mismatch = rec.index;
            break;
        }
        const auto score = scorer ? scorer->score(rec.response) : rec.score;
        const bool last = &rec == &log.records.back();
        // An early end in the original log was a termination request.
        const bool terminate = last && log.records.size() < log.header.config.max_exchanges;
        s.submit_scored(rec.response, score, terminate);
        const auto& mine = s.records().back();
        ++out.records_checked;
        const bool same = mine.action == rec.action && mine.mode == rec.mode && mine.state == rec.state &&
                          mine.update == rec.update && mine.score.composite == rec.score.composite;
        if (!same && out.identical) {
            out.identical = false;
            out.first_mismatch = rec.index;
        }
    }
    out.replayed = s.records();
    return out;
}

}  // namespace engage
