#pragma once

// HTTP front end for live sessions.
//
//   POST /sessions                  -> 201 {session_id, opening_question, exchange_index: 0}
//   POST /sessions/{id}/responses   {text, terminate?}
//                                   -> 200 {exchange_index, done, question?}
//   GET  /sessions/{id}/log         admin bearer token -> JSON lines
//
// Errors use {"code", "message"}. The session id doubles as the respondent's
// token and is never accepted on the admin route. Responses to respondents
// carry no policy internals.

#include <array>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "engage/config.hpp"
#include "engage/error.hpp"
#include "engage/policy.hpp"
#include "engage/session.hpp"

namespace engage {

// 128 bits from the OS entropy source, hex encoded.
inline std::string new_session_token() {
    static std::mutex m;
    static std::random_device rd;
    std::lock_guard lock(m);
    std::string out;
    for (int i = 0; i < 4; ++i) {
        char buf[9];
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
        out += buf;
    }
    return out;
}

class SurveyService {
public:
    SurveyService(ServiceConfig config, std::shared_ptr<const EvTable> priors,
                  std::shared_ptr<const ResponseScorer> scorer, std::shared_ptr<const QuestionGenerator> generator)
        : config_(std::move(config)),
          priors_(std::move(priors)),
          scorer_(std::move(scorer)),
          generator_(std::move(generator)) {
        if (const char* t = std::getenv(config_.admin_token_env.c_str()); t && *t) admin_token_ = t;
        if (config_.log_dir) std::filesystem::create_directories(*config_.log_dir);
        routes();
    }

    ~SurveyService() { stop(); }

    // For tests and embedding; the real CLI reads it from the environment.
    void set_admin_token(std::string token) { admin_token_ = std::move(token); }

    // Binds to config host/port (port 0 picks a free one); returns the port.
    int bind() {
        if (config_.port == 0) return port_ = server_.bind_to_any_port(config_.host);
        if (!server_.bind_to_port(config_.host, config_.port)) throw Error("cannot bind " + config_.host);
        return port_ = config_.port;
    }

    // Blocks until stop().
    void listen() { server_.listen_after_bind(); }

    void start_background() {
        if (port_ < 0) bind();
        thread_ = std::thread([this] { listen(); });
        server_.wait_until_ready();
    }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const noexcept { return port_; }
    std::size_t session_count() const {
        std::shared_lock lock(store_mutex_);
        return store_.size();
    }

private:
    struct Entry {
        std::mutex busy;
        std::unique_ptr<Session> session;
    };

    static void error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
        res.status = status;
        res.set_content(nlohmann::json{{"code", code}, {"message", message}}.dump(), "application/json");
    }

    std::shared_ptr<Entry> find(const std::string& id) const {
        std::shared_lock lock(store_mutex_);
        auto it = store_.find(id);
        return it == store_.end() ? nullptr : it->second;
    }

    void routes() {
        server_.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            const auto origin = req.get_header_value("Origin");
            if (origin.empty()) return;
            for (const auto& allowed : config_.cors_origins) {
                if (allowed == "*" || allowed == origin) {
                    res.set_header("Access-Control-Allow-Origin", allowed == "*" ? "*" : origin);
                    res.set_header("Vary", "Origin");
                    break;
                }
            }
        });
        server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.status = 204;
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
        });

        server_.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) { create(res); });
        server_.Post(R"(/sessions/([^/]+)/responses)",
                     [this](const httplib::Request& req, httplib::Response& res) { respond(req, res); });
        server_.Get(R"(/sessions/([^/]+)/log)",
                    [this](const httplib::Request& req, httplib::Response& res) { fetch_log(req, res); });
    }

    void create(httplib::Response& res) {
        if (!priors_) return error(res, 503, "priors_unavailable", "no priors loaded; sessions cannot start");
        const auto id = new_session_token();
        SessionConfig sc = config_.session;
        {
            std::random_device rd;
            sc.policy.rng_seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        }
        Session::Sink sink;
        if (config_.log_dir) sink = file_sink(*config_.log_dir / (id + ".jsonl"));
        auto entry = std::make_shared<Entry>();
        try {
            entry->session = std::make_unique<Session>(id, sc, priors_, scorer_, generator_, sink);
        } catch (const std::exception& e) {
            return error(res, 500, "session_error", e.what());
        }
        const std::string question = entry->session->current_question();
        {
            std::unique_lock lock(store_mutex_);
            store_.emplace(id, entry);
        }
        res.status = 201;
        res.set_content(nlohmann::json{{"session_id", id}, {"opening_question", question}, {"exchange_index", 0}}.dump(),
                        "application/json");
    }

    void respond(const httplib::Request& req, httplib::Response& res) {
        auto entry = find(req.matches[1]);
        if (!entry) return error(res, 404, "unknown_session", "no such session");
        auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body.at("text").is_string())
            return error(res, 400, "bad_request", "body must be a JSON object with a string 'text'");
        const auto text = body.at("text").get<std::string>();
        const bool terminate = body.value("terminate", false);
        if (text::trim(text).empty()) return error(res, 400, "empty_response", "response text is empty");

        std::unique_lock lock(entry->busy, std::try_to_lock);
        if (!lock.owns_lock()) return error(res, 409, "concurrent_request", "a response is already being processed");
        if (entry->session->ended()) return error(res, 410, "session_ended", "this session has ended");
        try {
            const auto r = entry->session->submit(text, terminate);
            nlohmann::json out = {{"exchange_index", r.exchange_index}, {"done", r.done}};
            if (r.question) out["question"] = *r.question;
            res.set_content(out.dump(), "application/json");
        } catch (const SessionEnded& e) {
            error(res, 410, "session_ended", e.what());
        } catch (const std::exception& e) {
            error(res, 500, "internal_error", e.what());
        }
    }

    void fetch_log(const httplib::Request& req, httplib::Response& res) {
        const auto auth = req.get_header_value("Authorization");
        if (auth.empty()) return error(res, 401, "unauthorized", "admin bearer token required");
        const std::string prefix = "Bearer ";
        const auto token = auth.rfind(prefix, 0) == 0 ? auth.substr(prefix.size()) : std::string();
        if (admin_token_.empty() || token != admin_token_)
            return error(res, 403, "forbidden", "admin credential required for session logs");
        auto entry = find(req.matches[1]);
        if (!entry) return error(res, 404, "unknown_session", "no such session");
        std::lock_guard lock(entry->busy);
        res.set_content(serialize_log(entry->session->log()), "application/x-ndjson");
    }

    ServiceConfig config_;
    std::shared_ptr<const EvTable> priors_;
    std::shared_ptr<const ResponseScorer> scorer_;
    std::shared_ptr<const QuestionGenerator> generator_;
    std::string admin_token_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = -1;
    mutable std::shared_mutex store_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> store_;
};

}  // namespace engage
