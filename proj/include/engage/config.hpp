#pragma once

// Application configuration shared by the CLI and the service, plus the
// factories that turn it into scorer / classifier / generator backends.
// Credentials never live here: the LLM key is read from the environment
// variable named by llm.api_key_env.
//
// {
//   "data_dir": "...",                      bundled lexicons and gazetteers
//   "llm": {"base_url", "path", "model", "api_key_env", "timeout_seconds"},
//   "specificity_backend": "stub" | "remote",
//   "generator_backend": "template" | "remote",
//   "generator_temperature": 0.7,
//   "service": {"host", "port", "priors", "log_dir", "cors_origins": [...],
//               "admin_token_env", "session": {SessionConfig}}
// }

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "engage/action_classifier.hpp"
#include "engage/error.hpp"
#include "engage/llm.hpp"
#include "engage/lsde.hpp"
#include "engage/question_gen.hpp"
#include "engage/sentiment.hpp"
#include "engage/session.hpp"
#include "engage/specificity.hpp"

#ifndef ENGAGE_DATA_DIR
#define ENGAGE_DATA_DIR "data"
#endif

namespace engage {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::filesystem::path> priors;  // unset: sessions get 503
    std::optional<std::filesystem::path> log_dir;
    std::vector<std::string> cors_origins;
    std::string admin_token_env = "ENGAGE_ADMIN_TOKEN";
    SessionConfig session;
};

struct AppConfig {
    std::filesystem::path data_dir = ENGAGE_DATA_DIR;
    llm::HttpClientConfig llm;
    std::string specificity_backend = "stub";
    std::string generator_backend = "template";
    double generator_temperature = 0.7;
    ServiceConfig service;
};

inline AppConfig app_config_from_json(const nlohmann::json& j) {
    AppConfig c;
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    if (j.contains("llm")) from_json(j.at("llm"), c.llm);
    c.specificity_backend = j.value("specificity_backend", c.specificity_backend);
    c.generator_backend = j.value("generator_backend", c.generator_backend);
    c.generator_temperature = j.value("generator_temperature", c.generator_temperature);
    if (c.specificity_backend != "stub" && c.specificity_backend != "remote")
        throw Error("specificity_backend must be stub or remote");
    if (c.generator_backend != "template" && c.generator_backend != "remote")
        throw Error("generator_backend must be template or remote");
    if (auto it = j.find("service"); it != j.end()) {
        auto& s = c.service;
        const auto& sj = *it;
        s.host = sj.value("host", s.host);
        s.port = sj.value("port", s.port);
        if (sj.contains("priors") && !sj.at("priors").is_null()) s.priors = sj.at("priors").get<std::string>();
        if (sj.contains("log_dir") && !sj.at("log_dir").is_null()) s.log_dir = sj.at("log_dir").get<std::string>();
        if (sj.contains("cors_origins")) s.cors_origins = sj.at("cors_origins").get<std::vector<std::string>>();
        s.admin_token_env = sj.value("admin_token_env", s.admin_token_env);
        if (sj.contains("session")) s.session = session_config_from_json(sj.at("session"));
    }
    return c;
}

inline AppConfig load_app_config(const std::optional<std::filesystem::path>& path) {
    if (!path) return {};
    std::ifstream in(*path, std::ios::binary);
    if (!in) throw Error("cannot open config: " + path->string());
    try {
        return app_config_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error("config " + path->string() + ": " + e.what());
    }
}

inline std::shared_ptr<const llm::ChatClient> make_chat_client(const AppConfig& c) {
    return std::make_shared<llm::HttpChatClient>(c.llm);
}

// The rule classifier always backs up the remote one.
inline std::shared_ptr<const ResponseScorer> make_scorer(const AppConfig& c) {
    auto sentiment = std::make_shared<const SentimentAnalyzer>(SentimentAnalyzer::from_directory(c.data_dir / "lexicon"));
    std::shared_ptr<const SpecificityClassifier> spec = std::make_shared<RuleSpecificityClassifier>(
        SpecificityGazetteers::from_directory(c.data_dir / "gazetteers"));
    if (c.specificity_backend == "remote")
        spec = std::make_shared<FallbackSpecificityClassifier>(
            std::make_shared<RemoteSpecificityClassifier>(make_chat_client(c)), spec);
    return std::make_shared<ResponseScorer>(std::move(sentiment), std::move(spec));
}

inline std::shared_ptr<const ActionClassifier> make_action_classifier(const AppConfig& c, const std::string& backend) {
    if (backend == "stub") return std::make_shared<KeywordActionClassifier>();
    if (backend == "remote") return std::make_shared<RemoteActionClassifier>(make_chat_client(c));
    throw Error("classify backend must be stub or remote");
}

inline std::shared_ptr<const QuestionGenerator> make_generator(const AppConfig& c) {
    if (c.generator_backend == "remote")
        return std::make_shared<LlmQuestionGenerator>(make_chat_client(c), c.generator_temperature);
    return std::make_shared<TemplateQuestionGenerator>();
}

}  // namespace engage
