#pragma once

// Minimal client for an OpenAI-compatible chat-completion endpoint. Used by
// the remote specificity classifier, action classifier, question generator and
// simulated respondent. Every call opens its own connection, so one client may
// be shared across sessions and threads.

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "engage/error.hpp"

namespace engage::llm {

struct Message {
    std::string role;
    std::string content;
};

struct Request {
    std::vector<Message> messages;
    double temperature = 0.0;
    bool json_response = false;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    // Returns the assistant message text. Throws BackendUnavailable.
    virtual std::string complete(const Request& request) const = 0;
};

struct HttpClientConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_seconds = 30;
};

inline void from_json(const nlohmann::json& j, HttpClientConfig& c) {
    c.base_url = j.value("base_url", c.base_url);
    c.path = j.value("path", c.path);
    c.model = j.value("model", c.model);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
}

inline void to_json(nlohmann::json& j, const HttpClientConfig& c) {
    j = {{"base_url", c.base_url},
         {"path", c.path},
         {"model", c.model},
         {"api_key_env", c.api_key_env},
         {"timeout_seconds", c.timeout_seconds}};
}

class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(HttpClientConfig config) : config_(std::move(config)) {}

    std::string complete(const Request& request) const override {
        nlohmann::json body = {{"model", config_.model}, {"temperature", request.temperature}};
        auto& msgs = body["messages"] = nlohmann::json::array();
        for (const auto& m : request.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
        if (request.json_response) body["response_format"] = {{"type", "json_object"}};

        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        auto res = client.Post(config_.path, headers, body.dump(), "application/json");
        if (!res) throw BackendUnavailable("chat completion transport error: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw BackendUnavailable("chat completion HTTP " + std::to_string(res->status));
        try {
            auto parsed = nlohmann::json::parse(res->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendUnavailable(std::string("chat completion: malformed response: ") + e.what());
        }
    }

    const HttpClientConfig& config() const noexcept { return config_; }

private:
    HttpClientConfig config_;
};

// Extracts the first JSON object in `text`; models sometimes wrap JSON in prose
// or code fences.
inline std::optional<nlohmann::json> extract_json_object(const std::string& text) {
    const auto open = text.find('{');
    const auto close = text.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    auto parsed = nlohmann::json::parse(text.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
    return parsed;
}

}  // namespace engage::llm
