#include "evince/chat_client.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "evince/errors.hpp"

namespace evince {

using nlohmann::json;

namespace {

// Splits "http://host:port/some/path" into (scheme://host:port, /some/path).
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("endpoint URL needs a scheme: " + url);
    }
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

}  // namespace

ChatClient::ChatClient(const RemoteAgentConfig& cfg, std::string api_key)
    : api_key_(std::move(api_key)),
      model_(cfg.model),
      temperature_(cfg.temperature),
      timeout_seconds_(cfg.timeout_seconds) {
    std::tie(host_, path_) = split_endpoint(cfg.endpoint);
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages) const {
    json body;
    body["model"] = model_;
    body["temperature"] = temperature_;
    body["messages"] = json::array();
    for (const auto& m : messages) {
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    }

    httplib::Client client(host_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
        throw AgentError("chat endpoint unreachable: " + host_ + path_, 1, "");
    }
    if (res->status != 200) {
        throw AgentError("chat endpoint returned HTTP " + std::to_string(res->status), 1,
                         res->body);
    }

    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const json::exception& e) {
        throw AgentError(std::string("chat endpoint sent invalid JSON: ") + e.what(), 1,
                         res->body);
    }
    if (!reply.contains("choices") || !reply["choices"].is_array() || reply["choices"].empty()) {
        throw AgentError("chat completion has no choices", 1, res->body);
    }
    const auto& first = reply["choices"][0];
    if (!first.contains("message") || !first["message"].contains("content")) {
        throw AgentError("chat completion choice has no message content", 1, res->body);
    }
    return first["message"]["content"].get<std::string>();
}

}  // namespace evince
