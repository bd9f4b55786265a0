#pragma once

#include <string>
#include <vector>

#include "evince/config.hpp"

namespace evince {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

/// Minimal chat-completion HTTP client: message list in, completion text
/// out. Speaks the common JSON contract (model/messages/temperature in,
/// choices[0].message.content out) so any compatible endpoint can be
/// configured. Stateless per call; one instance may serve concurrent
/// debates.
class ChatClient {
public:
    ChatClient(const RemoteAgentConfig& cfg, std::string api_key);

    std::string complete(const std::vector<ChatMessage>& messages) const;

    const std::string& model() const { return model_; }

private:
    std::string host_;  // scheme://host[:port]
    std::string path_;
    std::string api_key_;
    std::string model_;
    double temperature_;
    int timeout_seconds_;
};

}  // namespace evince
