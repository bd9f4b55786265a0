#pragma once

#include <string>

#include "evince/agents.hpp"
#include "evince/chat_client.hpp"

namespace evince {

/// Debate agent backed by a remote chat-completion endpoint. Each turn
/// renders the stance- and contentiousness-conditioned prompt, requests a
/// completion, and parses the labeled distribution out of it. A parse
/// failure triggers a corrective re-prompt quoting the failure, up to
/// max_attempts; the final failure surfaces as AgentError with the attempt
/// count and the last raw output.
class HttpChatAgent : public Agent {
public:
    HttpChatAgent(std::string name, ChatClient client, PromptTemplate tmpl, int max_attempts = 3);

    AgentReply propose(const AgentTurnContext& ctx) override;
    std::string name() const override { return name_; }

private:
    std::string name_;
    ChatClient client_;
    PromptTemplate template_;
    int max_attempts_;
};

/// Similarity judged by a remote model, falling back to token Jaccard when
/// the judge fails (the fallback is flagged so the engine can note it on
/// the transcript).
class RemoteJudgeSimilarity : public SimilarityEvaluator {
public:
    explicit RemoteJudgeSimilarity(ChatClient client);

    double similarity(const std::string& a, const std::string& b) override;
    std::string name() const override { return "remote-judge"; }
    bool consume_fallback_flag() override;

private:
    ChatClient client_;
    bool fell_back_ = false;
};

}  // namespace evince
