#include "evince/http_agent.hpp"

#include <algorithm>
#include <cctype>

#include "evince/errors.hpp"

namespace evince {

namespace {

// Everything after an "argument:" marker, or the whole reply when the model
// skipped the section header.
std::string extract_argument(const std::string& raw) {
    std::string lower(raw.size(), '\0');
    std::transform(raw.begin(), raw.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const auto pos = lower.find("argument:");
    if (pos == std::string::npos) return raw;
    std::string out = raw.substr(pos + std::string("argument:").size());
    const auto first = out.find_first_not_of(" \t\r\n");
    return first == std::string::npos ? std::string() : out.substr(first);
}

}  // namespace

HttpChatAgent::HttpChatAgent(std::string name, ChatClient client, PromptTemplate tmpl,
                             int max_attempts)
    : name_(std::move(name)),
      client_(std::move(client)),
      template_(std::move(tmpl)),
      max_attempts_(max_attempts) {
    if (max_attempts_ < 1) throw ValidationError("max_attempts must be >= 1");
}

AgentReply HttpChatAgent::propose(const AgentTurnContext& ctx) {
    const std::string prompt = render_prompt(ctx, template_);
    std::vector<ChatMessage> messages{
        {"system",
         "You are a careful debate agent. Follow the stance and output format exactly."},
        {"user", prompt}};

    std::string last_raw;
    std::string last_failure;
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
        last_raw = client_.complete(messages);
        try {
            Distribution dist = parse_distribution(last_raw, ctx.scale);
            return AgentReply{std::move(dist), extract_argument(last_raw), last_raw,
                              std::nullopt};
        } catch (const ParseError& e) {
            last_failure = e.what();
            messages.push_back({"assistant", last_raw});
            messages.push_back(
                {"user", std::string("Your previous reply could not be parsed: ") + e.what() +
                             ". Remember your assigned stance and answer again. " +
                             format_instructions(ctx.scale)});
        }
    }
    throw AgentError("agent '" + name_ + "' produced unparseable output after " +
                         std::to_string(max_attempts_) + " attempts: " + last_failure,
                     max_attempts_, last_raw);
}

RemoteJudgeSimilarity::RemoteJudgeSimilarity(ChatClient client) : client_(std::move(client)) {}

double RemoteJudgeSimilarity::similarity(const std::string& a, const std::string& b) {
    try {
        const std::string reply = client_.complete(
            {{"system",
              "You rate semantic similarity. Answer with a single number between 0 and 1."},
             {"user", "Text 1:\n" + a + "\n\nText 2:\n" + b +
                          "\n\nHow semantically similar are these texts? Reply with one "
                          "number in [0, 1] only."}});
        const std::size_t start = reply.find_first_of("0123456789.");
        if (start == std::string::npos) throw ParseError("no number in judge reply");
        const double score = std::stod(reply.substr(start));
        if (score < 0.0 || score > 1.0) throw ParseError("judge score out of [0, 1]");
        return score;
    } catch (const Error&) {
        fell_back_ = true;
        return jaccard_similarity(a, b);
    } catch (const std::exception&) {
        fell_back_ = true;
        return jaccard_similarity(a, b);
    }
}

bool RemoteJudgeSimilarity::consume_fallback_flag() {
    const bool value = fell_back_;
    fell_back_ = false;
    return value;
}

}  // namespace evince
