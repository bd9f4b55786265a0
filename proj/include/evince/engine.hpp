#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evince/agents.hpp"
#include "evince/config.hpp"
#include "evince/protocol.hpp"

namespace evince {

/// Full audit record of one debate. The config snapshot plus the rounds are
/// sufficient to re-run check_convergence and reproduce the verdict.
struct TranscriptRecord {
    int schema_version = 1;
    std::string subject_digest;
    Stance stance_a;
    Stance stance_b;
    DebateConfig config;
    std::optional<InitialConditionScore> initial_conditions;
    std::vector<Round> rounds;
    Verdict verdict;
    std::string created_at;   // ISO-8601 UTC
    std::string finished_at;

    bool operator==(const TranscriptRecord& other) const = default;
};

struct EngineOptions {
    /// Similarity evaluator for live arguments; defaults to token Jaccard.
    SimilarityEvaluator* similarity = nullptr;
    /// Optional argument-quality scorer; when set, every round carries
    /// crit_a/crit_b scores.
    std::function<double(const std::string& argument)> crit_scorer;
};

/// FNV-1a 64-bit hex digest, used for subject digests and transcript ids.
std::string fnv1a_hex(std::string_view data);

/// Runs the debate loop: per round, render context for both agents, collect
/// replies, compute the metric snapshot and similarities, update the
/// contentiousness (schedule or metric-driven, then the novelty override),
/// and evaluate the convergence protocol. Stops with a verdict; an agent
/// failure after its bounded retries aborts into a HumanReview verdict with
/// the rounds gathered so far. Deterministic given deterministic agents.
TranscriptRecord run_debate(const std::string& subject, Agent& agent_a, Agent& agent_b,
                            const DebateConfig& cfg, const LabelScale& scale,
                            const Stance& stance_a, const Stance& stance_b,
                            const EngineOptions& opts = {});

/// Convenience wrapper: replays a recorded script through two scripted
/// agents under the given config.
TranscriptRecord replay_script(const DebateScript& script, const DebateConfig& cfg,
                               const EngineOptions& opts = {});

}  // namespace evince
