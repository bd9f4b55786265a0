#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evince/config.hpp"
#include "evince/label_scale.hpp"
#include "evince/metrics.hpp"

// The debate state machine: contentiousness phases, per-round records, and
// the threshold-based convergence protocol.

namespace evince {

enum class Phase { exploration, integration, consensus };

const char* to_string(Phase phase);
Phase phase_from_string(const std::string& s);

/// Band containing a contentiousness level:
///   exploration  for delta >  0.7
///   integration  for 0.3 < delta <= 0.7
///   consensus    for delta <= 0.3
/// Throws ValidationError outside [0, 1].
Phase phase_of(double delta);

/// Next round's contentiousness. Scheduled mode divides by delta_decay;
/// metric-driven mode evaluates the weighted normalized divergence sum
///   alpha * KL/KL_max + beta * JS/JS_max + gamma * WD/WD_max.
/// Result clamped to [0, 1].
double next_contentiousness(double prev, const metrics::MetricSnapshot& snapshot,
                            const DebateConfig& cfg, std::size_t scale_size);

/// Applies one extra schedule step (divide by delta_decay) when BOTH agents'
/// arguments are too similar to their previous round (min similarity above
/// tau_sim); otherwise returns delta unchanged. Absent similarities never
/// trigger the override.
double novelty_override(std::optional<double> sim_a, std::optional<double> sim_b,
                        const DebateConfig& cfg, double delta);

/// Advisory check of the dual-entropy / separation initial condition. Never
/// blocks a debate; the engine records it on the transcript.
struct InitialConditionScore {
    double entropy_gap = 0.0;          // bits, |H(A) - H(B)|
    double wd = 0.0;                   // scale steps between openings
    bool dual_entropy_satisfied = false;
    std::string notes;

    bool operator==(const InitialConditionScore& other) const = default;
};

InitialConditionScore score_initial_conditions(const Distribution& a, const Distribution& b,
                                               const DebateConfig& cfg);

/// One debate round: both agents' distributions, arguments, raw outputs,
/// the metric snapshot, and the contentiousness in effect.
struct Round {
    int index = 0;  // 1-based, contiguous
    Distribution dist_a;
    Distribution dist_b;
    std::string argument_a;
    std::string argument_b;
    std::string raw_a;  // unparsed agent output, kept verbatim for audit
    std::string raw_b;
    metrics::MetricSnapshot snapshot;
    double delta = 0.0;
    Phase phase = Phase::exploration;
    std::optional<double> sim_a;   // vs this agent's previous-round argument
    std::optional<double> sim_b;
    std::optional<double> crit_a;  // argument-quality scores, when computed
    std::optional<double> crit_b;
    std::optional<std::string> note;

    bool operator==(const Round& other) const = default;
};

enum class VerdictKind { converged, human_review, max_rounds_exceeded };

const char* to_string(VerdictKind kind);
VerdictKind verdict_kind_from_string(const std::string& s);

struct Verdict {
    VerdictKind kind = VerdictKind::human_review;
    std::optional<Distribution> consensus;  // present iff converged
    std::string reason;

    bool operator==(const Verdict& other) const = default;
};

/// Evaluates the convergence protocol over a debate history. Returns
/// nullopt to continue, or the final verdict:
///  - Converged when the last k_consecutive rounds all satisfy the
///    quantitative thresholds (WD, JSD, optional MI/proxy gate, CE
///    stability, per-agent L2 stability, argument similarity) and the CRIT
///    gate passes (or is disabled). Consensus is the mean of the final
///    round's two distributions.
///  - HumanReview when CRIT scores fall below tau_crit at an otherwise
///    converged state, or when the round count reaches t_max.
/// Round 1 has no predecessor: its round-over-round conditions hold
/// vacuously. Pure function of (history, cfg); malformed histories (gaps,
/// scale changes) raise ProtocolError.
std::optional<Verdict> check_convergence(const std::vector<Round>& history,
                                         const DebateConfig& cfg);

/// Mean of the final round's distributions (the converged estimate).
Distribution consensus_distribution(const Round& final_round);

}  // namespace evince
