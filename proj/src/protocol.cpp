#include "evince/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evince/errors.hpp"

namespace evince {

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::exploration: return "exploration";
        case Phase::integration: return "integration";
        case Phase::consensus: return "consensus";
    }
    return "?";
}

Phase phase_from_string(const std::string& s) {
    if (s == "exploration") return Phase::exploration;
    if (s == "integration") return Phase::integration;
    if (s == "consensus") return Phase::consensus;
    throw ValidationError("unknown phase: " + s);
}

Phase phase_of(double delta) {
    if (std::isnan(delta) || delta < 0.0 || delta > 1.0) {
        throw ValidationError("contentiousness must be in [0, 1]");
    }
    if (delta > 0.7) return Phase::exploration;
    if (delta > 0.3) return Phase::integration;
    return Phase::consensus;
}

double next_contentiousness(double prev, const metrics::MetricSnapshot& snapshot,
                            const DebateConfig& cfg, std::size_t scale_size) {
    if (prev < 0.0 || prev > 1.0) {
        throw ValidationError("contentiousness must be in [0, 1]");
    }
    double next;
    if (cfg.delta_mode == DeltaMode::scheduled) {
        next = prev / cfg.delta_decay;
    } else {
        next = cfg.alpha * snapshot.kl_ab / cfg.effective_kl_max(scale_size) +
               cfg.beta * snapshot.jsd / cfg.js_max +
               cfg.gamma * snapshot.wd / cfg.effective_wd_max(scale_size);
    }
    return std::clamp(next, 0.0, 1.0);
}

double novelty_override(std::optional<double> sim_a, std::optional<double> sim_b,
                        const DebateConfig& cfg, double delta) {
    if (!sim_a || !sim_b) return delta;
    if (std::min(*sim_a, *sim_b) > cfg.tau_sim) {
        return std::clamp(delta / cfg.delta_decay, 0.0, 1.0);
    }
    return delta;
}

InitialConditionScore score_initial_conditions(const Distribution& a, const Distribution& b,
                                               const DebateConfig& cfg) {
    require_same_scale(a, b);
    InitialConditionScore score;
    score.entropy_gap = std::abs(metrics::entropy_bits(a) - metrics::entropy_bits(b));
    score.wd = metrics::wasserstein_ordinal(a, b);
    score.dual_entropy_satisfied =
        score.entropy_gap >= cfg.entropy_gap_min && score.wd >= cfg.wd_separation_min;
    std::ostringstream notes;
    notes << "entropy gap " << score.entropy_gap << " bits (min " << cfg.entropy_gap_min
          << "), separation " << score.wd << " steps (min " << cfg.wd_separation_min << "): "
          << (score.dual_entropy_satisfied ? "dual-entropy condition holds"
                                           : "dual-entropy condition not met (advisory only)");
    score.notes = notes.str();
    return score;
}

const char* to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::converged: return "converged";
        case VerdictKind::human_review: return "human_review";
        case VerdictKind::max_rounds_exceeded: return "max_rounds_exceeded";
    }
    return "?";
}

VerdictKind verdict_kind_from_string(const std::string& s) {
    if (s == "converged") return VerdictKind::converged;
    if (s == "human_review") return VerdictKind::human_review;
    if (s == "max_rounds_exceeded") return VerdictKind::max_rounds_exceeded;
    throw ValidationError("unknown verdict kind: " + s);
}

namespace {

double l2_change(const Distribution& now, const Distribution& before) {
    double sum = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
        const double d = now[i] - before[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void validate_history(const std::vector<Round>& history) {
    if (history.empty()) {
        throw ProtocolError("debate history is empty");
    }
    const auto& scale = history.front().dist_a.scale();
    for (std::size_t i = 0; i < history.size(); ++i) {
        const Round& r = history[i];
        if (r.index != static_cast<int>(i) + 1) {
            throw ProtocolError("round indices must run contiguously from 1; found index " +
                                std::to_string(r.index) + " at position " + std::to_string(i + 1));
        }
        if (r.dist_a.scale() != scale || r.dist_b.scale() != scale) {
            throw ProtocolError("label scale changed mid-debate at round " +
                                std::to_string(r.index));
        }
    }
}

// The quantitative conjunction for one round, CRIT excluded. Round-over-
// round conditions hold vacuously when no predecessor exists.
bool quantitative_pass(const std::vector<Round>& history, std::size_t pos,
                       const DebateConfig& cfg) {
    const Round& r = history[pos];
    if (!(r.snapshot.wd < cfg.tau_wd)) return false;
    if (!(r.snapshot.jsd < cfg.tau_jsd)) return false;

    if (r.snapshot.mutual_info) {
        if (cfg.tau_mi && !(*r.snapshot.mutual_info > *cfg.tau_mi)) return false;
    } else if (cfg.kl_proxy_bound) {
        if (!r.snapshot.kl_proxy || !(*r.snapshot.kl_proxy < *cfg.kl_proxy_bound)) return false;
    }

    if (pos == 0) return true;
    const Round& prev = history[pos - 1];
    if (!(std::abs(r.snapshot.cross_entropy_ab - prev.snapshot.cross_entropy_ab) < cfg.eps_ce)) {
        return false;
    }
    if (!(l2_change(r.dist_a, prev.dist_a) < cfg.eps_p)) return false;
    if (!(l2_change(r.dist_b, prev.dist_b) < cfg.eps_p)) return false;
    if (!r.sim_a || !(*r.sim_a > cfg.tau_sim)) return false;
    if (!r.sim_b || !(*r.sim_b > cfg.tau_sim)) return false;
    return true;
}

bool crit_pass(const Round& r, const DebateConfig& cfg) {
    return r.crit_a && r.crit_b && *r.crit_a >= cfg.tau_crit && *r.crit_b >= cfg.tau_crit;
}

}  // namespace

Distribution consensus_distribution(const Round& final_round) {
    std::vector<double> mean(final_round.dist_a.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i] = 0.5 * (final_round.dist_a[i] + final_round.dist_b[i]);
    }
    return Distribution(final_round.dist_a.scale(), std::move(mean));
}

std::optional<Verdict> check_convergence(const std::vector<Round>& history,
                                         const DebateConfig& cfg) {
    cfg.validate();
    validate_history(history);

    const int t = static_cast<int>(history.size());
    bool window_quantitative = t >= cfg.k_consecutive;
    for (int i = 0; window_quantitative && i < cfg.k_consecutive; ++i) {
        window_quantitative = quantitative_pass(history, history.size() - 1 - i, cfg);
    }

    if (window_quantitative) {
        bool window_crit = true;
        if (cfg.crit_gate) {
            for (int i = 0; window_crit && i < cfg.k_consecutive; ++i) {
                window_crit = crit_pass(history[history.size() - 1 - i], cfg);
            }
        }
        if (window_crit) {
            Verdict v;
            v.kind = VerdictKind::converged;
            v.consensus = consensus_distribution(history.back());
            v.reason = "all metrics within thresholds for " +
                       std::to_string(cfg.k_consecutive) + " consecutive rounds";
            return v;
        }
        Verdict v;
        v.kind = VerdictKind::human_review;
        v.reason = "metrics converged but argument quality is below tau_crit=" +
                   std::to_string(cfg.tau_crit) + "; flagged for human review";
        return v;
    }

    if (t >= cfg.t_max) {
        Verdict v;
        v.kind = VerdictKind::human_review;
        v.reason = "no convergence within t_max=" + std::to_string(cfg.t_max) +
                   " rounds; deferred to human review";
        return v;
    }
    return std::nullopt;
}

}  // namespace evince
