#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "evince/metrics.hpp"

namespace evince {

enum class DeltaMode { scheduled, metric_driven };

const char* to_string(DeltaMode mode);
DeltaMode delta_mode_from_string(const std::string& s);

/// Every threshold, weight, normalizer, and schedule constant the debate
/// protocol consumes. Defaults reflect the bundled replay fixtures; all of
/// them are overridable through the JSON config file (see docs/formats.md).
struct DebateConfig {
    // Convergence thresholds.
    double tau_wd = 0.05;    // scale steps
    double tau_jsd = 0.01;   // bits
    double eps_ce = 0.05;    // bits, |CE(t) - CE(t-1)| stability bound
    double eps_p = 0.05;     // per-agent round-over-round L2 bound
    double tau_sim = 0.8;    // argument similarity, [0, 1]

    // Optional information gates. tau_mi applies only when a joint
    // distribution (and thus mutual information) is available; the proxy
    // bound applies to the symmetrized-KL stand-in otherwise. Neither has a
    // default value.
    std::optional<double> tau_mi;
    std::optional<double> kl_proxy_bound;

    // Argument-quality gate. Disabled by default: rounds without CRIT
    // scores can only converge while the gate is off.
    bool crit_gate = false;
    double tau_crit = 6.0;  // [1, 10]

    int k_consecutive = 2;
    int t_max = 10;

    // Contentiousness schedule.
    double delta_init = 0.9;
    double delta_decay = 2.08;  // > 1; division step per round
    DeltaMode delta_mode = DeltaMode::scheduled;

    // Metric-driven contentiousness weights and normalizers.
    double alpha = 1.0 / 3.0;
    double beta = 1.0 / 3.0;
    double gamma = 1.0 / 3.0;
    std::optional<double> kl_max;  // default: smoothed opposite point masses
    double js_max = 1.0;
    std::optional<double> wd_max;  // default: n - 1

    // Initial-condition scoring (advisory, never blocks).
    double entropy_gap_min = 0.5;     // bits
    double wd_separation_min = 0.5;   // scale steps

    /// Throws ValidationError when any invariant is broken.
    void validate() const;

    double effective_kl_max(std::size_t scale_size) const;
    double effective_wd_max(std::size_t scale_size) const;

    bool operator==(const DebateConfig& other) const = default;
};

/// Connection settings for the remote chat-completion agent. The API key is
/// read from the named environment variable at startup and never persisted.
struct RemoteAgentConfig {
    std::string endpoint;  // full URL, e.g. http://host:port/v1/chat/completions
    std::string model = "gpt-4";
    double temperature = 0.1;
    std::string api_key_env = "EVINCE_API_KEY";
    std::string prompt_template_path;  // empty -> built-in template
    int max_attempts = 3;
    int timeout_seconds = 60;

    bool operator==(const RemoteAgentConfig& other) const = default;
};

}  // namespace evince
