#include "evince/config.hpp"

#include "evince/errors.hpp"

namespace evince {

const char* to_string(DeltaMode mode) {
    return mode == DeltaMode::scheduled ? "scheduled" : "metric-driven";
}

DeltaMode delta_mode_from_string(const std::string& s) {
    if (s == "scheduled") return DeltaMode::scheduled;
    if (s == "metric-driven" || s == "metric_driven") return DeltaMode::metric_driven;
    throw ValidationError("unknown delta mode: " + s);
}

void DebateConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ValidationError(std::string("config: ") + what);
    };
    require(tau_wd >= 0.0, "tau_wd must be >= 0");
    require(tau_jsd >= 0.0, "tau_jsd must be >= 0");
    require(eps_ce >= 0.0, "eps_ce must be >= 0");
    require(eps_p >= 0.0, "eps_p must be >= 0");
    require(tau_sim >= 0.0 && tau_sim <= 1.0, "tau_sim must be in [0, 1]");
    require(!tau_mi || *tau_mi >= 0.0, "tau_mi must be >= 0");
    require(!kl_proxy_bound || *kl_proxy_bound >= 0.0, "kl_proxy_bound must be >= 0");
    require(tau_crit >= 1.0 && tau_crit <= 10.0, "tau_crit must be in [1, 10]");
    require(k_consecutive >= 1, "k_consecutive must be >= 1");
    require(t_max >= 1, "t_max must be >= 1");
    require(k_consecutive <= t_max, "k_consecutive must be <= t_max");
    require(delta_init >= 0.0 && delta_init <= 1.0, "delta_init must be in [0, 1]");
    require(delta_decay > 1.0, "delta_decay must be > 1");
    require(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0, "weights must be >= 0");
    if (delta_mode == DeltaMode::metric_driven) {
        require(alpha + beta + gamma > 0.0, "metric-driven mode needs alpha+beta+gamma > 0");
    }
    require(!kl_max || *kl_max > 0.0, "kl_max must be > 0");
    require(js_max > 0.0, "js_max must be > 0");
    require(!wd_max || *wd_max > 0.0, "wd_max must be > 0");
    require(entropy_gap_min >= 0.0, "entropy_gap_min must be >= 0");
    require(wd_separation_min >= 0.0, "wd_separation_min must be >= 0");
}

double DebateConfig::effective_kl_max(std::size_t scale_size) const {
    return kl_max.value_or(metrics::default_kl_max(scale_size));
}

double DebateConfig::effective_wd_max(std::size_t scale_size) const {
    return wd_max.value_or(static_cast<double>(scale_size - 1));
}

}  // namespace evince
