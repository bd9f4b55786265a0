#pragma once

#include <optional>
#include <vector>

#include "evince/label_scale.hpp"

// Information-theoretic measures over discrete label distributions.
// All logarithms are base 2; results are in bits. Zero terms follow the
// convention 0 * log 0 == 0. Divergences that divide by the second argument
// (KL, cross-entropy) first apply an additive floor of 1e-10 to the
// denominator distribution and renormalize it.

namespace evince::metrics {

inline constexpr double kSmoothingFloor = 1e-10;

double entropy_bits(const Distribution& p);

/// KL(p || q), q smoothed. Non-negative; 0 iff p equals the smoothed q.
double kl_divergence(const Distribution& p, const Distribution& q);

/// Jensen-Shannon divergence with the exact midpoint M = (p+q)/2.
/// Symmetric, bounded to [0, 1] in base 2. No smoothing is needed: the
/// midpoint is positive wherever either argument is.
double js_divergence(const Distribution& p, const Distribution& q);

/// 1-D earth mover's distance on the ordinal scale (ground distance
/// |i - j|), via the closed-form sum of CDF differences. Unit: scale steps.
double wasserstein_ordinal(const Distribution& p, const Distribution& q);

/// H(p, q) = -sum p log2 q, q smoothed. Equals entropy(p) + KL(p||q).
double cross_entropy(const Distribution& p, const Distribution& q);

/// Symmetrized KL, (KL(p||q) + KL(q||p)) / 2. Stands in for mutual
/// information when no joint distribution is available.
double kl_proxy(const Distribution& p, const Distribution& q);

/// Largest KL value reachable under the smoothing floor on an n-label
/// scale: opposite point masses, log2((1 + n*eps) / eps).
double default_kl_max(std::size_t n);

/// A joint probability matrix (rows x cols), entries >= 0 summing to 1
/// within 1e-9. Marginals are derived by row/column sums.
class JointDistribution {
public:
    explicit JointDistribution(std::vector<std::vector<double>> cells);

    std::size_t rows() const { return cells_.size(); }
    std::size_t cols() const { return cells_.empty() ? 0 : cells_.front().size(); }
    double at(std::size_t i, std::size_t j) const { return cells_[i][j]; }
    std::vector<double> marginal_rows() const;
    std::vector<double> marginal_cols() const;

private:
    std::vector<std::vector<double>> cells_;
};

double mutual_information_bits(const JointDistribution& joint);

/// I(X;Y) / max(H(X), H(Y)), in [0, 1]. Defined as 0 when both marginals
/// are deterministic.
double normalized_mutual_information(const JointDistribution& joint);

/// Every divergence the debate protocol consumes, computed once per round
/// from the two agents' distributions. mutual_info/nmi stay absent unless a
/// joint distribution exists; kl_proxy is recorded instead.
struct MetricSnapshot {
    double entropy_a = 0.0;
    double entropy_b = 0.0;
    double kl_ab = 0.0;
    double kl_ba = 0.0;
    double jsd = 0.0;
    double wd = 0.0;
    double wd_normalized = 0.0;
    double cross_entropy_ab = 0.0;
    std::optional<double> mutual_info;
    std::optional<double> nmi;
    std::optional<double> kl_proxy;

    bool operator==(const MetricSnapshot& other) const = default;
};

MetricSnapshot make_snapshot(const Distribution& a, const Distribution& b);

}  // namespace evince::metrics
