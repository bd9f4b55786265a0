#include "evince/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "evince/errors.hpp"

namespace evince::metrics {

namespace {

std::vector<double> smoothed(const std::vector<double>& q) {
    const double n = static_cast<double>(q.size());
    const double norm = 1.0 + n * kSmoothingFloor;
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        out[i] = (q[i] + kSmoothingFloor) / norm;
    }
    return out;
}

double kl_terms(const std::vector<double>& p, const std::vector<double>& q) {
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) sum += p[i] * std::log2(p[i] / q[i]);
    }
    // True KL is non-negative; only float residue can dip below zero.
    return std::max(0.0, sum);
}

}  // namespace

double entropy_bits(const Distribution& p) {
    double h = 0.0;
    for (double v : p.probs()) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return std::max(0.0, h);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
    require_same_scale(p, q);
    return kl_terms(p.probs(), smoothed(q.probs()));
}

double js_divergence(const Distribution& p, const Distribution& q) {
    require_same_scale(p, q);
    std::vector<double> mid(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        mid[i] = 0.5 * (p[i] + q[i]);
    }
    return 0.5 * kl_terms(p.probs(), mid) + 0.5 * kl_terms(q.probs(), mid);
}

double wasserstein_ordinal(const Distribution& p, const Distribution& q) {
    require_same_scale(p, q);
    double cdf_gap = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cdf_gap += p[i] - q[i];
        total += std::abs(cdf_gap);
    }
    return total;
}

double cross_entropy(const Distribution& p, const Distribution& q) {
    require_same_scale(p, q);
    const auto qs = smoothed(q.probs());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) sum -= p[i] * std::log2(qs[i]);
    }
    return sum;
}

double kl_proxy(const Distribution& p, const Distribution& q) {
    return 0.5 * (kl_divergence(p, q) + kl_divergence(q, p));
}

double default_kl_max(std::size_t n) {
    const double eps = kSmoothingFloor;
    return std::log2((1.0 + static_cast<double>(n) * eps) / eps);
}

JointDistribution::JointDistribution(std::vector<std::vector<double>> cells)
    : cells_(std::move(cells)) {
    if (cells_.empty() || cells_.front().empty()) {
        throw ValidationError("joint distribution must be non-empty");
    }
    const std::size_t width = cells_.front().size();
    double sum = 0.0;
    for (const auto& row : cells_) {
        if (row.size() != width) {
            throw ValidationError("joint distribution rows have unequal length");
        }
        for (double v : row) {
            if (std::isnan(v) || v < 0.0) {
                throw ValidationError("joint distribution entries must be >= 0");
            }
            sum += v;
        }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("joint distribution sums to " + std::to_string(sum) +
                              ", outside the 1e-9 tolerance");
    }
}

std::vector<double> JointDistribution::marginal_rows() const {
    std::vector<double> m(rows(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < cols(); ++j) m[i] += cells_[i][j];
    }
    return m;
}

std::vector<double> JointDistribution::marginal_cols() const {
    std::vector<double> m(cols(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t j = 0; j < cols(); ++j) m[j] += cells_[i][j];
    }
    return m;
}

namespace {
double entropy_of(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}
}  // namespace

double mutual_information_bits(const JointDistribution& joint) {
    const auto px = joint.marginal_rows();
    const auto py = joint.marginal_cols();
    double info = 0.0;
    for (std::size_t i = 0; i < joint.rows(); ++i) {
        for (std::size_t j = 0; j < joint.cols(); ++j) {
            const double pxy = joint.at(i, j);
            if (pxy > 0.0) info += pxy * std::log2(pxy / (px[i] * py[j]));
        }
    }
    return std::max(0.0, info);
}

double normalized_mutual_information(const JointDistribution& joint) {
    const double hx = entropy_of(joint.marginal_rows());
    const double hy = entropy_of(joint.marginal_cols());
    const double hmax = std::max(hx, hy);
    if (hmax <= 0.0) return 0.0;
    return std::clamp(mutual_information_bits(joint) / hmax, 0.0, 1.0);
}

MetricSnapshot make_snapshot(const Distribution& a, const Distribution& b) {
    require_same_scale(a, b);
    MetricSnapshot s;
    s.entropy_a = entropy_bits(a);
    s.entropy_b = entropy_bits(b);
    s.kl_ab = kl_divergence(a, b);
    s.kl_ba = kl_divergence(b, a);
    s.jsd = js_divergence(a, b);
    s.wd = wasserstein_ordinal(a, b);
    s.wd_normalized = s.wd / static_cast<double>(a.size() - 1);
    s.cross_entropy_ab = cross_entropy(a, b);
    s.kl_proxy = 0.5 * (s.kl_ab + s.kl_ba);
    return s;
}

}  // namespace evince::metrics
