#include "evince/label_scale.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "evince/errors.hpp"

namespace evince {

namespace {
constexpr double kSumSlack = 1e-6;
constexpr double kNegativeDust = 1e-12;
}  // namespace

LabelScale::LabelScale(std::vector<std::string> labels) : names_(std::move(labels)) {
    if (names_.size() < 2) {
        throw ValidationError("label scale needs at least 2 labels");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& name : names_) {
        if (name.empty()) {
            throw ValidationError("label scale contains an empty label");
        }
        if (!seen.insert(name).second) {
            throw ValidationError("duplicate label in scale: " + name);
        }
    }
    labels_ = names_.size();
}

std::optional<std::size_t> LabelScale::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == label) return i;
    }
    return std::nullopt;
}

LabelScale LabelScale::bias_five_point() {
    return LabelScale({"negative", "weak negative", "neutral", "weak positive", "positive"});
}

Distribution::Distribution(LabelScale scale, std::vector<double> probs)
    : scale_(std::move(scale)), probs_(std::move(probs)) {
    if (probs_.size() != scale_.size()) {
        throw ValidationError("probability vector length " + std::to_string(probs_.size()) +
                              " does not match scale size " + std::to_string(scale_.size()));
    }
    double sum = 0.0;
    for (double& v : probs_) {
        if (std::isnan(v) || v < -kNegativeDust) {
            throw ValidationError("negative probability entry");
        }
        if (v < 0.0) v = 0.0;  // float dust only
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumSlack) {
        throw ValidationError("probabilities sum to " + std::to_string(sum) +
                              ", outside the 1e-6 renormalization slack");
    }
    // Renormalization is skipped for float-residue deviations so that
    // construction is idempotent: persisted vectors reload bit-identically.
    if (std::abs(sum - 1.0) > 1e-12) {
        for (double& v : probs_) v /= sum;
    }
}

Distribution Distribution::uniform(LabelScale scale) {
    std::vector<double> p(scale.size(), 1.0 / static_cast<double>(scale.size()));
    return Distribution(std::move(scale), std::move(p));
}

Distribution Distribution::point_mass(LabelScale scale, std::size_t index) {
    if (index >= scale.size()) {
        throw ValidationError("point mass index out of range");
    }
    std::vector<double> p(scale.size(), 0.0);
    p[index] = 1.0;
    return Distribution(std::move(scale), std::move(p));
}

void require_same_scale(const Distribution& p, const Distribution& q) {
    if (p.scale() != q.scale()) {
        throw ScaleMismatchError("distributions are defined on different label scales");
    }
}

}  // namespace evince
