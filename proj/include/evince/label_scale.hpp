#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evince {

/// An ordered categorical label space. Index 0 is the most negative label
/// toward the debate subject; ordinal spacing between adjacent labels is 1.
class LabelScale {
public:
    explicit LabelScale(std::vector<std::string> labels);

    std::size_t size() const { return labels_; }
    const std::vector<std::string>& labels() const { return names_; }
    const std::string& label(std::size_t i) const { return names_.at(i); }
    std::optional<std::size_t> index_of(std::string_view label) const;

    bool operator==(const LabelScale& other) const = default;

    /// The five-point news-bias scale used by the bundled fixtures.
    static LabelScale bias_five_point();

private:
    std::vector<std::string> names_;
    std::size_t labels_ = 0;
};

/// A probability vector over a LabelScale. Construction validates the
/// simplex constraint: entries >= 0 and sum within 1e-6 of 1 (renormalized),
/// anything further off is rejected.
class Distribution {
public:
    Distribution(LabelScale scale, std::vector<double> probs);

    const LabelScale& scale() const { return scale_; }
    const std::vector<double>& probs() const { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::size_t size() const { return probs_.size(); }

    bool operator==(const Distribution& other) const = default;

    static Distribution uniform(LabelScale scale);
    static Distribution point_mass(LabelScale scale, std::size_t index);

private:
    LabelScale scale_;
    std::vector<double> probs_;
};

/// Throws ScaleMismatchError unless both distributions share one scale.
void require_same_scale(const Distribution& p, const Distribution& q);

}  // namespace evince
