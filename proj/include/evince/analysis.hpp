#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evince/label_scale.hpp"

// Bias-distance arithmetic over partisan-annotated articles: pairwise
// ordinal distances between the Democrat (D), Republican (R), and system
// (S) ratings, baseline-gap statistics, and report rendering.

namespace evince::analysis {

enum class RaterRole { democrat, republican, system, claude, gpt4 };

/// Single-letter dataset keys: D, R, S, c, g.
char role_key(RaterRole role);
RaterRole role_from_key(char key);

struct BiasDistanceTriple {
    int dr = 0;  // |D - R|
    int ds = 0;  // |D - S|
    int sr = 0;  // |S - R|

    bool operator==(const BiasDistanceTriple& other) const = default;
};

struct AnnotatedArticle {
    std::string id;
    std::string category;
    std::string source;
    std::map<RaterRole, std::string> ratings;  // role -> label on the scale
    std::optional<std::string> justification;
    // The distance triple as printed in the source table, when one was
    // published. Kept verbatim even where it disagrees with the ratings;
    // aggregate() reports such rows as mismatches.
    std::optional<BiasDistanceTriple> recorded_biases;
};

/// Negativity-toward-subject ordinal: most negative label -> n, most
/// positive -> 1. Unknown labels raise ValidationError.
int rating_ordinal(const std::string& label, const LabelScale& scale);

/// Derived triple from the article's D/R/S ratings. All three roles must be
/// present.
BiasDistanceTriple bias_distances(const AnnotatedArticle& article, const LabelScale& scale);

struct ArticleResult {
    std::string id;
    std::string category;
    BiasDistanceTriple triple;      // recorded when available, else derived
    BiasDistanceTriple derived;     // always the ratings-derived triple
    bool derived_mismatch = false;  // recorded present and != derived
};

struct AggregateReport {
    LabelScale scale = LabelScale::bias_five_point();
    std::vector<ArticleResult> rows;
    BiasDistanceTriple totals;
    // Mean |gpt4 - system| ordinal gap over articles carrying both roles.
    double gpt4_gap_mean = 0.0;
    int gpt4_gap_count = 0;
    int gpt4_gap_skipped = 0;
    // Per-role label histograms (counts indexed by scale position).
    std::map<RaterRole, std::vector<int>> histograms;
    std::vector<std::string> mismatched_ids;
};

/// Component-wise totals, the baseline gap, and per-role histograms.
/// Claude ratings are histogrammed but excluded from distance analysis.
AggregateReport aggregate(const std::vector<AnnotatedArticle>& dataset, const LabelScale& scale);

enum class ReportFormat { markdown, csv };

/// Deterministic, stable-ordered rendering. CSV data rows round-trip back
/// into the same totals.
std::string emit_report(const AggregateReport& report, ReportFormat format);

}  // namespace evince::analysis
