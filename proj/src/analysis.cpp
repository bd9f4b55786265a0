#include "evince/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "evince/errors.hpp"

namespace evince::analysis {

char role_key(RaterRole role) {
    switch (role) {
        case RaterRole::democrat: return 'D';
        case RaterRole::republican: return 'R';
        case RaterRole::system: return 'S';
        case RaterRole::claude: return 'c';
        case RaterRole::gpt4: return 'g';
    }
    return '?';
}

RaterRole role_from_key(char key) {
    switch (key) {
        case 'D': return RaterRole::democrat;
        case 'R': return RaterRole::republican;
        case 'S': return RaterRole::system;
        case 'c': return RaterRole::claude;
        case 'g': return RaterRole::gpt4;
        default: throw ValidationError(std::string("unknown rater role key: ") + key);
    }
}

int rating_ordinal(const std::string& label, const LabelScale& scale) {
    const auto idx = scale.index_of(label);
    if (!idx) throw ValidationError("rating label not on scale: " + label);
    return static_cast<int>(scale.size() - *idx);
}

namespace {

int ordinal_of(const AnnotatedArticle& article, RaterRole role, const LabelScale& scale) {
    auto it = article.ratings.find(role);
    if (it == article.ratings.end()) {
        throw ValidationError("article " + article.id + " is missing role " +
                              std::string(1, role_key(role)));
    }
    return rating_ordinal(it->second, scale);
}

}  // namespace

BiasDistanceTriple bias_distances(const AnnotatedArticle& article, const LabelScale& scale) {
    const int d = ordinal_of(article, RaterRole::democrat, scale);
    const int r = ordinal_of(article, RaterRole::republican, scale);
    const int s = ordinal_of(article, RaterRole::system, scale);
    return BiasDistanceTriple{std::abs(d - r), std::abs(d - s), std::abs(s - r)};
}

AggregateReport aggregate(const std::vector<AnnotatedArticle>& dataset, const LabelScale& scale) {
    if (dataset.empty()) throw ValidationError("aggregate needs a non-empty dataset");

    AggregateReport report;
    report.scale = scale;
    int gap_sum = 0;

    for (const auto& article : dataset) {
        ArticleResult row;
        row.id = article.id;
        row.category = article.category;
        row.derived = bias_distances(article, scale);
        row.triple = article.recorded_biases.value_or(row.derived);
        row.derived_mismatch = article.recorded_biases && *article.recorded_biases != row.derived;
        if (row.derived_mismatch) report.mismatched_ids.push_back(article.id);

        report.totals.dr += row.triple.dr;
        report.totals.ds += row.triple.ds;
        report.totals.sr += row.triple.sr;

        const auto g = article.ratings.find(RaterRole::gpt4);
        if (g != article.ratings.end()) {
            gap_sum += std::abs(rating_ordinal(g->second, scale) -
                                ordinal_of(article, RaterRole::system, scale));
            ++report.gpt4_gap_count;
        } else {
            ++report.gpt4_gap_skipped;
        }

        for (const auto& [role, label] : article.ratings) {
            auto& hist = report.histograms[role];
            if (hist.empty()) hist.assign(scale.size(), 0);
            hist[*scale.index_of(label)] += 1;
        }
        report.rows.push_back(std::move(row));
    }

    report.gpt4_gap_mean =
        report.gpt4_gap_count ? static_cast<double>(gap_sum) / report.gpt4_gap_count : 0.0;
    return report;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::string format_gap(double gap) {
    std::ostringstream out;
    out << gap;
    return out.str();
}

}  // namespace

std::string emit_report(const AggregateReport& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "id,category,DR,DS,SR\n";
        for (const auto& row : report.rows) {
            out << csv_escape(row.id) << "," << csv_escape(row.category) << "," << row.triple.dr
                << "," << row.triple.ds << "," << row.triple.sr << "\n";
        }
        out << "total,," << report.totals.dr << "," << report.totals.ds << ","
            << report.totals.sr << "\n";
        return out.str();
    }

    out << "# Bias-distance report\n\n";
    out << "| id | category | DR | DS | SR |\n|---|---|---|---|---|\n";
    for (const auto& row : report.rows) {
        out << "| " << row.id << " | " << row.category << " | " << row.triple.dr << " | "
            << row.triple.ds << " | " << row.triple.sr << " |";
        if (row.derived_mismatch) out << " (printed triple kept; ratings derive a different one)";
        out << "\n";
    }
    out << "\nTotals (DR, DS, SR): " << report.totals.dr << ", " << report.totals.ds << ", "
        << report.totals.sr << "\n";
    out << "Mean |g - S| gap: " << format_gap(report.gpt4_gap_mean) << " over "
        << report.gpt4_gap_count << " article(s), " << report.gpt4_gap_skipped
        << " skipped (no g rating)\n";
    out << "Distance ordering: DS (" << report.totals.ds << ") vs SR (" << report.totals.sr
        << ") vs DR (" << report.totals.dr << ")\n";

    out << "\n## Rating histograms\n\n";
    for (const auto& [role, hist] : report.histograms) {
        out << "- " << role_key(role) << ":";
        for (std::size_t i = 0; i < hist.size(); ++i) {
            out << " " << report.scale.label(i) << "=" << hist[i];
        }
        out << "\n";
    }
    if (!report.mismatched_ids.empty()) {
        out << "\nRows whose printed triple differs from the ratings-derived one:";
        for (const auto& id : report.mismatched_ids) out << " " << id;
        out << "\n";
    }
    return out.str();
}

}  // namespace evince::analysis
