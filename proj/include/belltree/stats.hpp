#pragma once

#include <span>
#include <string>
#include <vector>

namespace belltree {

// Nearest-rank quantile summary.
struct SummaryStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
};

SummaryStats summarize(std::span<const double> samples);

// Nearest-rank quantile of an ascending-sorted sample, p in (0, 1].
double nearest_rank_quantile(std::span<const double> sorted, double p);

// Two-sided Mann-Whitney p-value (normal approximation with tie correction).
double mann_whitney_p(std::span<const double> a, std::span<const double> b);

// Cliff's delta in [-1, 1]; |delta| below ~0.147 is conventionally negligible.
double cliffs_delta(std::span<const double> a, std::span<const double> b);

struct TreatmentSummary {
    std::string treatment;
    double median = 0.0;
    double iqr = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    int rank = 1; // 1 = best; equal ranks are statistically indistinguishable
};

// Sorts treatments by median (descending) and walks adjacent pairs, merging
// ranks whenever the Mann-Whitney test fails to reject at alpha or Cliff's
// delta is below effect_threshold.
std::vector<TreatmentSummary> rank_treatments(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups, double alpha = 0.05,
    double effect_threshold = 0.147);

struct ProjectReport {
    std::string project;
    std::vector<TreatmentSummary> rows;
};

// Fixed-width text table per project with a quartile bar per treatment.
std::string render_report(const std::vector<ProjectReport>& projects);

std::string summaries_to_csv(const std::vector<ProjectReport>& projects);

} // namespace belltree
