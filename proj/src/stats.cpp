#include "belltree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "belltree/errors.hpp"

namespace belltree {

double nearest_rank_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) fail(Err::EmptyInput, "quantile of empty sample");
    size_t n = sorted.size();
    size_t rank = static_cast<size_t>(std::ceil(p * static_cast<double>(n) - 1e-12));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return sorted[rank - 1];
}

SummaryStats summarize(std::span<const double> samples) {
    if (samples.empty()) fail(Err::EmptyInput, "summarize of empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    SummaryStats s;
    s.median = nearest_rank_quantile(sorted, 0.50);
    s.q1 = nearest_rank_quantile(sorted, 0.25);
    s.q3 = nearest_rank_quantile(sorted, 0.75);
    s.iqr = s.q3 - s.q1;
    return s;
}

double mann_whitney_p(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) fail(Err::EmptyInput, "mann_whitney_p needs two samples");
    const size_t n1 = a.size();
    const size_t n2 = b.size();
    const size_t n = n1 + n2;

    // Midranks over the pooled sample.
    std::vector<std::pair<double, int>> pooled; // (value, 0 = a / 1 = b)
    pooled.reserve(n);
    for (double v : a) pooled.emplace_back(v, 0);
    for (double v : b) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    double rank_sum_a = 0.0;
    double tie_term = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        double t = static_cast<double>(j - i);
        if (t > 1.0) tie_term += t * t * t - t;
        for (size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_a += rank;
        i = j;
    }

    double u = rank_sum_a - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
    double mean = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
    double nn = static_cast<double>(n);
    double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                 ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) return 1.0; // all pooled values identical
    double z = (u - mean) / std::sqrt(var);
    return std::erfc(std::abs(z) / std::sqrt(2.0)); // two-sided
}

double cliffs_delta(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) fail(Err::EmptyInput, "cliffs_delta needs two samples");
    long long greater = 0, less = 0;
    for (double x : a)
        for (double y : b) {
            if (x > y) ++greater;
            else if (x < y) ++less;
        }
    return static_cast<double>(greater - less) /
           (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::vector<TreatmentSummary> rank_treatments(
    const std::vector<std::pair<std::string, std::vector<double>>>& groups, double alpha,
    double effect_threshold) {
    if (groups.empty()) fail(Err::EmptyGroup, "no treatment groups");
    for (const auto& [name, samples] : groups)
        if (samples.empty()) fail(Err::EmptyGroup, "treatment '" + name + "' has no samples");

    struct Entry {
        TreatmentSummary summary;
        const std::vector<double>* samples;
    };
    std::vector<Entry> entries;
    entries.reserve(groups.size());
    for (const auto& [name, samples] : groups) {
        Entry e;
        e.summary.treatment = name;
        SummaryStats s = summarize(samples);
        e.summary.median = s.median;
        e.summary.iqr = s.iqr;
        e.summary.q1 = s.q1;
        e.summary.q3 = s.q3;
        e.samples = &samples;
        entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.summary.median != y.summary.median) return x.summary.median > y.summary.median;
        return x.summary.treatment < y.summary.treatment;
    });

    int rank = 1;
    entries[0].summary.rank = rank;
    for (size_t i = 1; i < entries.size(); ++i) {
        double p = mann_whitney_p(*entries[i - 1].samples, *entries[i].samples);
        double delta = std::abs(cliffs_delta(*entries[i - 1].samples, *entries[i].samples));
        bool distinguishable = p < alpha && delta >= effect_threshold;
        if (distinguishable) ++rank;
        entries[i].summary.rank = rank;
    }

    std::vector<TreatmentSummary> out;
    out.reserve(entries.size());
    for (auto& e : entries) out.push_back(std::move(e.summary));
    return out;
}

namespace {

std::string format_stat(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

// 30-char bar over a fixed [-100, 100] axis: dashes from Q1 to Q3, '*' at
// the median, matching the usual quartile-chart idiom of planner reports.
std::string quartile_bar(const TreatmentSummary& t) {
    const int width = 30;
    auto pos = [&](double v) {
        double clamped = std::min(100.0, std::max(-100.0, v));
        int p = static_cast<int>(std::lround((clamped + 100.0) / 200.0 * (width - 1)));
        return std::min(width - 1, std::max(0, p));
    };
    std::string bar(width, ' ');
    int lo = pos(t.q1), mid = pos(t.median), hi = pos(t.q3);
    for (int i = lo; i <= hi; ++i) bar[static_cast<size_t>(i)] = '-';
    bar[static_cast<size_t>(mid)] = '*';
    return "|" + bar + "|";
}

} // namespace

std::string render_report(const std::vector<ProjectReport>& projects) {
    std::string out;
    out += "Observed improvements (percent defect reduction; larger medians are better)\n";
    for (const auto& project : projects) {
        out += "\n" + project.project + "\n";
        char header[128];
        std::snprintf(header, sizeof(header), "  %-4s %-10s %8s %8s   %s\n", "Rank", "Treatment",
                      "Median", "IQR", "Quartiles [-100, 100]");
        out += header;
        for (const auto& row : project.rows) {
            char line[160];
            std::snprintf(line, sizeof(line), "  %-4d %-10s %8s %8s   %s\n", row.rank,
                          row.treatment.c_str(), format_stat(row.median).c_str(),
                          format_stat(row.iqr).c_str(), quartile_bar(row).c_str());
            out += line;
        }
    }
    return out;
}

std::string summaries_to_csv(const std::vector<ProjectReport>& projects) {
    std::string out = "project,rank,treatment,median,iqr\n";
    for (const auto& project : projects)
        for (const auto& row : project.rows)
            out += project.project + "," + std::to_string(row.rank) + "," + row.treatment + "," +
                   format_stat(row.median) + "," + format_stat(row.iqr) + "\n";
    return out;
}

} // namespace belltree
