#include "belltree/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "belltree/errors.hpp"

namespace belltree {

std::string Interval::to_string() const {
    auto fmt = [](double v) {
        if (v == -std::numeric_limits<double>::infinity()) return std::string("-inf");
        if (v == std::numeric_limits<double>::infinity()) return std::string("+inf");
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    return "[" + fmt(low) + "," + fmt(high) + ")";
}

size_t FeatureBins::index_of(double value) const {
    // Number of cuts <= value; half-open boundaries send a cut value rightward.
    auto it = std::upper_bound(cuts.begin(), cuts.end(), value);
    return static_cast<size_t>(it - cuts.begin());
}

Interval FeatureBins::interval_at(size_t i) const {
    Interval iv;
    if (i > 0) iv.low = cuts[i - 1];
    if (i < cuts.size()) iv.high = cuts[i];
    return iv;
}

double entropy_from_counts(size_t positives, size_t total) {
    if (total == 0 || positives == 0 || positives == total) return 0.0;
    double p = static_cast<double>(positives) / static_cast<double>(total);
    double q = 1.0 - p;
    return -p * std::log2(p) - q * std::log2(q);
}

double shannon_entropy(std::span<const uint8_t> labels) {
    if (labels.empty()) fail(Err::EmptyInput, "entropy of empty label set");
    size_t pos = 0;
    for (uint8_t l : labels) pos += l ? 1 : 0;
    return entropy_from_counts(pos, labels.size());
}

namespace {

struct SortedColumn {
    std::vector<double> values;
    std::vector<uint8_t> labels;
    std::vector<size_t> pos_prefix; // pos_prefix[i] = positives among first i rows
};

size_t positives_in(const SortedColumn& col, size_t lo, size_t hi) {
    return col.pos_prefix[hi] - col.pos_prefix[lo];
}

size_t classes_in(const SortedColumn& col, size_t lo, size_t hi) {
    size_t pos = positives_in(col, lo, hi);
    size_t total = hi - lo;
    if (total == 0) return 0;
    return (pos == 0 || pos == total) ? 1 : 2;
}

struct BestCut {
    size_t split = 0;   // index into the sorted range; left = [lo, split)
    double value = 0.0; // midpoint between the adjacent distinct values
    double gain = -1.0;
};

// Scans every midpoint between adjacent distinct values, honoring the
// support floor. First (lowest-valued) strict maximum wins.
BestCut best_cut_in(const SortedColumn& col, size_t lo, size_t hi, int min_support) {
    BestCut best;
    const size_t total = hi - lo;
    const double ent = entropy_from_counts(positives_in(col, lo, hi), total);
    const size_t ms = static_cast<size_t>(min_support);
    for (size_t p = lo + 1; p < hi; ++p) {
        if (col.values[p - 1] == col.values[p]) continue;
        size_t left = p - lo;
        size_t right = hi - p;
        if (left < ms || right < ms) continue;
        double mid = (col.values[p - 1] + col.values[p]) / 2.0;
        // If rounding collapses the midpoint onto the left value, the half-open
        // rule would disagree with the positional split; skip the candidate.
        if (mid <= col.values[p - 1]) continue;
        double ent_l = entropy_from_counts(positives_in(col, lo, p), left);
        double ent_r = entropy_from_counts(positives_in(col, p, hi), right);
        double gain = ent -
                      (static_cast<double>(left) / static_cast<double>(total)) * ent_l -
                      (static_cast<double>(right) / static_cast<double>(total)) * ent_r;
        if (gain > best.gain) {
            best.gain = gain;
            best.split = p;
            best.value = mid;
        }
    }
    return best;
}

// Fayyad-Irani MDL acceptance test for a candidate cut.
bool mdl_accepts(const SortedColumn& col, size_t lo, size_t hi, size_t split, double gain) {
    const double n = static_cast<double>(hi - lo);
    const double ent = entropy_from_counts(positives_in(col, lo, hi), hi - lo);
    const double ent_l = entropy_from_counts(positives_in(col, lo, split), split - lo);
    const double ent_r = entropy_from_counts(positives_in(col, split, hi), hi - split);
    const double k = static_cast<double>(classes_in(col, lo, hi));
    const double k1 = static_cast<double>(classes_in(col, lo, split));
    const double k2 = static_cast<double>(classes_in(col, split, hi));
    const double delta = std::log2(std::pow(3.0, k) - 2.0) - (k * ent - k1 * ent_l - k2 * ent_r);
    const double threshold = (std::log2(n - 1.0) + delta) / n;
    return gain > threshold;
}

void mdlp_recurse(const SortedColumn& col, size_t lo, size_t hi, int min_support,
                  std::vector<double>& cuts, std::optional<double>* first_cut) {
    if (hi - lo < 2 * static_cast<size_t>(min_support)) return;
    BestCut best = best_cut_in(col, lo, hi, min_support);
    if (best.gain <= 0.0) return;
    if (!mdl_accepts(col, lo, hi, best.split, best.gain)) return;
    if (first_cut && !first_cut->has_value()) *first_cut = best.value;
    cuts.push_back(best.value);
    mdlp_recurse(col, lo, best.split, min_support, cuts, nullptr);
    mdlp_recurse(col, best.split, hi, min_support, cuts, nullptr);
}

} // namespace

FeatureBins mdlp_bins(const std::string& feature,
                      std::span<const double> values,
                      std::span<const uint8_t> labels,
                      int min_support) {
    if (values.size() != labels.size())
        fail(Err::InputMismatch, "mdlp_bins: " + std::to_string(values.size()) + " values vs " +
                                     std::to_string(labels.size()) + " labels");
    if (min_support < 1) fail(Err::InvalidParameter, "min_support must be >= 1");

    FeatureBins bins;
    bins.feature = feature;
    bins.min_support = min_support;
    const size_t n = values.size();
    if (n < 2 * static_cast<size_t>(min_support)) return bins;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });

    SortedColumn col;
    col.values.reserve(n);
    col.labels.reserve(n);
    for (size_t i : order) {
        col.values.push_back(values[i]);
        col.labels.push_back(labels[i]);
    }
    col.pos_prefix.assign(n + 1, 0);
    for (size_t i = 0; i < n; ++i)
        col.pos_prefix[i + 1] = col.pos_prefix[i] + (col.labels[i] ? 1 : 0);

    mdlp_recurse(col, 0, n, min_support, bins.cuts, &bins.first_cut);
    std::sort(bins.cuts.begin(), bins.cuts.end());

    // Gain of the final partition relative to the undivided column.
    if (!bins.cuts.empty()) {
        double whole = entropy_from_counts(positives_in(col, 0, n), n);
        double after = 0.0;
        size_t lo = 0;
        for (size_t b = 0; b <= bins.cuts.size(); ++b) {
            size_t hi = n;
            if (b < bins.cuts.size()) {
                // Half-open bins: a value equal to the cut belongs to the right side.
                hi = static_cast<size_t>(
                    std::lower_bound(col.values.begin(), col.values.end(), bins.cuts[b]) -
                    col.values.begin());
            }
            if (hi > lo)
                after += (static_cast<double>(hi - lo) / static_cast<double>(n)) *
                         entropy_from_counts(positives_in(col, lo, hi), hi - lo);
            lo = hi;
        }
        bins.gain = whole - after;
    }
    return bins;
}

Interval bin_of(const FeatureBins& bins, double value) {
    return bins.interval_at(bins.index_of(value));
}

} // namespace belltree
