#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace belltree {

// Half-open interval [low, high); low may be -inf and high +inf.
struct Interval {
    double low = -std::numeric_limits<double>::infinity();
    double high = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return v >= low && v < high; }
    bool bounded_below() const { return std::isfinite(low); }
    bool bounded_above() const { return std::isfinite(high); }
    bool operator==(const Interval&) const = default;
    std::string to_string() const;

    static Interval whole() { return {}; }
};

// Supervised bins for one feature: k cuts define k+1 intervals covering the
// real line. gain is the entropy reduction (bits) of the final partition.
struct FeatureBins {
    std::string feature;
    std::vector<double> cuts;
    double gain = 0.0;
    int min_support = 1;
    // The cut accepted at the top recursion level, when any.
    std::optional<double> first_cut;

    size_t interval_count() const { return cuts.size() + 1; }
    size_t index_of(double value) const;
    Interval interval_at(size_t i) const;
};

// Entropy of a binary label set, in bits; in [0, 1], 0 iff pure.
double shannon_entropy(std::span<const uint8_t> labels);
double entropy_from_counts(size_t positives, size_t total);

// Fayyad-Irani recursive entropy discretization with the MDL stopping rule.
// Cuts sit at midpoints between adjacent distinct values; each side of every
// accepted cut keeps at least min_support instances. Fewer than 2*min_support
// rows, a constant feature, or a pure label column all yield zero cuts.
FeatureBins mdlp_bins(const std::string& feature,
                      std::span<const double> values,
                      std::span<const uint8_t> labels,
                      int min_support);

// The unique bin interval containing value under the half-open rule.
Interval bin_of(const FeatureBins& bins, double value);

} // namespace belltree
