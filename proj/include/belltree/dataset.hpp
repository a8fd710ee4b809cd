#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace belltree {

// Column layout of a project metrics table: numeric feature columns used for
// learning, pass-through identifier columns, and the defect-count target.
struct MetricSchema {
    std::vector<std::string> feature_names;
    std::vector<std::string> identifier_columns;
    std::string target_column;

    // Index into feature_names, or -1.
    int feature_index(const std::string& name) const;
    bool operator==(const MetricSchema&) const = default;
};

// One module/class measurement: metric vector plus its defect count.
// defective is derived (defect_count >= 1) and kept in sync by the loader.
struct Instance {
    std::string identifier;
    std::vector<std::string> id_cells; // raw identifier-column values, kept for round-trips
    std::vector<double> features;      // aligned with MetricSchema::feature_names
    int defect_count = 0;
    bool defective = false;
};

struct ProjectDataset {
    std::string name;
    MetricSchema schema;
    std::vector<Instance> instances;

    size_t size() const { return instances.size(); }
    size_t defective_count() const;
    double defect_ratio() const;
    bool has_both_classes() const;
    // All values of one feature, in instance order.
    std::vector<double> feature_column(int feature_idx) const;
    // Population standard deviation per feature.
    std::vector<double> feature_stddevs() const;
    // Same rows, restricted/reordered to the given feature names.
    ProjectDataset restricted_to(const std::vector<std::string>& features) const;
};

// Planner-train / oracle-train / test partition. The planner and the
// verification oracle must never share instances; keeping the parts as
// separate datasets makes that rule checkable.
struct ThreeWaySplit {
    ProjectDataset planner_train;
    ProjectDataset oracle_train;
    ProjectDataset test;
};

struct LoadOptions {
    std::optional<MetricSchema> schema_hint;
    // Overrides the {bug, bugs, defects} target-name heuristic.
    std::string target_override;
};

// Loads a CSV metrics table. Columns whose cells are mostly numeric are
// features; the rest are identifiers. A non-numeric cell inside a feature
// column is an error naming the row and column.
ProjectDataset load_csv(const std::string& path, const LoadOptions& options = {});

void save_csv(const ProjectDataset& data, const std::string& path);

inline constexpr std::array<double, 3> kDefaultSplitFractions{0.5, 0.25, 0.25};

// Stratified (by defective flag) deterministic three-way split.
ThreeWaySplit three_way_split(const ProjectDataset& data,
                              const std::array<double, 3>& fractions,
                              uint64_t seed);

// Loads every *.csv in the directory (lexicographic order) and restricts all
// of them to the intersection of their feature sets.
std::vector<ProjectDataset> load_project_family(const std::string& directory,
                                                const LoadOptions& options = {});

// Restricts a set of already-loaded datasets to their common features.
void align_schemas(std::vector<ProjectDataset>& datasets);

} // namespace belltree
