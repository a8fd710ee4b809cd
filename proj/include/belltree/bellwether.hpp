#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "belltree/dataset.hpp"
#include "belltree/oracle.hpp"
#include "belltree/xtree.hpp"

namespace belltree {

// Round-robin transfer quality: cell (i, j) is the g-score of a predictor
// trained on project i and tested on project j. Diagonal cells are NaN.
struct TransferScoreMatrix {
    std::vector<std::string> projects;
    std::vector<std::vector<double>> scores;
};

struct BellwetherReport {
    TransferScoreMatrix matrix;
    // Median off-diagonal score per project, in matrix order.
    std::vector<std::pair<std::string, double>> medians;
    std::string winner;
};

// Harmonic mean of recall and (1 - false alarm rate).
double g_score(double recall, double false_alarm);

// Trains a forest on the whole candidate project and scores it on the test
// project. Deterministic per seed.
double transfer_score(const ProjectDataset& train, const ProjectDataset& test, uint64_t seed,
                      int n_trees = 25, const TreeParams& params = {});

// Fills the full round-robin matrix and elects the project with the best
// median transfer score (ties to the lexicographically first name).
BellwetherReport discover_bellwether(const std::vector<ProjectDataset>& family, uint64_t seed,
                                     int n_trees = 25, const TreeParams& params = {});

// discover_bellwether for >= 2 candidates; a single candidate wins unopposed
// with a degenerate 1x1 report.
BellwetherReport elect_bellwether(const std::vector<ProjectDataset>& candidates, uint64_t seed);

struct BelltreeOutcome {
    BellwetherReport report;
    DecisionTree tree; // grown on the bellwether's planner-train part
    std::vector<InstancePlan> plans;
    // Identifiers of the instances the tree was trained on, for leakage audits.
    std::vector<std::string> planner_train_ids;
};

// BELLTREE: elects the bellwether among `family` (which must not contain the
// target), grows a tree on its planner-train split, and plans the
// target's instances with it.
BelltreeOutcome belltree_plan(const std::vector<ProjectDataset>& family,
                              const ProjectDataset& target, const TreeParams& params = {},
                              const std::array<double, 3>& fractions = kDefaultSplitFractions,
                              uint64_t seed = 1);

std::string bellwether_report_to_json(const BellwetherReport& report, int indent = 2);

} // namespace belltree
