#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "belltree/dataset.hpp"
#include "belltree/xtree.hpp"

namespace belltree {

// Bagged-tree defect predictor: each tree is grown on a bootstrap resample
// with ceil(sqrt(d)) features considered per node; prediction is the
// majority vote of the trees' leaf majorities. The tree count must be odd so
// votes cannot tie.
class DefectPredictor {
public:
    // Composes a predictor from pre-built trees (testing / ensembling).
    explicit DefectPredictor(std::vector<DecisionTree> trees);

    bool predict(const Instance& z) const;
    int votes_for_defective(const Instance& z) const;
    int tree_count() const { return static_cast<int>(trees_.size()); }
    const std::vector<DecisionTree>& trees() const { return trees_; }

private:
    std::vector<DecisionTree> trees_;
};

// Trains the verification oracle. Deterministic per seed.
DefectPredictor train_forest(const ProjectDataset& oracle_train, int n_trees, uint64_t seed,
                             TreeParams base_params = {});

// Percent defect reduction: (1 - after/before) * 100. 0 means no change,
// positive is improvement, negative an optimization failure. before must be
// at least 1; a zero baseline leaves the measure undefined.
double improvement(int before, int after);

// One repeat of the plan/alter/re-predict protocol.
struct EvaluationRun {
    int repeat_index = 0;
    int before = 0;
    int after = 0;
    double r = 0.0;
    bool skipped = false; // zero baseline: R undefined, excluded from summaries
};

struct ExperimentResult {
    std::string treatment;
    std::string project;
    std::vector<EvaluationRun> runs;

    // R of the non-skipped runs, in repeat order.
    std::vector<double> scores() const;
};

std::string experiment_to_csv(const ExperimentResult& result);
std::string experiment_to_json(const ExperimentResult& result, int indent = 2);
ExperimentResult experiment_from_csv(const std::string& text);

} // namespace belltree
