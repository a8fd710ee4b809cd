#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "belltree/bellwether.hpp"
#include "belltree/dataset.hpp"
#include "belltree/oracle.hpp"
#include "belltree/xtree.hpp"

namespace belltree {

enum class Treatment { Xtree, Belltree };

const char* treatment_name(Treatment t);
std::optional<Treatment> parse_treatment(const std::string& name);

struct ExperimentParams {
    std::array<double, 3> fractions = kDefaultSplitFractions;
    TreeParams tree;
    int n_trees = 25;
};

// Per-instance planning function for one repeat.
using PlanFn = std::function<std::optional<Plan>(const Instance&)>;

// Builds the repeat's planner from that repeat's split and derived seed.
using PlannerFactory = std::function<PlanFn(const ThreeWaySplit&, uint64_t)>;

PlannerFactory make_xtree_factory(const ExperimentParams& params);

// Elects the bellwether once (up front) from the candidate projects, then
// per repeat grows a fresh tree on a re-split of the bellwether. The election
// report is written to *report_out when given.
PlannerFactory make_belltree_factory(std::vector<ProjectDataset> candidates,
                                     const ExperimentParams& params, uint64_t master_seed,
                                     BellwetherReport* report_out = nullptr);

// The plan / alter / re-predict protocol: per repeat, split the target,
// fit the planner and the oracle on disjoint parts, count predicted-defective
// test instances before and after applying the plans, and score with
// improvement(). Zero-baseline repeats are recorded as skipped.
ExperimentResult run_experiment_with(const ProjectDataset& target,
                                     const std::string& treatment_label,
                                     const PlannerFactory& factory,
                                     const ExperimentParams& params, int repeats,
                                     uint64_t master_seed);

// Treatment-dispatched variant. For Belltree, `family` may contain the target
// project; it is excluded by name before the election.
ExperimentResult run_experiment(const ProjectDataset& target, Treatment treatment,
                                const std::vector<ProjectDataset>& family,
                                const ExperimentParams& params, int repeats,
                                uint64_t master_seed);

} // namespace belltree
