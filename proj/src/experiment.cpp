#include "belltree/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <memory>

#include "belltree/errors.hpp"
#include "belltree/rng.hpp"

namespace belltree {

const char* treatment_name(Treatment t) {
    return t == Treatment::Xtree ? "XTREE" : "BELLTREE";
}

std::optional<Treatment> parse_treatment(const std::string& name) {
    std::string low;
    for (char c : name) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "xtree") return Treatment::Xtree;
    if (low == "belltree") return Treatment::Belltree;
    return std::nullopt;
}

PlannerFactory make_xtree_factory(const ExperimentParams& params) {
    TreeParams tree_params = params.tree;
    return [tree_params](const ThreeWaySplit& split, uint64_t) -> PlanFn {
        auto tree = std::make_shared<DecisionTree>(build_tree(split.planner_train, tree_params));
        return [tree](const Instance& z) { return plan_for(*tree, z); };
    };
}

PlannerFactory make_belltree_factory(std::vector<ProjectDataset> candidates,
                                     const ExperimentParams& params, uint64_t master_seed,
                                     BellwetherReport* report_out) {
    // The bellwether is elected once per experiment; repeats re-split it but
    // do not re-run the election.
    auto report = std::make_shared<BellwetherReport>(
        elect_bellwether(candidates, derive_seed(master_seed, "discover")));
    if (report_out) *report_out = *report;

    auto bellwether = std::make_shared<ProjectDataset>();
    for (auto& c : candidates)
        if (c.name == report->winner) *bellwether = std::move(c);

    TreeParams tree_params = params.tree;
    auto fractions = params.fractions;
    return [bellwether, tree_params, fractions](const ThreeWaySplit& split,
                                                uint64_t repeat_seed) -> PlanFn {
        ProjectDataset source = *bellwether;
        if (source.schema.feature_names != split.test.schema.feature_names)
            source = source.restricted_to(split.test.schema.feature_names);
        ThreeWaySplit bw_split =
            three_way_split(source, fractions, derive_seed(repeat_seed, "bwsplit"));
        auto tree = std::make_shared<DecisionTree>(build_tree(bw_split.planner_train, tree_params));
        return [tree](const Instance& z) { return plan_for(*tree, z); };
    };
}

ExperimentResult run_experiment_with(const ProjectDataset& target,
                                     const std::string& treatment_label,
                                     const PlannerFactory& factory,
                                     const ExperimentParams& params, int repeats,
                                     uint64_t master_seed) {
    if (repeats < 1) fail(Err::InvalidParameter, "repeats must be >= 1");
    if (!factory) fail(Err::InvalidParameter, "no planner factory");

    ExperimentResult result;
    result.treatment = treatment_label;
    result.project = target.name;
    result.runs.reserve(static_cast<size_t>(repeats));

    for (int r = 0; r < repeats; ++r) {
        const uint64_t repeat_seed = derive_seed(master_seed, static_cast<uint64_t>(r));
        ThreeWaySplit split =
            three_way_split(target, params.fractions, derive_seed(repeat_seed, "split"));
        PlanFn plan = factory(split, repeat_seed);
        DefectPredictor oracle = train_forest(split.oracle_train, params.n_trees,
                                              derive_seed(repeat_seed, "forest"), params.tree);

        EvaluationRun run;
        run.repeat_index = r;
        for (const auto& z : split.test.instances) {
            bool before = oracle.predict(z);
            if (before) ++run.before;
            if (auto p = plan(z)) {
                Instance altered = apply_plan(split.test.schema, z, *p);
                if (oracle.predict(altered)) ++run.after;
            } else if (before) {
                ++run.after; // unplanned instances are left untouched
            }
        }
        if (run.before == 0) {
            run.skipped = true;
        } else {
            run.r = improvement(run.before, run.after);
        }
        result.runs.push_back(run);
    }
    return result;
}

ExperimentResult run_experiment(const ProjectDataset& target, Treatment treatment,
                                const std::vector<ProjectDataset>& family,
                                const ExperimentParams& params, int repeats,
                                uint64_t master_seed) {
    if (treatment == Treatment::Xtree)
        return run_experiment_with(target, treatment_name(treatment), make_xtree_factory(params),
                                   params, repeats, master_seed);

    std::vector<ProjectDataset> pool;
    pool.push_back(target);
    for (const auto& p : family)
        if (p.name != target.name) pool.push_back(p);
    if (pool.size() < 2)
        fail(Err::FewerThanTwoProjects, "belltree needs at least one project besides the target");
    align_schemas(pool);
    ProjectDataset aligned_target = std::move(pool.front());
    pool.erase(pool.begin());
    return run_experiment_with(aligned_target, treatment_name(treatment),
                               make_belltree_factory(std::move(pool), params, master_seed),
                               params, repeats, master_seed);
}

} // namespace belltree
