#include "belltree/bellwether.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "belltree/errors.hpp"
#include "belltree/rng.hpp"
#include "belltree/stats.hpp"

namespace belltree {

using ordered_json = nlohmann::ordered_json;

double g_score(double recall, double false_alarm) {
    double specificity = 1.0 - false_alarm;
    double denom = recall + specificity;
    if (denom <= 0.0) return 0.0;
    return 2.0 * recall * specificity / denom;
}

double transfer_score(const ProjectDataset& train, const ProjectDataset& test, uint64_t seed,
                      int n_trees, const TreeParams& params) {
    DefectPredictor oracle = train_forest(train, n_trees, seed, params);
    size_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (const auto& z : test.instances) {
        bool predicted = oracle.predict(z);
        if (z.defective) {
            predicted ? ++tp : ++fn;
        } else {
            predicted ? ++fp : ++tn;
        }
    }
    // A one-class test set leaves one rate undefined; score on the other.
    double recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
    double pf = (fp + tn) > 0 ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
    return g_score(recall, pf);
}

BellwetherReport discover_bellwether(const std::vector<ProjectDataset>& family, uint64_t seed,
                                     int n_trees, const TreeParams& params) {
    const size_t n = family.size();
    if (n < 2)
        fail(Err::FewerThanTwoProjects, "bellwether discovery needs >= 2 projects, got " +
                                            std::to_string(n));

    BellwetherReport report;
    report.matrix.projects.reserve(n);
    for (const auto& p : family) report.matrix.projects.push_back(p.name);
    report.matrix.scores.assign(n, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));

    // One derived seed for every cell: scores then depend only on the data,
    // so permuting or renaming projects permutes the matrix exactly.
    const uint64_t cell_seed = derive_seed(seed, "transfer");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) report.matrix.scores[i][j] = transfer_score(family[i], family[j],
                                                                    cell_seed, n_trees, params);

    for (size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        row.reserve(n - 1);
        for (size_t j = 0; j < n; ++j)
            if (i != j) row.push_back(report.matrix.scores[i][j]);
        report.medians.emplace_back(family[i].name, summarize(row).median);
    }

    size_t best = 0;
    for (size_t i = 1; i < n; ++i) {
        double cur = report.medians[i].second;
        double top = report.medians[best].second;
        if (cur > top || (cur == top && report.medians[i].first < report.medians[best].first))
            best = i;
    }
    report.winner = report.medians[best].first;
    return report;
}

BellwetherReport elect_bellwether(const std::vector<ProjectDataset>& candidates, uint64_t seed) {
    if (candidates.empty())
        fail(Err::FewerThanTwoProjects, "no candidate projects for bellwether election");
    if (candidates.size() == 1) {
        // Degenerate election: a single candidate wins unopposed.
        BellwetherReport report;
        report.matrix.projects.push_back(candidates[0].name);
        report.matrix.scores.assign(
            1, std::vector<double>(1, std::numeric_limits<double>::quiet_NaN()));
        report.medians.emplace_back(candidates[0].name,
                                    std::numeric_limits<double>::quiet_NaN());
        report.winner = candidates[0].name;
        return report;
    }
    return discover_bellwether(candidates, seed);
}

BelltreeOutcome belltree_plan(const std::vector<ProjectDataset>& family,
                              const ProjectDataset& target, const TreeParams& params,
                              const std::array<double, 3>& fractions, uint64_t seed) {
    if (family.empty()) fail(Err::FewerThanTwoProjects, "no candidate projects for belltree");
    for (const auto& p : family)
        if (p.name == target.name)
            fail(Err::TargetInFamily, "target '" + target.name + "' must not be a candidate");

    BelltreeOutcome outcome;
    outcome.report = elect_bellwether(family, derive_seed(seed, "discover"));
    size_t winner_idx = 0;
    for (size_t i = 0; i < family.size(); ++i)
        if (family[i].name == outcome.report.winner) winner_idx = i;

    const ProjectDataset& bellwether = family[winner_idx];
    ProjectDataset aligned_target = target;
    if (aligned_target.schema.feature_names != bellwether.schema.feature_names) {
        std::vector<std::string> common;
        for (const auto& f : bellwether.schema.feature_names)
            if (aligned_target.schema.feature_index(f) >= 0) common.push_back(f);
        if (common.empty())
            fail(Err::IncompatibleSchemas, "target shares no features with the bellwether");
        aligned_target = aligned_target.restricted_to(common);
    }
    ProjectDataset planner_source = bellwether.restricted_to(aligned_target.schema.feature_names);

    ThreeWaySplit split = three_way_split(planner_source, fractions, derive_seed(seed, "bwsplit"));
    outcome.tree = build_tree(split.planner_train, params);
    for (const auto& z : split.planner_train.instances)
        outcome.planner_train_ids.push_back(z.identifier);

    for (const auto& z : aligned_target.instances) {
        if (auto plan = plan_for(outcome.tree, z))
            outcome.plans.push_back({z.identifier, std::move(*plan)});
    }
    return outcome;
}

std::string bellwether_report_to_json(const BellwetherReport& report, int indent) {
    ordered_json j;
    j["projects"] = report.matrix.projects;
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.matrix.scores) {
        ordered_json r = ordered_json::array();
        for (double v : row) r.push_back(std::isnan(v) ? ordered_json(nullptr) : ordered_json(v));
        rows.push_back(std::move(r));
    }
    j["scores"] = std::move(rows);
    ordered_json medians = ordered_json::object();
    for (const auto& [name, median] : report.medians)
        medians[name] = std::isnan(median) ? ordered_json(nullptr) : ordered_json(median);
    j["median_scores"] = std::move(medians);
    j["winner"] = report.winner;
    return j.dump(indent);
}

} // namespace belltree
