#include "belltree/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "belltree/errors.hpp"
#include "belltree/rng.hpp"

namespace belltree {

using ordered_json = nlohmann::ordered_json;

DefectPredictor::DefectPredictor(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {
    if (trees_.empty()) fail(Err::InvalidParameter, "predictor needs at least one tree");
}

int DefectPredictor::votes_for_defective(const Instance& z) const {
    int votes = 0;
    for (const auto& tree : trees_)
        if (locate_leaf(tree, z).defect_probability >= 0.5) ++votes;
    return votes;
}

bool DefectPredictor::predict(const Instance& z) const {
    return 2 * votes_for_defective(z) > tree_count();
}

DefectPredictor train_forest(const ProjectDataset& oracle_train, int n_trees, uint64_t seed,
                             TreeParams base_params) {
    if (n_trees < 1 || n_trees % 2 == 0)
        fail(Err::InvalidParameter, "n_trees must be odd and positive, got " +
                                        std::to_string(n_trees));
    if (!oracle_train.has_both_classes())
        fail(Err::SingleClassTraining, oracle_train.name + " has a single class");

    const size_t n = oracle_train.size();
    const int d = static_cast<int>(oracle_train.schema.feature_names.size());
    TreeParams params = base_params;
    if (params.features_per_node <= 0)
        params.features_per_node =
            static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    Rng bootstrap_rng(derive_seed(seed, "bootstrap"));
    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<size_t>(n_trees));
    for (int t = 0; t < n_trees; ++t) {
        ProjectDataset sample;
        sample.name = oracle_train.name + "/bag" + std::to_string(t);
        sample.schema = oracle_train.schema;
        sample.instances.reserve(n);
        for (size_t i = 0; i < n; ++i)
            sample.instances.push_back(
                oracle_train.instances[draw_below(bootstrap_rng, n)]);
        trees.push_back(
            build_tree(sample, params, derive_seed(seed, static_cast<uint64_t>(t))));
    }
    return DefectPredictor(std::move(trees));
}

double improvement(int before, int after) {
    if (before < 1)
        fail(Err::ZeroBaseline, "improvement undefined for baseline " + std::to_string(before));
    return (1.0 - static_cast<double>(after) / static_cast<double>(before)) * 100.0;
}

std::vector<double> ExperimentResult::scores() const {
    std::vector<double> out;
    out.reserve(runs.size());
    for (const auto& run : runs)
        if (!run.skipped) out.push_back(run.r);
    return out;
}

namespace {

std::string format_r(double r) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", r);
    return buf;
}

} // namespace

std::string experiment_to_csv(const ExperimentResult& result) {
    std::string out = "treatment,project,repeat,before,after,R\n";
    for (const auto& run : result.runs) {
        out += result.treatment + "," + result.project + "," + std::to_string(run.repeat_index) +
               "," + std::to_string(run.before) + "," + std::to_string(run.after) + ",";
        out += run.skipped ? "" : format_r(run.r);
        out += "\n";
    }
    return out;
}

std::string experiment_to_json(const ExperimentResult& result, int indent) {
    ordered_json j;
    j["treatment"] = result.treatment;
    j["project"] = result.project;
    ordered_json runs = ordered_json::array();
    for (const auto& run : result.runs) {
        ordered_json r;
        r["repeat"] = run.repeat_index;
        r["before"] = run.before;
        r["after"] = run.after;
        r["R"] = run.skipped ? ordered_json(nullptr) : ordered_json(run.r);
        r["skipped"] = run.skipped;
        runs.push_back(std::move(r));
    }
    j["runs"] = std::move(runs);
    return j.dump(indent);
}

ExperimentResult experiment_from_csv(const std::string& text) {
    ExperimentResult result;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        EvaluationRun run;
        std::getline(row, cell, ',');
        result.treatment = cell;
        std::getline(row, cell, ',');
        result.project = cell;
        std::getline(row, cell, ',');
        run.repeat_index = std::stoi(cell);
        std::getline(row, cell, ',');
        run.before = std::stoi(cell);
        std::getline(row, cell, ',');
        run.after = std::stoi(cell);
        if (std::getline(row, cell, ',') && !cell.empty()) {
            run.r = std::stod(cell);
        } else {
            run.skipped = true;
        }
        result.runs.push_back(run);
    }
    return result;
}

} // namespace belltree
