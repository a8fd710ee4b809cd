// Command-line front door: plan, bellwether, evaluate, report.
// Exit codes: 0 success, 2 bad input or flags, 1 internal failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "belltree/bellwether.hpp"
#include "belltree/errors.hpp"
#include "belltree/experiment.hpp"
#include "belltree/rng.hpp"
#include "belltree/stats.hpp"

namespace fs = std::filesystem;
using namespace belltree;

namespace {

void write_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Err::IoError, "cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) fail(Err::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::IoError, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

struct CommonOptions {
    TreeParams tree;
    int n_trees = 25;
    uint64_t seed = 1;
};

void add_tree_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--max-depth", opt.tree.max_depth, "Maximum tree depth")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--min-support", opt.tree.min_support,
                    "Minimum instances per bin (0 = max(4, ceil(sqrt(n))))")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--min-gain", opt.tree.min_gain, "Minimum split gain in bits")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--planning-threshold", opt.tree.planning_threshold,
                    "Only plan for instances whose leaf probability reaches this")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--n-trees", opt.n_trees, "Trees in the verification forest (odd)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "Master seed; every random choice derives from it")
        ->capture_default_str();
}

int usage_error(const CLI::App& cmd, const std::string& msg) {
    std::cerr << "error: " << msg << "\n\n" << cmd.help();
    return 2;
}

// ---- plan ------------------------------------------------------------------

struct PlanConfig {
    CommonOptions common;
    std::string treatment = "xtree";
    std::string train_path, test_path;
    std::string family_dir, target_path;
    std::string out_path = "plans.json";
};

int cmd_plan(const CLI::App& cmd, const PlanConfig& cfg) {
    std::vector<InstancePlan> plans;
    if (lower(cfg.treatment) == "xtree") {
        if (cfg.train_path.empty() || cfg.test_path.empty())
            return usage_error(cmd, "xtree planning needs --train and --test");
        std::vector<ProjectDataset> pair{load_csv(cfg.train_path), load_csv(cfg.test_path)};
        align_schemas(pair);
        DecisionTree tree =
            build_tree(pair[0], cfg.common.tree, derive_seed(cfg.common.seed, "tree"));
        for (const auto& z : pair[1].instances)
            if (auto p = plan_for(tree, z)) plans.push_back({z.identifier, *p});
    } else {
        if (cfg.family_dir.empty() || cfg.target_path.empty())
            return usage_error(cmd, "belltree planning needs --family and --target");
        ProjectDataset target = load_csv(cfg.target_path);
        std::vector<ProjectDataset> family;
        for (auto& p : load_project_family(cfg.family_dir))
            if (p.name != target.name) family.push_back(std::move(p));
        BelltreeOutcome outcome =
            belltree_plan(family, target, cfg.common.tree, kDefaultSplitFractions,
                          cfg.common.seed);
        std::cerr << "bellwether: " << outcome.report.winner << "\n";
        plans = std::move(outcome.plans);
    }

    double drop = 0.0;
    for (const auto& p : plans) drop += p.plan.expected_probability_drop;
    if (!plans.empty()) drop /= static_cast<double>(plans.size());

    write_atomic(cfg.out_path, plans_to_json(plans) + "\n");
    char line[160];
    std::snprintf(line, sizeof line,
                  "%zu plans (mean expected probability drop %.3f) -> %s\n", plans.size(), drop,
                  cfg.out_path.c_str());
    std::cout << line;
    return 0;
}

// ---- bellwether ------------------------------------------------------------

struct BellwetherConfig {
    CommonOptions common;
    std::string family_dir;
    std::string out_path = "bellwether.json";
};

int cmd_bellwether(const BellwetherConfig& cfg) {
    std::vector<ProjectDataset> family = load_project_family(cfg.family_dir);
    BellwetherReport report = discover_bellwether(family, derive_seed(cfg.common.seed, "discover"),
                                                  cfg.common.n_trees, cfg.common.tree);
    write_atomic(cfg.out_path, bellwether_report_to_json(report) + "\n");
    std::cout << "bellwether: " << report.winner << " -> " << cfg.out_path << "\n";
    return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateConfig {
    CommonOptions common;
    std::string family_dir;
    std::string treatments = "xtree,belltree";
    int repeats = 30;
    std::string out_dir = "results";
    std::string format = "csv";
    double alpha = 0.05;
    double effect_threshold = 0.147;
};

std::vector<Treatment> parse_treatment_list(const std::string& csv) {
    std::vector<Treatment> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = parse_treatment(item);
        if (!t) fail(Err::InvalidParameter, "unknown treatment '" + item + "'");
        out.push_back(*t);
    }
    if (out.empty()) fail(Err::InvalidParameter, "no treatments given");
    return out;
}

int cmd_evaluate(const EvaluateConfig& cfg) {
    std::vector<Treatment> treatments = parse_treatment_list(cfg.treatments);
    std::vector<ProjectDataset> family = load_project_family(cfg.family_dir);

    ExperimentParams params;
    params.tree = cfg.common.tree;
    params.n_trees = cfg.common.n_trees;

    std::vector<ProjectReport> reports;
    for (const auto& target : family) {
        const uint64_t project_seed = derive_seed(cfg.common.seed, target.name);
        ProjectReport block;
        block.project = target.name;
        std::vector<std::pair<std::string, std::vector<double>>> groups;
        for (Treatment t : treatments) {
            ExperimentResult result = run_experiment(target, t, family, params, cfg.repeats,
                                                     derive_seed(project_seed, treatment_name(t)));
            std::string stem = target.name + "_" + lower(result.treatment);
            if (cfg.format == "json")
                write_atomic(cfg.out_dir + "/" + stem + ".json",
                             experiment_to_json(result) + "\n");
            else
                write_atomic(cfg.out_dir + "/" + stem + ".csv", experiment_to_csv(result));
            std::vector<double> scores = result.scores();
            if (scores.empty())
                std::cerr << "note: every repeat of " << result.treatment << " on " << target.name
                          << " had a zero baseline; nothing to rank\n";
            else
                groups.emplace_back(result.treatment, std::move(scores));
        }
        if (groups.empty()) continue;
        block.rows = rank_treatments(groups, cfg.alpha, cfg.effect_threshold);
        reports.push_back(std::move(block));
    }

    std::string text = render_report(reports);
    write_atomic(cfg.out_dir + "/report.txt", text);
    write_atomic(cfg.out_dir + "/summary.csv", summaries_to_csv(reports));
    std::cout << text;
    return 0;
}

// ---- report ----------------------------------------------------------------

struct ReportConfig {
    std::vector<std::string> inputs;
    std::string out_path;
    std::string csv_path;
    double alpha = 0.05;
    double effect_threshold = 0.147;
};

int cmd_report(const ReportConfig& cfg) {
    // project -> treatment -> scores, in first-appearance order
    std::vector<std::string> project_order;
    std::map<std::string, std::vector<std::pair<std::string, std::vector<double>>>> by_project;
    for (const auto& path : cfg.inputs) {
        ExperimentResult result = experiment_from_csv(slurp(path));
        if (!by_project.count(result.project)) project_order.push_back(result.project);
        auto& groups = by_project[result.project];
        std::vector<double> scores = result.scores();
        if (scores.empty()) continue;
        bool merged = false;
        for (auto& [name, values] : groups)
            if (name == result.treatment) {
                values.insert(values.end(), scores.begin(), scores.end());
                merged = true;
            }
        if (!merged) groups.emplace_back(result.treatment, std::move(scores));
    }

    std::vector<ProjectReport> reports;
    for (const auto& project : project_order) {
        auto& groups = by_project[project];
        if (groups.empty()) continue;
        reports.push_back({project, rank_treatments(groups, cfg.alpha, cfg.effect_threshold)});
    }

    std::string text = render_report(reports);
    std::cout << text;
    if (!cfg.out_path.empty()) write_atomic(cfg.out_path, text);
    if (!cfg.csv_path.empty()) write_atomic(cfg.csv_path, summaries_to_csv(reports));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Defect-reduction planning: within-project (XTREE) and cross-project "
                 "bellwether-transfer (BELLTREE) planners with a verification oracle."};
    app.require_subcommand(1);

    PlanConfig plan_cfg;
    CLI::App* plan = app.add_subcommand("plan", "Derive change plans for a test set");
    plan->add_option("--treatment", plan_cfg.treatment, "Planner: xtree or belltree")
        ->capture_default_str()
        ->check(CLI::IsMember({"xtree", "belltree"}, CLI::ignore_case));
    plan->add_option("--train", plan_cfg.train_path, "Training CSV (xtree)");
    plan->add_option("--test", plan_cfg.test_path, "CSV of instances to plan for (xtree)");
    plan->add_option("--family", plan_cfg.family_dir, "Directory of project CSVs (belltree)");
    plan->add_option("--target", plan_cfg.target_path, "CSV of instances to plan for (belltree)");
    plan->add_option("--out", plan_cfg.out_path, "Output plans JSON")->capture_default_str();
    add_tree_flags(plan, plan_cfg.common);

    BellwetherConfig bw_cfg;
    CLI::App* bw = app.add_subcommand("bellwether", "Elect the bellwether of a project family");
    bw->add_option("--family", bw_cfg.family_dir, "Directory of project CSVs")->required();
    bw->add_option("--out", bw_cfg.out_path, "Output report JSON")->capture_default_str();
    add_tree_flags(bw, bw_cfg.common);

    EvaluateConfig eval_cfg;
    CLI::App* eval = app.add_subcommand(
        "evaluate", "Run the plan/alter/re-predict experiment and rank treatments");
    eval->add_option("--family", eval_cfg.family_dir, "Directory of project CSVs")->required();
    eval->add_option("--treatments", eval_cfg.treatments, "Comma-separated treatment list")
        ->capture_default_str();
    eval->add_option("--repeats", eval_cfg.repeats, "Experiment repeats per project")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    eval->add_option("--out-dir", eval_cfg.out_dir, "Directory for result files and report")
        ->capture_default_str();
    eval->add_option("--format", eval_cfg.format, "Result file format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    eval->add_option("--alpha", eval_cfg.alpha, "Mann-Whitney significance level")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    eval->add_option("--effect-threshold", eval_cfg.effect_threshold,
                     "Cliff's delta below this is negligible")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    add_tree_flags(eval, eval_cfg.common);

    ReportConfig rep_cfg;
    CLI::App* rep = app.add_subcommand("report", "Summarize and rank saved result CSVs");
    rep->add_option("inputs", rep_cfg.inputs, "Result CSV files from evaluate")
        ->required()
        ->check(CLI::ExistingFile);
    rep->add_option("--out", rep_cfg.out_path, "Write the report here instead of stdout");
    rep->add_option("--csv", rep_cfg.csv_path, "Also write a summaries CSV");
    rep->add_option("--alpha", rep_cfg.alpha, "Mann-Whitney significance level")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    rep->add_option("--effect-threshold", rep_cfg.effect_threshold,
                    "Cliff's delta below this is negligible")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(plan)) return cmd_plan(*plan, plan_cfg);
        if (app.got_subcommand(bw)) return cmd_bellwether(bw_cfg);
        if (app.got_subcommand(eval)) return cmd_evaluate(eval_cfg);
        if (app.got_subcommand(rep)) return cmd_report(rep_cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
