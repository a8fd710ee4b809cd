#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "belltree/dataset.hpp"
#include "belltree/discretize.hpp"

namespace belltree {

struct TreeParams {
    int max_depth = 10;
    // 0 resolves to max(4, ceil(sqrt(n))) at build time.
    int min_support = 0;
    double min_gain = 1e-3; // bits
    // Plans are generated only for instances whose leaf probability reaches this.
    double planning_threshold = 0.5;
    // 0 = consider every unused feature at each node; forests set ceil(sqrt(d)).
    int features_per_node = 0;
};

// Tree node. feature/interval describe the edge from the parent: this node
// holds the instances whose value of `feature` lies in `interval`. The root
// carries no edge (empty feature, whole-line interval).
struct TreeNode {
    std::string feature;
    Interval interval = Interval::whole();
    double defect_probability = 0.0;
    int support = 0;
    int depth = 0;
    std::vector<TreeNode> children;

    bool is_leaf() const { return children.empty(); }
    // Feature tested at this node (feature of its children).
    const std::string& split_feature() const { return children.front().feature; }
};

struct DecisionTree {
    TreeNode root;
    MetricSchema schema;
    TreeParams params;
    int resolved_min_support = 0;
    // Population stddev per feature over the training data; the epsilon used
    // when a plan targets a half-unbounded interval.
    std::vector<double> feature_stddev;
};

// One per-feature instruction: keep as-is, or move the value into `target`.
// epsilon is the training stddev of the feature, frozen into the plan so that
// applying it needs no reference back to the tree.
struct Prescription {
    std::string feature;
    bool keep = false;
    Interval target = Interval::whole();
    double epsilon = 0.0;
};

// Contrast between the source and target leaves. Features absent from
// prescriptions are implicitly kept.
struct Plan {
    std::vector<Prescription> prescriptions;
    std::string source_leaf;
    std::string target_leaf;
    double expected_probability_drop = 0.0;

    const Prescription* find(const std::string& feature) const;
    bool empty() const { return prescriptions.empty(); }
};

// A plan tagged with the test instance it was generated for.
struct InstancePlan {
    std::string identifier;
    Plan plan;
};

// Grows the supervised tree: at every node the unused feature with maximal
// MDLP gain is split on, one child per bin, until depth/support/gain/purity
// stops. `seed` only matters when params.features_per_node > 0.
DecisionTree build_tree(const ProjectDataset& train, const TreeParams& params = {},
                        uint64_t seed = 0);

// The unique leaf whose edge intervals contain z's feature values.
const TreeNode& locate_leaf(const DecisionTree& tree, const Instance& z);

// Nearest leaf with strictly lower defect probability; edge distance through
// the lowest common ancestor, ties broken by lower probability, then higher
// support, then preorder position. Null when no strictly better leaf exists.
const TreeNode* select_desired_leaf(const DecisionTree& tree, const TreeNode& current);

// The contrast set between two leaves: a move-to prescription for every edge
// of the desired path that the current path does not already satisfy.
Plan delta_plan(const DecisionTree& tree, const TreeNode& current, const TreeNode& desired);

// Applies the plan to a copy of z: bounded targets get the interval midpoint,
// half-unbounded ones sit epsilon inside the finite end.
Instance apply_plan(const MetricSchema& schema, const Instance& z, const Plan& plan);

// locate -> select -> delta, gated by the planning threshold.
std::optional<Plan> plan_for(const DecisionTree& tree, const Instance& z);

// Root-to-node chain (inclusive); empty when the node is not in the tree.
std::vector<const TreeNode*> path_to(const TreeNode& root, const TreeNode& target);

// Preorder list of leaves.
std::vector<const TreeNode*> collect_leaves(const DecisionTree& tree);

// Slash-joined edge labels, "root" for the root itself.
std::string leaf_label(const DecisionTree& tree, const TreeNode& leaf);

// Deterministic serializations.
std::string tree_to_json(const DecisionTree& tree, int indent = 2);
std::string plans_to_json(const std::vector<InstancePlan>& plans, int indent = 2);

} // namespace belltree
