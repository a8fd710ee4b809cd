#include "belltree/xtree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

#include "belltree/errors.hpp"
#include "belltree/rng.hpp"

namespace belltree {

using ordered_json = nlohmann::ordered_json;

const Prescription* Plan::find(const std::string& feature) const {
    for (const auto& p : prescriptions)
        if (p.feature == feature) return &p;
    return nullptr;
}

namespace {

struct Builder {
    const ProjectDataset& train;
    const TreeParams& params;
    int min_support;
    std::vector<uint8_t> labels;
    Rng rng;

    TreeNode grow(const std::vector<size_t>& rows, int depth, std::vector<char>& used) {
        TreeNode node;
        node.depth = depth;
        node.support = static_cast<int>(rows.size());
        size_t pos = 0;
        for (size_t r : rows) pos += labels[r];
        node.defect_probability =
            rows.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(rows.size());

        if (depth >= params.max_depth) return node;
        if (rows.size() < 2 * static_cast<size_t>(min_support)) return node;
        if (pos == 0 || pos == rows.size()) return node;

        std::vector<int> candidates;
        const int d = static_cast<int>(train.schema.feature_names.size());
        for (int f = 0; f < d; ++f)
            if (!used[static_cast<size_t>(f)]) candidates.push_back(f);
        if (candidates.empty()) return node;
        if (params.features_per_node > 0 &&
            static_cast<size_t>(params.features_per_node) < candidates.size()) {
            // Partial Fisher-Yates, then restore ascending order so the
            // schema-order tie-break below stays meaningful.
            for (int i = 0; i < params.features_per_node; ++i) {
                size_t j = i + static_cast<size_t>(
                                   draw_below(rng, candidates.size() - static_cast<size_t>(i)));
                std::swap(candidates[static_cast<size_t>(i)], candidates[j]);
            }
            candidates.resize(static_cast<size_t>(params.features_per_node));
            std::sort(candidates.begin(), candidates.end());
        }

        std::vector<uint8_t> row_labels;
        row_labels.reserve(rows.size());
        for (size_t r : rows) row_labels.push_back(labels[r]);

        int best_feature = -1;
        FeatureBins best_bins;
        for (int f : candidates) {
            std::vector<double> vals;
            vals.reserve(rows.size());
            for (size_t r : rows) vals.push_back(train.instances[r].features[static_cast<size_t>(f)]);
            FeatureBins bins = mdlp_bins(train.schema.feature_names[static_cast<size_t>(f)], vals,
                                         row_labels, min_support);
            if (bins.cuts.empty()) continue;
            if (best_feature < 0 || bins.gain > best_bins.gain) {
                best_feature = f;
                best_bins = std::move(bins);
            }
        }
        if (best_feature < 0 || best_bins.gain < params.min_gain) return node;

        std::vector<std::vector<size_t>> child_rows(best_bins.interval_count());
        for (size_t r : rows) {
            double v = train.instances[r].features[static_cast<size_t>(best_feature)];
            child_rows[best_bins.index_of(v)].push_back(r);
        }

        used[static_cast<size_t>(best_feature)] = 1;
        node.children.reserve(child_rows.size());
        for (size_t i = 0; i < child_rows.size(); ++i) {
            TreeNode child = grow(child_rows[i], depth + 1, used);
            child.feature = best_bins.feature;
            child.interval = best_bins.interval_at(i);
            node.children.push_back(std::move(child));
        }
        used[static_cast<size_t>(best_feature)] = 0;
        return node;
    }
};

void find_path(const TreeNode& node, const TreeNode& target,
               std::vector<const TreeNode*>& stack, std::vector<const TreeNode*>& out) {
    stack.push_back(&node);
    if (&node == &target) {
        out = stack;
    } else {
        for (const auto& child : node.children) {
            if (!out.empty()) break;
            find_path(child, target, stack, out);
        }
    }
    stack.pop_back();
}

std::string interval_label(const std::string& feature, const Interval& iv) {
    return feature + "=" + iv.to_string();
}

ordered_json interval_json(const Interval& iv) {
    ordered_json j;
    j["low"] = iv.bounded_below() ? ordered_json(iv.low) : ordered_json(nullptr);
    j["high"] = iv.bounded_above() ? ordered_json(iv.high) : ordered_json(nullptr);
    return j;
}

ordered_json node_json(const TreeNode& node) {
    ordered_json j;
    if (!node.feature.empty()) {
        j["feature"] = node.feature;
        j["interval"] = interval_json(node.interval);
    }
    j["defect_probability"] = node.defect_probability;
    j["support"] = node.support;
    j["depth"] = node.depth;
    if (!node.is_leaf()) {
        ordered_json kids = ordered_json::array();
        for (const auto& c : node.children) kids.push_back(node_json(c));
        j["children"] = std::move(kids);
    }
    return j;
}

} // namespace

DecisionTree build_tree(const ProjectDataset& train, const TreeParams& params, uint64_t seed) {
    if (train.instances.empty()) fail(Err::EmptyTrainingSet, "build_tree on " + train.name);
    DecisionTree tree;
    tree.schema = train.schema;
    tree.params = params;
    tree.resolved_min_support =
        params.min_support > 0
            ? params.min_support
            : std::max(4, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(train.size())))));
    tree.feature_stddev = train.feature_stddevs();

    Builder builder{train, params, tree.resolved_min_support, {}, Rng(derive_seed(seed, "tree"))};
    builder.labels.reserve(train.size());
    for (const auto& z : train.instances) builder.labels.push_back(z.defective ? 1 : 0);

    std::vector<size_t> rows(train.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<char> used(train.schema.feature_names.size(), 0);
    tree.root = builder.grow(rows, 0, used);
    return tree;
}

const TreeNode& locate_leaf(const DecisionTree& tree, const Instance& z) {
    const TreeNode* node = &tree.root;
    while (!node->is_leaf()) {
        int f = tree.schema.feature_index(node->split_feature());
        if (f < 0 || static_cast<size_t>(f) >= z.features.size())
            fail(Err::UnknownFeature, "instance lacks feature '" + node->split_feature() + "'");
        double v = z.features[static_cast<size_t>(f)];
        const TreeNode* next = nullptr;
        for (const auto& child : node->children) {
            if (child.interval.contains(v)) {
                next = &child;
                break;
            }
        }
        if (!next)
            fail(Err::InvalidParameter, "no child interval contains " + std::to_string(v) +
                                            " for feature '" + node->split_feature() + "'");
        node = next;
    }
    return *node;
}

std::vector<const TreeNode*> path_to(const TreeNode& root, const TreeNode& target) {
    std::vector<const TreeNode*> stack, out;
    find_path(root, target, stack, out);
    return out;
}

std::vector<const TreeNode*> collect_leaves(const DecisionTree& tree) {
    std::vector<const TreeNode*> leaves;
    std::function<void(const TreeNode&)> walk = [&](const TreeNode& n) {
        if (n.is_leaf()) leaves.push_back(&n);
        for (const auto& c : n.children) walk(c);
    };
    walk(tree.root);
    return leaves;
}

std::string leaf_label(const DecisionTree& tree, const TreeNode& leaf) {
    auto path = path_to(tree.root, leaf);
    if (path.empty()) fail(Err::InvalidParameter, "node is not part of this tree");
    if (path.size() == 1) return "root";
    std::string label;
    for (size_t i = 1; i < path.size(); ++i) {
        if (i > 1) label += "/";
        label += interval_label(path[i]->feature, path[i]->interval);
    }
    return label;
}

const TreeNode* select_desired_leaf(const DecisionTree& tree, const TreeNode& current) {
    if (!current.is_leaf()) fail(Err::NotALeaf, "select_desired_leaf needs a leaf");
    auto current_path = path_to(tree.root, current);
    if (current_path.empty()) fail(Err::InvalidParameter, "leaf is not part of this tree");

    auto leaves = collect_leaves(tree);
    const TreeNode* best = nullptr;
    size_t best_dist = 0;
    size_t best_order = 0;
    for (size_t order = 0; order < leaves.size(); ++order) {
        const TreeNode* leaf = leaves[order];
        if (leaf == &current) continue;
        if (leaf->defect_probability >= current.defect_probability) continue;
        auto leaf_path = path_to(tree.root, *leaf);
        size_t common = 0;
        while (common < leaf_path.size() && common < current_path.size() &&
               leaf_path[common] == current_path[common])
            ++common;
        size_t dist = (current_path.size() - common) + (leaf_path.size() - common);
        bool better = false;
        if (!best) {
            better = true;
        } else if (dist != best_dist) {
            better = dist < best_dist;
        } else if (leaf->defect_probability != best->defect_probability) {
            better = leaf->defect_probability < best->defect_probability;
        } else if (leaf->support != best->support) {
            better = leaf->support > best->support;
        } else {
            better = order < best_order;
        }
        if (better) {
            best = leaf;
            best_dist = dist;
            best_order = order;
        }
    }
    return best;
}

Plan delta_plan(const DecisionTree& tree, const TreeNode& current, const TreeNode& desired) {
    if (!current.is_leaf() || !desired.is_leaf()) fail(Err::NotALeaf, "delta_plan needs leaves");
    auto cur_path = path_to(tree.root, current);
    auto des_path = path_to(tree.root, desired);
    if (cur_path.empty() || des_path.empty())
        fail(Err::InvalidParameter, "leaf is not part of this tree");

    Plan plan;
    plan.source_leaf = leaf_label(tree, current);
    plan.target_leaf = leaf_label(tree, desired);
    plan.expected_probability_drop = current.defect_probability - desired.defect_probability;

    for (size_t i = 1; i < des_path.size(); ++i) {
        const TreeNode* edge = des_path[i];
        const TreeNode* cur_edge = nullptr;
        for (size_t j = 1; j < cur_path.size(); ++j) {
            if (cur_path[j]->feature == edge->feature) {
                cur_edge = cur_path[j];
                break;
            }
        }
        if (cur_edge && cur_edge->interval == edge->interval) continue;
        Prescription p;
        p.feature = edge->feature;
        p.keep = false;
        p.target = edge->interval;
        int f = tree.schema.feature_index(edge->feature);
        p.epsilon = f >= 0 ? tree.feature_stddev[static_cast<size_t>(f)] : 0.0;
        plan.prescriptions.push_back(std::move(p));
    }
    return plan;
}

Instance apply_plan(const MetricSchema& schema, const Instance& z, const Plan& plan) {
    Instance out = z;
    for (const auto& p : plan.prescriptions) {
        int f = schema.feature_index(p.feature);
        if (f < 0) fail(Err::UnknownFeature, "plan feature '" + p.feature + "' not in schema");
        if (p.keep) continue;
        const Interval& iv = p.target;
        double v;
        if (iv.bounded_below() && iv.bounded_above()) {
            v = (iv.low + iv.high) / 2.0;
        } else if (iv.bounded_above()) {
            v = iv.high - p.epsilon;
        } else if (iv.bounded_below()) {
            v = iv.low + p.epsilon;
        } else {
            continue; // whole-line target: nothing to move
        }
        if (!iv.contains(v)) {
            // Degenerate epsilon or rounding; pin just inside the finite end.
            if (iv.bounded_above() && v >= iv.high)
                v = std::nextafter(iv.high, -std::numeric_limits<double>::infinity());
            if (iv.bounded_below() && v < iv.low) v = iv.low;
        }
        out.features[static_cast<size_t>(f)] = v;
    }
    return out;
}

std::optional<Plan> plan_for(const DecisionTree& tree, const Instance& z) {
    const TreeNode& leaf = locate_leaf(tree, z);
    if (leaf.defect_probability < tree.params.planning_threshold) return std::nullopt;
    const TreeNode* desired = select_desired_leaf(tree, leaf);
    if (!desired) return std::nullopt;
    return delta_plan(tree, leaf, *desired);
}

std::string tree_to_json(const DecisionTree& tree, int indent) {
    ordered_json j;
    j["schema"] = ordered_json{{"features", tree.schema.feature_names},
                               {"target", tree.schema.target_column}};
    j["params"] = ordered_json{{"max_depth", tree.params.max_depth},
                               {"min_support", tree.resolved_min_support},
                               {"min_gain", tree.params.min_gain},
                               {"planning_threshold", tree.params.planning_threshold},
                               {"features_per_node", tree.params.features_per_node}};
    j["root"] = node_json(tree.root);
    return j.dump(indent);
}

std::string plans_to_json(const std::vector<InstancePlan>& plans, int indent) {
    ordered_json arr = ordered_json::array();
    for (const auto& ip : plans) {
        ordered_json j;
        j["identifier"] = ip.identifier;
        j["source_leaf"] = ip.plan.source_leaf;
        j["target_leaf"] = ip.plan.target_leaf;
        j["expected_probability_drop"] = ip.plan.expected_probability_drop;
        ordered_json pres = ordered_json::array();
        for (const auto& p : ip.plan.prescriptions) {
            ordered_json pj;
            pj["feature"] = p.feature;
            pj["low"] = p.target.bounded_below() ? ordered_json(p.target.low) : ordered_json(nullptr);
            pj["high"] =
                p.target.bounded_above() ? ordered_json(p.target.high) : ordered_json(nullptr);
            pres.push_back(std::move(pj));
        }
        j["prescriptions"] = std::move(pres);
        arr.push_back(std::move(j));
    }
    return arr.dump(indent);
}

} // namespace belltree
