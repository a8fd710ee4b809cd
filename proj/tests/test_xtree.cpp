// Tree construction, leaf location, desired-leaf selection, contrast plans,
// and plan application.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "belltree/dataset.hpp"
#include "belltree/errors.hpp"
#include "belltree/xtree.hpp"

using namespace belltree;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ProjectDataset one_feature(const std::string& feature, std::vector<double> values,
                           std::vector<int> bugs) {
    ProjectDataset d;
    d.name = "fix";
    d.schema.feature_names = {feature};
    d.schema.target_column = "bug";
    for (size_t i = 0; i < values.size(); ++i) {
        Instance z;
        z.identifier = "fix#" + std::to_string(i);
        z.features = {values[i]};
        z.defect_count = bugs[i];
        z.defective = bugs[i] > 0;
        d.instances.push_back(z);
    }
    return d;
}

Instance probe(std::vector<double> features) {
    Instance z;
    z.identifier = "probe";
    z.features = std::move(features);
    return z;
}

// Depth-2 fixture tree:
//   root
//     rfc [10, inf)
//       loc [20, inf)   p = 1.0   <- "current" in the selection example
//       loc (-inf, 20)  p = 0.4
//     rfc (-inf, 10)
//       loc (-inf, 20)  p = 0.1
//       loc [20, inf)   p = 0.9
DecisionTree depth2_fixture() {
    DecisionTree t;
    t.schema.feature_names = {"rfc", "loc"};
    t.schema.target_column = "bug";
    t.feature_stddev = {1.0, 1.0};

    auto leaf = [](const std::string& f, Interval in, double p, int support, int depth) {
        TreeNode n;
        n.feature = f;
        n.interval = in;
        n.defect_probability = p;
        n.support = support;
        n.depth = depth;
        return n;
    };

    TreeNode hi = leaf("rfc", {10.0, kInf}, 0.7, 10, 1);
    hi.children.push_back(leaf("loc", {20.0, kInf}, 1.0, 5, 2));
    hi.children.push_back(leaf("loc", {-kInf, 20.0}, 0.4, 5, 2));

    TreeNode lo = leaf("rfc", {-kInf, 10.0}, 0.5, 10, 1);
    lo.children.push_back(leaf("loc", {-kInf, 20.0}, 0.1, 5, 2));
    lo.children.push_back(leaf("loc", {20.0, kInf}, 0.9, 5, 2));

    t.root.support = 20;
    t.root.defect_probability = 0.6;
    t.root.children = {hi, lo};
    return t;
}

const TreeNode& worst_leaf(const DecisionTree& t) { return t.root.children[0].children[0]; }

void check_conservation(const TreeNode& n) {
    if (n.is_leaf()) return;
    int support = 0;
    double defects = 0.0;
    for (const auto& c : n.children) {
        support += c.support;
        defects += c.support * c.defect_probability;
        check_conservation(c);
    }
    CHECK(support == n.support);
    CHECK(defects == doctest::Approx(n.support * n.defect_probability).epsilon(1e-9));
}

} // namespace

TEST_CASE("build_tree on a single-class dataset is one leaf") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 4, 5, 6}, {0, 0, 0, 0, 0, 0});
    DecisionTree t = build_tree(d);
    CHECK(t.root.is_leaf());
    CHECK(t.root.defect_probability == 0.0);
    CHECK(t.root.support == 6);
}

TEST_CASE("build_tree splits the two-run fixture at 6.5 into pure leaves") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
    TreeParams params;
    params.min_support = 2;
    DecisionTree t = build_tree(d, params);
    REQUIRE(t.root.children.size() == 2);
    CHECK(t.root.split_feature() == "loc");
    const TreeNode& low = t.root.children[0];
    const TreeNode& high = t.root.children[1];
    CHECK(low.interval == Interval{-kInf, 6.5});
    CHECK(high.interval == Interval{6.5, kInf});
    CHECK(low.defect_probability == 0.0);
    CHECK(high.defect_probability == 1.0);
    CHECK(low.support == 3);
    CHECK(high.support == 3);
}

TEST_CASE("locate_leaf follows intervals, half-open at the cut") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
    TreeParams params;
    params.min_support = 2;
    DecisionTree t = build_tree(d, params);

    CHECK(locate_leaf(t, probe({50.0})).defect_probability == 1.0);
    CHECK(locate_leaf(t, probe({3.0})).defect_probability == 0.0);
    CHECK(locate_leaf(t, probe({6.5})).defect_probability == 1.0); // boundary goes right

    ProjectDataset single = one_feature("loc", {1, 2, 3}, {0, 0, 0});
    DecisionTree s = build_tree(single);
    CHECK(&locate_leaf(s, probe({99.0})) == &s.root);
}

TEST_CASE("select_desired_leaf prefers the nearer leaf over the better one") {
    DecisionTree t = depth2_fixture();
    const TreeNode* desired = select_desired_leaf(t, worst_leaf(t));
    REQUIRE(desired != nullptr);
    CHECK(desired->defect_probability == 0.4); // distance 2 beats the 0.1 leaf at distance 4
}

TEST_CASE("select_desired_leaf returns null at the best leaf") {
    DecisionTree t = depth2_fixture();
    const TreeNode& best = t.root.children[1].children[0];
    CHECK(select_desired_leaf(t, best) == nullptr);
}

TEST_CASE("select_desired_leaf on a two-leaf tree picks the only candidate") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
    TreeParams params;
    params.min_support = 2;
    DecisionTree t = build_tree(d, params);
    const TreeNode& high = t.root.children[1];
    const TreeNode* desired = select_desired_leaf(t, high);
    REQUIRE(desired != nullptr);
    CHECK(desired->defect_probability == 0.0);
}

TEST_CASE("select_desired_leaf rejects internal nodes") {
    DecisionTree t = depth2_fixture();
    CHECK_THROWS_AS(select_desired_leaf(t, t.root.children[0]), Error);
}

TEST_CASE("delta_plan emits only the differing edges") {
    DecisionTree t = depth2_fixture();
    const TreeNode& current = worst_leaf(t);

    Plan same = delta_plan(t, current, current);
    CHECK(same.empty());
    CHECK(same.expected_probability_drop == 0.0);

    const TreeNode& sibling = t.root.children[0].children[1];
    Plan p = delta_plan(t, current, sibling);
    REQUIRE(p.prescriptions.size() == 1); // rfc edge is shared, only loc differs
    CHECK(p.prescriptions[0].feature == "loc");
    CHECK(p.prescriptions[0].target == Interval{-kInf, 20.0});
    CHECK(p.expected_probability_drop == doctest::Approx(0.6));
}

TEST_CASE("delta_plan on the two-leaf tree moves loc below the cut") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
    TreeParams params;
    params.min_support = 2;
    DecisionTree t = build_tree(d, params);
    Plan p = delta_plan(t, t.root.children[1], t.root.children[0]);
    REQUIRE(p.prescriptions.size() == 1);
    CHECK(p.prescriptions[0].feature == "loc");
    CHECK(p.prescriptions[0].target == Interval{-kInf, 6.5});
    CHECK(p.expected_probability_drop == doctest::Approx(1.0));
}

TEST_CASE("apply_plan: empty plan is the identity") {
    MetricSchema schema;
    schema.feature_names = {"loc"};
    Instance z = probe({50.0});
    Instance out = apply_plan(schema, z, Plan{});
    CHECK(out.features == z.features);
    CHECK(out.identifier == z.identifier);
}

TEST_CASE("apply_plan: bounded interval targets the midpoint") {
    MetricSchema schema;
    schema.feature_names = {"loc"};
    Plan p;
    p.prescriptions.push_back({"loc", false, Interval{10.0, 20.0}, 1.0});
    Instance out = apply_plan(schema, probe({50.0}), p);
    CHECK(out.features[0] == doctest::Approx(15.0));
}

TEST_CASE("apply_plan: unbounded-below interval sits one stddev under the cut") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
    TreeParams params;
    params.min_support = 2;
    DecisionTree t = build_tree(d, params);
    // population stddev of {1,2,3,10,11,12} = 4.5735; plan epsilon carries it
    CHECK(t.feature_stddev[0] == doctest::Approx(4.5735).epsilon(1e-4));

    Instance z = probe({50.0});
    auto plan = plan_for(t, z);
    REQUIRE(plan.has_value());
    Instance out = apply_plan(d.schema, z, *plan);
    CHECK(out.features[0] == doctest::Approx(1.9265).epsilon(1e-3));
}

TEST_CASE("apply_plan rejects a prescription for an unknown feature") {
    MetricSchema schema;
    schema.feature_names = {"loc"};
    Plan p;
    p.prescriptions.push_back({"wmc", false, Interval{0.0, 1.0}, 1.0});
    CHECK_THROWS_AS(apply_plan(schema, probe({50.0}), p), Error);
}

TEST_CASE("plan_for composes the three questions and gates on the threshold") {
    ProjectDataset d = one_feature("loc", {1, 2, 3, 10, 11, 12}, {0, 0, 0, 1, 1, 1});
    TreeParams params;
    params.min_support = 2;
    DecisionTree t = build_tree(d, params);

    CHECK(!plan_for(t, probe({2.0})).has_value()); // already at the best leaf

    auto p = plan_for(t, probe({11.0}));
    REQUIRE(p.has_value());
    CHECK(p->prescriptions[0].feature == "loc");

    // a leaf below the planning threshold gets no plan even when better leaves exist
    DecisionTree fixture = depth2_fixture();
    fixture.root.children[0].children[0].defect_probability = 0.3;
    CHECK(!plan_for(fixture, probe({15.0, 25.0})).has_value());
}

TEST_CASE("support and defect mass are conserved at every split") {
    for (const char* path : {"data/ck/ant.csv", "data/ck/poi.csv"}) {
        ProjectDataset d = load_csv(path);
        DecisionTree t = build_tree(d);
        check_conservation(t.root);
    }
}

TEST_CASE("plans prescribe at most desired-depth features and claim a real drop") {
    ProjectDataset d = load_csv("data/ck/jedit.csv");
    ThreeWaySplit split = three_way_split(d, kDefaultSplitFractions, 17);
    DecisionTree t = build_tree(split.planner_train);
    int planned = 0;
    for (const auto& z : split.test.instances) {
        auto p = plan_for(t, z);
        if (!p) continue;
        ++planned;
        CHECK(p->expected_probability_drop > 0.0);
        const TreeNode& current = locate_leaf(t, z);
        const TreeNode* desired = select_desired_leaf(t, current);
        REQUIRE(desired != nullptr);
        CHECK(int(p->prescriptions.size()) <= desired->depth);

        Instance moved = apply_plan(split.test.schema, z, *p);
        CHECK(leaf_label(t, locate_leaf(t, moved)) == p->target_leaf);
    }
    CHECK(planned > 0);
}

TEST_CASE("identical inputs give byte-identical serialized trees and plans") {
    ProjectDataset d = load_csv("data/ck/ivy.csv");
    ThreeWaySplit split = three_way_split(d, kDefaultSplitFractions, 4);
    DecisionTree a = build_tree(split.planner_train);
    DecisionTree b = build_tree(split.planner_train);
    CHECK(tree_to_json(a) == tree_to_json(b));

    std::vector<InstancePlan> pa, pb;
    for (const auto& z : split.test.instances) {
        if (auto p = plan_for(a, z)) pa.push_back({z.identifier, *p});
        if (auto p = plan_for(b, z)) pb.push_back({z.identifier, *p});
    }
    CHECK(plans_to_json(pa) == plans_to_json(pb));
}

TEST_CASE("tree edges reuse no feature along a path") {
    ProjectDataset d = load_csv("data/ck/ant.csv");
    DecisionTree t = build_tree(d);
    struct Walker {
        void walk(const TreeNode& n, std::vector<std::string> used) {
            if (!n.feature.empty()) {
                for (const auto& f : used) CHECK(f != n.feature);
                used.push_back(n.feature);
            }
            for (const auto& c : n.children) walk(c, used);
        }
    } w;
    w.walk(t.root, {});
}
