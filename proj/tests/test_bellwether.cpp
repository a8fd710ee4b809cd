// Transfer scoring, bellwether election, and cross-project planning.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "belltree/bellwether.hpp"
#include "belltree/dataset.hpp"
#include "belltree/errors.hpp"
#include "belltree/rng.hpp"

using namespace belltree;

namespace {

// Shared two-feature concept: defective iff f0 > 50 with a wide margin.
// `flip` inverts the labels, which makes a project's trees anti-predictive
// on every straight project.
ProjectDataset concept_project(const std::string& name, int n, uint64_t seed,
                               bool flip = false) {
    ProjectDataset d;
    d.name = name;
    d.schema.feature_names = {"f0", "f1"};
    d.schema.target_column = "bug";
    uint64_t state = seed * 2654435761ULL + 17;
    auto next = [&state]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>((state >> 33) & 0xffff) / 65535.0;
    };
    for (int i = 0; i < n; ++i) {
        Instance z;
        z.identifier = name + "#" + std::to_string(i);
        bool high = i % 2 == 0;
        double f0 = high ? 70.0 + 20.0 * next() : 10.0 + 20.0 * next();
        bool defective = flip ? !high : high;
        z.features = {f0, next() * 100.0};
        z.defect_count = defective ? 1 : 0;
        z.defective = defective;
        d.instances.push_back(z);
    }
    return d;
}

std::vector<std::string> ids_of(const ProjectDataset& d) {
    std::vector<std::string> out;
    for (const auto& z : d.instances) out.push_back(z.identifier);
    return out;
}

} // namespace

TEST_CASE("g-score worked examples") {
    CHECK(g_score(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(g_score(0.8, 0.2) == doctest::Approx(0.8));
    // an everything-is-defective classifier: perfect recall, total false alarm
    CHECK(g_score(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(g_score(0.0, 0.0) == doctest::Approx(0.0));
    // harmonic mean punishes imbalance below the arithmetic mean
    CHECK(g_score(0.9, 0.5) == doctest::Approx(2 * 0.9 * 0.5 / 1.4));
    CHECK(g_score(0.9, 0.5) < (0.9 + 0.5) / 2.0);
}

TEST_CASE("g-score stays inside the unit interval") {
    for (double recall : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (double fa : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            double g = g_score(recall, fa);
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
        }
}

TEST_CASE("transfer score is high between projects sharing a concept") {
    ProjectDataset a = concept_project("a", 120, 1);
    ProjectDataset b = concept_project("b", 120, 2);
    ProjectDataset c = concept_project("c", 120, 3, true);
    CHECK(transfer_score(a, b, 5) > 0.9);
    CHECK(transfer_score(a, c, 5) < 0.1); // labels inverted: recall collapses
}

TEST_CASE("discovery needs at least two projects") {
    try {
        discover_bellwether({concept_project("solo", 60, 1)}, 1);
        FAIL("expected FewerThanTwoProjects");
    } catch (const Error& e) {
        CHECK(e.code() == Err::FewerThanTwoProjects);
    }
}

TEST_CASE("the odd project out loses the election") {
    std::vector<ProjectDataset> family = {
        concept_project("a", 100, 1),
        concept_project("b", 100, 2),
        concept_project("d", 100, 4),
        concept_project("c", 100, 3, true), // inverted labels
    };
    BellwetherReport report = discover_bellwether(family, 9);
    CHECK(report.winner != "c");
    REQUIRE(report.medians.size() == 4);
    double winner_median = -1.0, c_median = -1.0;
    for (const auto& [name, m] : report.medians) {
        if (name == report.winner) winner_median = m;
        if (name == "c") c_median = m;
    }
    CHECK(winner_median > c_median);

    // diagonal is left out of both the matrix scores and the medians
    for (size_t i = 0; i < family.size(); ++i) CHECK(std::isnan(report.matrix.scores[i][i]));
}

TEST_CASE("ties between identical projects go to the lexicographically first name") {
    ProjectDataset base = concept_project("x", 80, 6);
    auto renamed = [&base](const std::string& name) {
        ProjectDataset d = base;
        d.name = name;
        for (size_t i = 0; i < d.instances.size(); ++i)
            d.instances[i].identifier = name + "#" + std::to_string(i);
        return d;
    };
    std::vector<ProjectDataset> family = {renamed("beta"), renamed("alpha"), renamed("gamma")};
    CHECK(discover_bellwether(family, 3).winner == "alpha");
}

TEST_CASE("the winner does not depend on the family's ordering") {
    std::vector<ProjectDataset> family = {
        concept_project("a", 100, 1),
        concept_project("b", 100, 2),
        concept_project("c", 100, 3, true),
    };
    BellwetherReport forward = discover_bellwether(family, 11);
    std::reverse(family.begin(), family.end());
    BellwetherReport backward = discover_bellwether(family, 11);
    CHECK(forward.winner == backward.winner);

    // the matrix itself is the same cells, permuted with the projects
    auto cell = [](const BellwetherReport& r, const std::string& ti, const std::string& tj) {
        size_t i = 0, j = 0;
        for (size_t k = 0; k < r.matrix.projects.size(); ++k) {
            if (r.matrix.projects[k] == ti) i = k;
            if (r.matrix.projects[k] == tj) j = k;
        }
        return r.matrix.scores[i][j];
    };
    for (const auto& ti : {"a", "b", "c"})
        for (const auto& tj : {"a", "b", "c"})
            if (std::string(ti) != tj) CHECK(cell(forward, ti, tj) == cell(backward, ti, tj));
}

TEST_CASE("a single candidate wins unopposed") {
    BellwetherReport report = elect_bellwether({concept_project("only", 60, 2)}, 5);
    CHECK(report.winner == "only");
    CHECK(report.matrix.projects == std::vector<std::string>{"only"});
    CHECK(std::isnan(report.medians[0].second));
}

TEST_CASE("electing from nothing fails") {
    try {
        elect_bellwether({}, 1);
        FAIL("expected FewerThanTwoProjects");
    } catch (const Error& e) {
        CHECK(e.code() == Err::FewerThanTwoProjects);
    }
}

TEST_CASE("belltree_plan refuses a family that contains the target") {
    ProjectDataset target = concept_project("t", 60, 1);
    std::vector<ProjectDataset> family = {concept_project("t", 60, 2),
                                          concept_project("u", 60, 3)};
    try {
        belltree_plan(family, target);
        FAIL("expected TargetInFamily");
    } catch (const Error& e) {
        CHECK(e.code() == Err::TargetInFamily);
    }
}

TEST_CASE("belltree_plan plans the target with the bellwether's tree") {
    ProjectDataset bw = concept_project("bell", 160, 7);
    ProjectDataset target = concept_project("tgt", 80, 8);
    BelltreeOutcome out = belltree_plan({bw}, target, {}, kDefaultSplitFractions, 3);

    CHECK(out.report.winner == "bell");
    CHECK(!out.plans.empty());

    // the tree is grown on the bellwether's planner split, never on the target
    std::set<std::string> bw_ids;
    for (const auto& id : ids_of(bw)) bw_ids.insert(id);
    CHECK(out.planner_train_ids.size() == 80); // half of the bellwether
    for (const auto& id : out.planner_train_ids) CHECK(bw_ids.count(id) == 1);
    for (const auto& id : ids_of(target)) CHECK(bw_ids.count(id) == 0);

    // every plan belongs to a target instance and moves f0 below the cut
    std::set<std::string> target_ids;
    for (const auto& id : ids_of(target)) target_ids.insert(id);
    for (const auto& ip : out.plans) {
        CHECK(target_ids.count(ip.identifier) == 1);
        const Prescription* p = ip.plan.find("f0");
        REQUIRE(p != nullptr);
        CHECK(!p->target.bounded_below());
        CHECK(ip.plan.expected_probability_drop > 0.0);
    }
}

TEST_CASE("ck family: poi is the bellwether, jedit when poi is the target") {
    auto family = load_project_family("data/ck");
    REQUIRE(family.size() == 4);

    BellwetherReport full = discover_bellwether(family, derive_seed(1, "discover"));
    CHECK(full.winner == "poi");

    std::vector<ProjectDataset> minus_poi;
    ProjectDataset poi;
    for (const auto& p : family) {
        if (p.name == "poi") poi = p;
        else minus_poi.push_back(p);
    }
    BelltreeOutcome out = belltree_plan(minus_poi, poi, {}, kDefaultSplitFractions, 1);
    CHECK(out.report.winner == "jedit");
    CHECK(out.plans.size() > 0);

    std::set<std::string> poi_ids;
    for (const auto& id : ids_of(poi)) poi_ids.insert(id);
    for (const auto& id : out.planner_train_ids) CHECK(poi_ids.count(id) == 0);
}
