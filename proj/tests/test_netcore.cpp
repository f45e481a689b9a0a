#include <cmath>
#include <set>

#include "doctest.h"
#include "qbn/netcore.hpp"
#include "qbn/protocols.hpp"
#include "qbn/rng.hpp"

using namespace qbn;

namespace {

Mat col(std::initializer_list<Cplx> v) {
    Mat m(int(v.size()), 1);
    int i = 0;
    for (const auto& c : v) m(i++, 0) = c;
    return m;
}

// a -> b chain with a deterministic copy.
QbNet copy_chain() {
    std::vector<NodeSpec> nodes = {{"a", {2}, {}}, {"b", {2}, {"a"}}};
    Mat mb = Mat::identity(2);
    return QbNet(LabeledDag(std::move(nodes)), {col({1.0, 0.0}), std::move(mb)});
}

}  // namespace

TEST_CASE("topological order") {
    SUBCASE("chain") {
        std::vector<NodeSpec> nodes = {{"c", {2}, {"b"}}, {"b", {2}, {"a"}}, {"a", {2}, {}}};
        LabeledDag dag(nodes);
        std::vector<int> order = topological_order(dag);
        CHECK(order == std::vector<int>{2, 1, 0});
    }
    SUBCASE("single node") {
        LabeledDag dag(std::vector<NodeSpec>{{"a", {3}, {}}});
        CHECK(topological_order(dag) == std::vector<int>{0});
    }
    SUBCASE("diverging ties break by declaration order") {
        LabeledDag dag(std::vector<NodeSpec>{{"a", {2}, {}}, {"b", {2}, {"a"}}, {"c", {2}, {"a"}}});
        CHECK(topological_order(dag) == std::vector<int>{0, 1, 2});
    }
    SUBCASE("cycle is rejected") {
        LabeledDag dag(std::vector<NodeSpec>{{"a", {2}, {"b"}}, {"b", {2}, {"a"}}});
        CHECK_THROWS_AS(topological_order(dag), CycleDetected);
    }
}

TEST_CASE("graph construction rejects bad specs") {
    CHECK_THROWS(LabeledDag(std::vector<NodeSpec>{{"a", {2}, {}}, {"a", {2}, {}}}));  // duplicate name
    CHECK_THROWS(LabeledDag(std::vector<NodeSpec>{{"a", {2}, {"z"}}}));  // unknown parent
    CHECK_THROWS(LabeledDag(std::vector<NodeSpec>{{"a", {2}, {"a"}}}));  // self parent
    CHECK_THROWS(LabeledDag(std::vector<NodeSpec>{{"a", {0}, {}}}));  // bad dimension
}

TEST_CASE("node classification") {
    SUBCASE("two nodes") {
        LabeledDag dag(std::vector<NodeSpec>{{"a", {2}, {}}, {"b", {2}, {"a"}}});
        NodeClassification c = classify_nodes(dag);
        CHECK(c.internal == std::vector<int>{0});
        CHECK(c.external == std::vector<int>{1});
    }
    SUBCASE("fully connected three nodes") {
        LabeledDag dag(std::vector<NodeSpec>{{"a", {2}, {}}, {"b", {2}, {"a"}}, {"c", {2}, {"b", "a"}}});
        NodeClassification c = classify_nodes(dag);
        CHECK(c.internal == std::vector<int>{0, 1});
        CHECK(c.external == std::vector<int>{2});
    }
    SUBCASE("isolated node is external") {
        LabeledDag dag(std::vector<NodeSpec>{{"a", {2}, {}}});
        NodeClassification c = classify_nodes(dag);
        CHECK(c.internal.empty());
        CHECK(c.external == std::vector<int>{0});
    }
    SUBCASE("partition is total and disjoint on random dags") {
        SplitMix64 rng(19);
        for (int t = 0; t < 100; ++t) {
            int k = 1 + int(rng.below(6));
            std::vector<NodeSpec> nodes;
            for (int i = 0; i < k; ++i) {
                NodeSpec n{"n" + std::to_string(i), {2}, {}};
                for (int p = 0; p < i; ++p)
                    if (rng.uniform() < 0.4) n.parents.push_back("n" + std::to_string(p));
                nodes.push_back(std::move(n));
            }
            LabeledDag dag(nodes);
            NodeClassification c = classify_nodes(dag);
            std::set<int> all;
            all.insert(c.internal.begin(), c.internal.end());
            all.insert(c.external.begin(), c.external.end());
            CHECK(int(all.size()) == k);
            CHECK(c.internal.size() + c.external.size() == size_t(k));
        }
    }
}

TEST_CASE("story amplitude") {
    SUBCASE("deterministic two-node net") {
        QbNet net = copy_chain();
        Story s00 = story_from_flat(net.dag(), {0, 0});
        Story s01 = story_from_flat(net.dag(), {0, 1});
        CHECK(story_amplitude(net, s00) == Cplx(1.0));
        CHECK(story_amplitude(net, s01) == Cplx(0.0));
    }
    SUBCASE("entangled pair amplitudes") {
        QbNet net = epr_net().net;
        double r = 1.0 / std::sqrt(2.0);
        Story s;
        s.states = {{0, 1}, {0}, {1}};  // e=(0,1), x=0, y=1
        CHECK(std::abs(story_amplitude(net, s) - Cplx(r)) < 1e-15);
        s.states = {{1, 0}, {1}, {0}};
        CHECK(std::abs(story_amplitude(net, s) - Cplx(-r)) < 1e-15);
        s.states = {{0, 1}, {1}, {1}};  // copy mismatch
        CHECK(story_amplitude(net, s) == Cplx(0.0));
    }
    SUBCASE("dimension mismatch is rejected") {
        QbNet net = copy_chain();
        Story bad;
        bad.states = {{2}, {0}};
        CHECK_THROWS_AS(story_amplitude(net, bad), DimensionMismatch);
    }
}

TEST_CASE("story probability and the parent classical net") {
    QbNet net = epr_net().net;
    CbNet parent = parent_cb_net(net);

    SUBCASE("probabilities are squared amplitudes for every story") {
        for (int e = 0; e < 4; ++e)
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y) {
                    Story s = story_from_flat(net.dag(), {e, x, y});
                    double want = std::norm(story_amplitude(net, s));
                    CHECK(story_probability(parent, s) == doctest::Approx(want).epsilon(1e-12));
                }
    }
    SUBCASE("uniform root") {
        std::vector<NodeSpec> nodes = {{"a", {4}, {}}};
        CbNet u(LabeledDag(std::move(nodes)), {col({0.25, 0.25, 0.25, 0.25})});
        Story s = story_from_flat(u.dag(), {2});
        CHECK(story_probability(u, s) == doctest::Approx(0.25));
    }
    SUBCASE("parent net validates") { CHECK(validate(parent).ok()); }
    SUBCASE("delta matrix is its own parent") {
        QbNet chain = copy_chain();
        CbNet p = parent_cb_net(chain);
        CHECK((p.matrix(1) - Mat::identity(2)).max_abs() == 0.0);
    }
}

TEST_CASE("net validation") {
    SUBCASE("well-formed nets pass") {
        CHECK(validate(epr_net().net).ok());
        CHECK(validate(copy_chain()).ok());
    }
    SUBCASE("scaled column is reported with the node name") {
        std::vector<NodeSpec> nodes = {{"a", {2}, {}}, {"b", {2}, {"a"}}};
        Mat ma = col({1.0, 0.0});
        Mat mb = Mat::identity(2).scaled(2.0);
        QbNet bad(LabeledDag(std::move(nodes)), {std::move(ma), std::move(mb)});
        ValidationReport rep = validate(bad);
        REQUIRE_FALSE(rep.ok());
        CHECK(rep.violations[0].node == "b");
        CHECK(rep.violations[0].constraint == "column-norm");
    }
    SUBCASE("story norm follows from column norms on random nets") {
        SplitMix64 rng(23);
        for (int t = 0; t < 25; ++t) {
            // random two-node net with unitary child matrix
            int d = 2 + int(rng.below(3));
            CVec root = random_state(d, rng);
            Mat mroot(d, 1);
            for (int i = 0; i < d; ++i) mroot(i, 0) = root[i];
            std::vector<NodeSpec> nodes = {{"a", {d}, {}}, {"b", {d}, {"a"}}};
            QbNet net(LabeledDag(std::move(nodes)), {std::move(mroot), random_unitary(d, rng)});
            CHECK(validate(net).ok());
        }
    }
    SUBCASE("classical validation flags negative entries") {
        std::vector<NodeSpec> nodes = {{"a", {2}, {}}};
        CbNet bad(LabeledDag(std::move(nodes)), {col({1.5, -0.5})});
        ValidationReport rep = validate(bad);
        CHECK_FALSE(rep.ok());
    }
}

TEST_CASE("story count") {
    QbNet net = epr_net().net;
    CHECK(net.story_count() == 16);
}
