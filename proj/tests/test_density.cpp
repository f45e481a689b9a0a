#include <cmath>

#include "doctest.h"
#include "qbn/density.hpp"
#include "qbn/protocols.hpp"
#include "qbn/rng.hpp"

using namespace qbn;

namespace {

const double kRt2 = std::sqrt(0.5);

DensityMatrix two_qubit_density(const Mat& m) {
    return DensityMatrix({{"A", 2}, {"B", 2}}, m);
}

DensityMatrix random_labeled(const std::vector<Axis>& axes, SplitMix64& rng) {
    int d = 1;
    for (const auto& a : axes) d *= a.dim;
    return DensityMatrix(axes, random_density(d, rng));
}

}  // namespace

TEST_CASE("meta state of the entangled pair") {
    QbNet net = epr_net().net;
    MetaState ms = meta_state(net);
    REQUIRE(ms.dim() == 16);
    // amplitude lives at (e=(0,1), x=0, y=1) and (e=(1,0), x=1, y=0)
    CHECK(std::abs(ms.amplitudes[flatten_index({4, 2, 2}, {1, 0, 1})] - Cplx(kRt2)) < 1e-15);
    CHECK(std::abs(ms.amplitudes[flatten_index({4, 2, 2}, {2, 1, 0})] - Cplx(-kRt2)) < 1e-15);
    double norm = 0;
    for (const auto& a : ms.amplitudes) norm += std::norm(a);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));

    int nonzero = 0;
    for (const auto& a : ms.amplitudes)
        if (a != Cplx{}) ++nonzero;
    CHECK(nonzero == 2);
}

TEST_CASE("meta state of a single root is its amplitude column") {
    std::vector<NodeSpec> nodes = {{"a", {3}, {}}};
    Mat col(3, 1);
    col(0, 0) = 0.6;
    col(1, 0) = Cplx(0, 0.8);
    QbNet net(LabeledDag(std::move(nodes)), {std::move(col)});
    MetaState ms = meta_state(net);
    CHECK(std::abs(ms.amplitudes[0] - Cplx(0.6)) < 1e-15);
    CHECK(std::abs(ms.amplitudes[1] - Cplx(0, 0.8)) < 1e-15);
    CHECK(ms.amplitudes[2] == Cplx{});
}

TEST_CASE("meta density matrix is a projector") {
    QbNet net = epr_net().net;
    DensityMatrix mu = meta_density(net);
    CHECK(std::abs(mu.matrix().trace() - Cplx(1.0)) < 1e-12);
    CHECK((mu.matrix() * mu.matrix() - mu.matrix()).max_abs() < 1e-10);
}

TEST_CASE("partial trace") {
    SUBCASE("entangled pair traces to maximally mixed") {
        DensityMatrix rho = NetReduction().esum({"e"}).run(epr_net().net);
        DensityMatrix tx = partial_trace(rho, {"x"});
        CHECK((tx.matrix() - Mat::identity(2).scaled(0.5)).max_abs() < 1e-12);
        CHECK(tx.axes().size() == 1);
        CHECK(tx.axes()[0].node == "y");
    }
    SUBCASE("product state splits") {
        SplitMix64 rng(31);
        Mat a = random_density(2, rng);
        Mat b = random_density(3, rng);
        DensityMatrix rho({{"A", 2}, {"B", 3}}, kron(a, b));
        CHECK((partial_trace(rho, {"B"}).matrix() - a).max_abs() < 1e-12);
        CHECK((partial_trace(rho, {"A"}).matrix() - b).max_abs() < 1e-12);
    }
    SUBCASE("basis independence") {
        SplitMix64 rng(37);
        for (int t = 0; t < 20; ++t) {
            DensityMatrix rho = random_labeled({{"A", 2}, {"B", 2}}, rng);
            Mat u = kron(random_unitary(2, rng), Mat::identity(2));
            DensityMatrix rotated(rho.axes(), u * rho.matrix() * u.adjoint());
            CHECK((partial_trace(rotated, {"A"}).matrix() - partial_trace(rho, {"A"}).matrix())
                      .max_abs() < 1e-10);
        }
    }
    SUBCASE("tracing everything is an error") {
        SplitMix64 rng(5);
        DensityMatrix rho = random_labeled({{"A", 2}}, rng);
        CHECK_THROWS_AS(partial_trace(rho, {"A"}), EmptyResult);
        CHECK_THROWS_AS(partial_trace(rho, {"Q"}), UnknownAxis);
    }
}

TEST_CASE("projective reduction") {
    QbNet net = epr_net().net;
    DensityMatrix rho = NetReduction().esum({"e"}).run(net);

    SUBCASE("conditioning on y selects the opposite x state") {
        CVec e1 = {0.0, 1.0};
        DensityMatrix r = project_reduce(rho, "y", e1);
        Mat want(2, 2);
        want(0, 0) = 1.0;
        CHECK((r.matrix() - want).max_abs() < 1e-12);
    }
    SUBCASE("projecting a product state leaves the other factor") {
        SplitMix64 rng(41);
        Mat a = random_density(2, rng);
        Mat b = random_density(2, rng);
        DensityMatrix prod({{"A", 2}, {"B", 2}}, kron(a, b));
        CVec v = random_state(2, rng);
        DensityMatrix r = project_reduce(prod, "A", v);
        CHECK((r.matrix() - b).max_abs() < 1e-10);
    }
    SUBCASE("zero-probability projection is an error") {
        CVec impossible = {1.0, 0.0};  // y = 0 paired with x = 0 never occurs
        DensityMatrix ry = project_reduce(rho, "y", impossible);
        // projecting the surviving axis on the complementary state has K = 0
        CHECK_THROWS_AS(project_reduce(ry, "x", impossible), EmptyResult);
        DensityMatrix mu = meta_density(epr_net().net);
        CVec e00 = {1.0, 0.0, 0.0, 0.0};
        CHECK_THROWS_AS(project_reduce(mu, "e", e00), ZeroProbability);
    }
}

TEST_CASE("entry sum") {
    SUBCASE("mixed-state net entry sum is pure") {
        SplitMix64 rng(43);
        Mat beta = random_density(3, rng);
        QbNet net = mixed_state_net(beta);
        DensityMatrix sigma = NetReduction().esum({"j"}).run(net);
        CHECK(s_entropy(sigma, "q,r") == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("entry sum removes an average-basis factor") {
        SplitMix64 rng(47);
        Mat phi = random_density(3, rng);
        CVec av(2, Cplx(kRt2));
        DensityMatrix rho({{"A", 2}, {"B", 3}}, kron(Mat::outer(av, av), phi));
        DensityMatrix r = esum(rho, {"A"});
        CHECK((r.matrix() - phi).max_abs() < 1e-12);
    }
    SUBCASE("order independence across axes") {
        SplitMix64 rng(53);
        for (int t = 0; t < 50; ++t) {
            DensityMatrix rho = random_labeled({{"A", 2}, {"B", 2}, {"C", 2}}, rng);
            DensityMatrix ab = esum(rho, {"A", "B"});
            DensityMatrix ba = esum(esum(rho, {"B"}), {"A"});
            CHECK((ab.matrix() - ba.matrix()).max_abs() < 1e-10);
        }
    }
}

TEST_CASE("reduction recipes match operator-level reductions") {
    // the contracted-vector path and the dense meta-matrix path agree
    QbNet net = eraser_net().net;
    DensityMatrix mu = meta_density(net);
    DensityMatrix via_ops = esum(esum(mu, {"e"}), {"y"});
    DensityMatrix via_net = NetReduction().esum({"e", "y"}).run(net);
    CHECK((via_ops.matrix() - via_net.matrix()).max_abs() < 1e-12);

    DensityMatrix traced_ops = partial_trace(esum(mu, {"e", "y"}), {"r"});
    DensityMatrix traced_net = NetReduction().esum({"e", "y"}).trace({"r"}).run(net);
    CHECK((traced_ops.matrix() - traced_net.matrix()).max_abs() < 1e-12);
}

TEST_CASE("output state of a net") {
    SUBCASE("three-node example") {
        // fully connected: a -> b, a -> c, b -> c; rho_out = |psi><psi| with
        // psi(c) = sum_{a,b} A(a,b,c)
        SplitMix64 rng(59);
        Mat ma(2, 1);
        CVec root = random_state(2, rng);
        ma(0, 0) = root[0];
        ma(1, 0) = root[1];
        Mat mb = random_unitary(2, rng);
        Mat mc = random_unitary(4, rng);  // c of dim 4 with parents (b, a)
        std::vector<NodeSpec> nodes = {
            {"a", {2}, {}}, {"b", {2}, {"a"}}, {"c", {4}, {"b", "a"}}};
        QbNet net(LabeledDag(std::move(nodes)), {std::move(ma), std::move(mb), std::move(mc)});

        CVec psi(4, Cplx(0));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 4; ++c)
                    psi[c] += net.matrix(2)(c, b * 2 + a) * net.matrix(1)(b, a) *
                              net.matrix(0)(a, 0);
        DensityMatrix out = rho_out(net);
        Mat want = Mat::outer(psi, psi);
        double norm = std::real(want.trace());
        CHECK((out.matrix() - want.scaled(1.0 / norm)).max_abs() < 1e-10);
    }
    SUBCASE("deterministic chain gives a basis state") {
        std::vector<NodeSpec> nodes = {{"a", {2}, {}}, {"b", {2}, {"a"}}};
        Mat ma(2, 1);
        ma(1, 0) = 1.0;
        QbNet net(LabeledDag(std::move(nodes)), {std::move(ma), Mat::identity(2)});
        DensityMatrix out = rho_out(net);
        CHECK(out.axes().size() == 1);
        CHECK(std::abs(out.matrix()(1, 1) - Cplx(1.0)) < 1e-12);
    }
    SUBCASE("protocol outputs are pure") {
        for (const QbNet& net : {epr_net().net, eraser_net().net}) {
            EigenDecomposition e = eigensystem(rho_out(net));
            CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-9));
            for (size_t i = 1; i < e.eigenvalues.size(); ++i)
                CHECK(std::abs(e.eigenvalues[i]) < 1e-9);
        }
    }
}

TEST_CASE("von Neumann entropy") {
    CHECK(von_neumann_entropy(two_qubit_density(Mat::identity(4).scaled(0.25))) ==
          doctest::Approx(2.0).epsilon(1e-12));
    Mat pure(4, 4);
    pure(0, 0) = 1.0;
    CHECK(von_neumann_entropy(two_qubit_density(pure)) == doctest::Approx(0.0).epsilon(1e-12));

    // eigenvalues (p, 1-p) reproduce the binary entropy
    SplitMix64 rng(61);
    for (int t = 0; t < 10; ++t) {
        double p = rng.uniform();
        Mat u = random_unitary(2, rng);
        Mat m = u * Mat::diag({p, 1 - p}) * u.adjoint();
        DensityMatrix rho({{"A", 2}}, m);
        CHECK(von_neumann_entropy(rho) == doctest::Approx(binary_entropy(p)).epsilon(1e-9));
    }
}

TEST_CASE("entropies of the entangled pair state") {
    DensityMatrix rho = NetReduction().esum({"e"}).run(epr_net().net);
    CHECK(s_entropy(rho, "x|y") == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(s_entropy(rho, "x:y") == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(h_rho(rho, "x,y") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s_entropy(rho, "x:x") == doctest::Approx(s_entropy(rho, "x")).epsilon(1e-12));
    CHECK(coherence(rho, {"x"}) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(s_entropy(rho, "x:q"), UnknownAxis);
}

TEST_CASE("diagonal entropy equals spectral entropy for diagonal states") {
    SplitMix64 rng(67);
    std::vector<double> p = random_distribution(4, rng);
    DensityMatrix rho({{"A", 2}, {"B", 2}}, Mat::diag(p));
    for (const char* expr : {"A", "B", "A,B"})
        CHECK(s_entropy(rho, expr) == doctest::Approx(h_rho(rho, expr)).epsilon(1e-10));
}

TEST_CASE("purification") {
    SUBCASE("pure state round trip") {
        Mat pure(2, 2);
        pure(0, 0) = 1.0;
        DensityMatrix rho({{"A", 2}}, pure);
        MetaState psi = purify(rho);
        REQUIRE(psi.axes.size() == 2);
        // reconstruct tr_anc |psi><psi|
        Mat full = Mat::outer(psi.amplitudes, psi.amplitudes);
        DensityMatrix lifted({{"A", 2}, {"anc", 2}}, full);
        CHECK((partial_trace(lifted, {"anc"}).matrix() - pure).max_abs() < 1e-12);
    }
    SUBCASE("maximally mixed qubit purifies to an entangled pair") {
        DensityMatrix rho({{"A", 2}}, Mat::identity(2).scaled(0.5));
        MetaState psi = purify(rho);
        Mat full = Mat::outer(psi.amplitudes, psi.amplitudes);
        DensityMatrix lifted({{"A", 2}, {"anc", 2}}, full);
        CHECK((partial_trace(lifted, {"anc"}).matrix() - Mat::identity(2).scaled(0.5)).max_abs() <
              1e-12);
        // entangled: the ancilla marginal is mixed too
        CHECK(von_neumann_entropy(partial_trace(lifted, {"A"})) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("random mixed states round trip") {
        SplitMix64 rng(71);
        for (int t = 0; t < 50; ++t) {
            int d = 2 + int(rng.below(3));
            DensityMatrix rho({{"A", d}}, random_density(d, rng));
            MetaState psi = purify(rho);
            Mat full = Mat::outer(psi.amplitudes, psi.amplitudes);
            DensityMatrix lifted({{"A", d}, {"anc", d}}, full);
            CHECK((partial_trace(lifted, {"anc"}).matrix() - rho.matrix()).max_abs() < 1e-10);
        }
    }
}

TEST_CASE("mixed state net reproduces its target") {
    SplitMix64 rng(73);
    SUBCASE("basis projector") {
        Mat beta(2, 2);
        beta(0, 0) = 1.0;
        QbNet net = mixed_state_net(beta);
        DensityMatrix sq = NetReduction().esum({"j"}).trace({"r"}).run(net);
        CHECK((sq.matrix() - beta).max_abs() < 1e-10);
    }
    SUBCASE("maximally mixed") {
        Mat beta = Mat::identity(2).scaled(0.5);
        QbNet net = mixed_state_net(beta);
        DensityMatrix sq = NetReduction().esum({"j"}).trace({"r"}).run(net);
        CHECK((sq.matrix() - beta).max_abs() < 1e-10);
    }
    SUBCASE("random three-level states") {
        for (int t = 0; t < 20; ++t) {
            Mat beta = random_density(3, rng);
            QbNet net = mixed_state_net(beta);
            CHECK(validate(net).ok());
            DensityMatrix sq = NetReduction().esum({"j"}).trace({"r"}).run(net);
            CHECK((sq.matrix() - beta).max_abs() < 1e-10);
        }
    }
    SUBCASE("rejects a non-hermitian matrix") {
        Mat bad(2, 2);
        bad(0, 1) = 1.0;
        CHECK_THROWS_AS(mixed_state_net(bad), NotHermitian);
    }
}

TEST_CASE("story cap") {
    // 21 binary nodes exceed the dense meta-state cap
    std::vector<NodeSpec> nodes;
    std::vector<Mat> mats;
    for (int i = 0; i < 21; ++i) {
        nodes.push_back({"n" + std::to_string(i), {2}, {}});
        Mat m(2, 1);
        m(0, 0) = 1.0;
        mats.push_back(std::move(m));
    }
    QbNet net(LabeledDag(std::move(nodes)), std::move(mats));
    CHECK_THROWS_AS(meta_state(net), StoryCapExceeded);
}
