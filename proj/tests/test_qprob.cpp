#include <cmath>
#include <set>

#include "doctest.h"
#include "qbn/protocols.hpp"
#include "qbn/qprob.hpp"
#include "qbn/rng.hpp"

using namespace qbn;

namespace {

// Independent oracle: P[(x.)_Gamma] from the raw amplitude sums, i.e. sum
// the story amplitude over internal nodes outside gamma, square, sum over
// external nodes outside gamma, normalize.
ProbTable chi_sum_oracle(const QbNet& net, const std::vector<std::string>& gamma) {
    NodeClassification cls = classify_nodes(net.dag());
    std::set<int> gamma_idx;
    for (const auto& g : gamma) gamma_idx.insert(net.dag().index_of(g));

    std::vector<int> all_dims;
    for (const auto& n : net.dag().nodes()) all_dims.push_back(n.dim());

    std::vector<int> gamma_pos(all_dims.size(), -1);
    ProbTable out;
    std::vector<int> gdims;
    for (int i = 0; i < net.size(); ++i)
        if (gamma_idx.count(i)) {
            gamma_pos[i] = int(gdims.size());
            gdims.push_back(all_dims[i]);
            out.vars.push_back({net.dag().node(i).name, all_dims[i]});
        }

    std::set<int> internal(cls.internal.begin(), cls.internal.end());
    // chi[gamma states][external-minus-gamma states] accumulates the inner
    // amplitude sum before squaring
    std::vector<int> ext_dims;
    std::vector<int> ext_pos(all_dims.size(), -1);
    for (int i : cls.external)
        if (!gamma_idx.count(i)) {
            ext_pos[i] = int(ext_dims.size());
            ext_dims.push_back(all_dims[i]);
        }
    uint64_t ng = total_dim(gdims), ne = total_dim(ext_dims);
    std::vector<CVec> inner(ng, CVec(ne, Cplx(0)));
    for_each_story(net, [&](const std::vector<int>& flat, Cplx amp) {
        uint64_t gi = 0, ei = 0;
        for (int i = 0; i < net.size(); ++i) {
            if (gamma_pos[i] >= 0) gi = gi * uint64_t(all_dims[i]) + uint64_t(flat[i]);
            if (ext_pos[i] >= 0) ei = ei * uint64_t(all_dims[i]) + uint64_t(flat[i]);
        }
        inner[gi][ei] += amp;
    });
    out.p.assign(ng, 0.0);
    double total = 0;
    for (uint64_t g = 0; g < ng; ++g) {
        for (uint64_t e = 0; e < ne; ++e) out.p[g] += std::norm(inner[g][e]);
        total += out.p[g];
    }
    for (auto& v : out.p) v /= total;
    return out;
}

// three-node chain a -> b -> c with bit dimensions and given matrices
QbNet markov_qnet(const CVec& psi, const Mat& u, const Mat& v) {
    int d = int(psi.size());
    Mat ma(d, 1);
    for (int i = 0; i < d; ++i) ma(i, 0) = psi[i];
    std::vector<NodeSpec> nodes = {{"a", {d}, {}}, {"b", {d}, {"a"}}, {"c", {d}, {"b"}}};
    return QbNet(LabeledDag(std::move(nodes)), {std::move(ma), u, v});
}

Mat hadamard() {
    Mat h(2, 2);
    double r = std::sqrt(0.5);
    h(0, 0) = r;
    h(0, 1) = r;
    h(1, 0) = r;
    h(1, 1) = -r;
    return h;
}

}  // namespace

TEST_CASE("single-node probabilities of a unitary chain") {
    SplitMix64 rng(83);
    CVec psi = random_state(2, rng);
    QbNet net = markov_qnet(psi, random_unitary(2, rng), random_unitary(2, rng));

    ProbTable pa = p_gamma(net, {"a"});
    CHECK(pa.p[0] == doctest::Approx(std::norm(psi[0])).epsilon(1e-10));
    CHECK(pa.p[1] == doctest::Approx(std::norm(psi[1])).epsilon(1e-10));

    // P(b,c) = |sum_a V_cb U_ba psi_a|^2
    ProbTable pbc = p_gamma(net, {"b", "c"});
    for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
            Cplx s = 0;
            for (int a = 0; a < 2; ++a) s += net.matrix(2)(c, b) * net.matrix(1)(b, a) * psi[a];
            CHECK(pbc.at({b, c}) == doctest::Approx(std::norm(s)).epsilon(1e-10));
        }
}

TEST_CASE("meta reduction equals the amplitude-sum oracle") {
    SplitMix64 rng(89);
    for (int trial = 0; trial < 10; ++trial) {
        CVec psi = random_state(2, rng);
        QbNet net = markov_qnet(psi, random_unitary(2, rng), random_unitary(2, rng));
        for (const auto& gamma : std::vector<std::vector<std::string>>{
                 {"a"}, {"b"}, {"c"}, {"a", "b"}, {"b", "c"}, {"a", "c"}, {"a", "b", "c"}}) {
            ProbTable got = p_gamma(net, gamma);
            ProbTable want = chi_sum_oracle(net, gamma);
            REQUIRE(got.p.size() == want.p.size());
            for (size_t i = 0; i < got.p.size(); ++i)
                CHECK(got.p[i] == doctest::Approx(want.p[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("deterministic net gives a point mass") {
    Mat ma(2, 1);
    ma(1, 0) = 1.0;
    std::vector<NodeSpec> nodes = {{"a", {2}, {}}, {"b", {2}, {"a"}}};
    QbNet net(LabeledDag(std::move(nodes)), {std::move(ma), Mat::identity(2)});
    ProbTable p = p_gamma(net, {"a", "b"});
    CHECK(p.at({1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.at({0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("conditional probabilities") {
    SplitMix64 rng(97);
    CVec psi = random_state(2, rng);
    QbNet net = markov_qnet(psi, random_unitary(2, rng), random_unitary(2, rng));

    SUBCASE("normalization over the queried set") {
        ProbTable cond = p_gamma_cond(net, {"a", "b"}, {"c"}, {1});
        CHECK(cond.sum() == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("overlap drops the shared variables") {
        ProbTable lhs = p_gamma_cond(net, {"a", "b"}, {"b", "c"}, {0, 1});
        ProbTable rhs = p_gamma_cond(net, {"a"}, {"b", "c"}, {0, 1});
        REQUIRE(lhs.p.size() == rhs.p.size());
        for (size_t i = 0; i < lhs.p.size(); ++i)
            CHECK(lhs.p[i] == doctest::Approx(rhs.p[i]).epsilon(1e-12));
    }
    SUBCASE("deterministic conditioning gives a delta") {
        Mat ma(2, 1);
        ma(0, 0) = 1.0;
        std::vector<NodeSpec> nodes = {{"a", {2}, {}}, {"b", {2}, {"a"}}};
        QbNet det(LabeledDag(std::move(nodes)), {std::move(ma), Mat::identity(2)});
        ProbTable cond = p_gamma_cond(det, {"a"}, {"b"}, {0});
        CHECK(cond.p[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("empty sets are rejected") {
        CHECK_THROWS_AS(p_gamma_cond(net, {}, {"c"}, {0}), EmptyGamma);
        CHECK_THROWS_AS(p_gamma_cond(net, {"c"}, {"c"}, {0}), EmptyGamma);
    }
}

TEST_CASE("density-matrix probabilities") {
    DensityMatrix rho = NetReduction().esum({"e"}).run(epr_net().net);

    SUBCASE("pair marginal is uniform") {
        ProbTable px = p_rho(rho, {"x"});
        CHECK(px.p[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(px.p[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("full diagonal sums to one") {
        ProbTable pxy = p_rho(rho, {"x", "y"});
        CHECK(pxy.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("point mass for a basis state") {
        Mat pure(4, 4);
        pure(2, 2) = 1.0;
        DensityMatrix basis({{"A", 2}, {"B", 2}}, pure);
        ProbTable p = p_rho(basis, {"A", "B"});
        CHECK(p.at({1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("closure under marginalization") {
        SplitMix64 rng(103);
        DensityMatrix r({{"A", 2}, {"B", 2}, {"C", 2}}, random_density(8, rng));
        ProbTable joint = p_rho(r, {"A", "B", "C"});
        ProbTable direct = p_rho(r, {"B"});
        ProbTable via = joint.marginal({"B"});
        for (size_t i = 0; i < direct.p.size(); ++i)
            CHECK(via.p[i] == doctest::Approx(direct.p[i]).epsilon(1e-10));
    }
    SUBCASE("conditionals close and normalize") {
        SplitMix64 rng(107);
        DensityMatrix r({{"A", 2}, {"B", 2}, {"C", 2}}, random_density(8, rng));
        ProbTable c1 = p_rho_cond(r, {"A", "B"}, {"C"}, {1});
        CHECK(c1.sum() == doctest::Approx(1.0).epsilon(1e-10));
        ProbTable c2 = p_rho_cond(r, {"B"}, {"C"}, {1});
        ProbTable via = c1.marginal({"B"});
        for (size_t i = 0; i < c2.p.size(); ++i)
            CHECK(via.p[i] == doctest::Approx(c2.p[i]).epsilon(1e-10));
        // product state: conditioning is a no-op
        Mat a = random_density(2, rng);
        Mat b = random_density(2, rng);
        DensityMatrix prod({{"A", 2}, {"B", 2}}, kron(a, b));
        ProbTable cond = p_rho_cond(prod, {"A"}, {"B"}, {0});
        ProbTable plain = p_rho(prod, {"A"});
        for (size_t i = 0; i < cond.p.size(); ++i)
            CHECK(cond.p[i] == doctest::Approx(plain.p[i]).epsilon(1e-10));
    }
}

TEST_CASE("marginalization closure") {
    SUBCASE("meta family is closed, raw family is not") {
        // Hadamard chain: summing P(b,c) over b misses P(c) by a wide margin
        CVec psi = {1.0, 0.0};
        QbNet net = markov_qnet(psi, hadamard(), hadamard());
        ClosureReport rep = closure_check(net);
        CHECK(rep.p_mu_family_residual < 1e-10);
        CHECK(rep.p_family_residual > 0.01);

        ProbTable pbc = p_gamma(net, {"b", "c"});
        ProbTable pc = p_gamma(net, {"c"});
        ProbTable summed = pbc.marginal({"c"});
        // witness values from the amplitude-sum oracle: P(c) is a point mass
        // while the summed table is uniform
        CHECK(pc.p[0] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(summed.p[0] == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("classical nets close in both families") {
        SplitMix64 rng(109);
        CVec psi = {std::sqrt(0.3), std::sqrt(0.7)};
        Mat u(2, 2);
        u(0, 0) = 1.0;
        u(1, 1) = 1.0;
        QbNet net = markov_qnet(psi, u, Mat::identity(2));
        ClosureReport rep = closure_check(net);
        CHECK(rep.p_family_residual < 1e-10);
        CHECK(rep.p_mu_family_residual < 1e-10);
    }
}

TEST_CASE("meta probabilities match the parent classical net") {
    SplitMix64 rng(113);
    for (int trial = 0; trial < 5; ++trial) {
        CVec psi = random_state(2, rng);
        QbNet net = markov_qnet(psi, random_unitary(2, rng), random_unitary(2, rng));
        CbNet parent = parent_cb_net(net);
        DensityMatrix mu = meta_density(net);
        ProbTable joint = joint_table(parent);

        for (const auto& gamma : std::vector<std::vector<std::string>>{
                 {"a"}, {"b"}, {"c"}, {"a", "c"}, {"a", "b", "c"}}) {
            ProbTable got = p_rho(mu, gamma);
            ProbTable want = joint.marginal(gamma);
            for (size_t i = 0; i < got.p.size(); ++i)
                CHECK(got.p[i] == doctest::Approx(want.p[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("classical entropy over a net joint") {
    SplitMix64 rng(127);
    CbNet chain = markov_chain_net({2, 2, 2}, rng);
    ProbTable joint = joint_table(chain);
    CHECK(joint.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // chain rule
    double lhs = h_entropy(chain, "q1,q2,q3");
    double rhs = h_entropy(chain, "q1") + h_entropy(chain, "q2|q1") + h_entropy(chain, "q3|q2,q1");
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}
