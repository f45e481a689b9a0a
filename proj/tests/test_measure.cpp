#include <cmath>

#include "doctest.h"
#include "qbn/infotheory.hpp"
#include "qbn/measure.hpp"
#include "qbn/rng.hpp"

using namespace qbn;

namespace {

Pom basis_pom(int d) {
    Pom p;
    p.dim = d;
    for (int b = 0; b < d; ++b) {
        Mat f(d, d);
        f(b, b) = 1.0;
        p.elements.push_back(std::move(f));
    }
    return p;
}

// Verifies the defining component equation of the dilation on every basis
// vector phi: U (phi (x) |0...>) = sum_b (sqrt(F_b) phi) (x) |b> [(x) |b>].
double dilation_constraint_residual(const Pom& pom, const Mat& u, DilationVariant variant) {
    const int d = pom.dim, m = pom.outcomes();
    std::vector<Mat> roots;
    for (const auto& f : pom.elements) roots.push_back(sqrt_psd(f));
    bool general = variant == DilationVariant::General;
    double worst = 0;
    for (int q = 0; q < d; ++q) {
        int col = general ? (q * m) * m : q * m;
        for (int qf = 0; qf < d; ++qf)
            for (int bf = 0; bf < m; ++bf) {
                if (general) {
                    for (int xf = 0; xf < m; ++xf) {
                        Cplx want = (xf == bf) ? roots[bf](qf, q) : Cplx(0);
                        worst = std::max(worst,
                                         std::abs(u((qf * m + bf) * m + xf, col) - want));
                    }
                } else {
                    worst = std::max(worst, std::abs(u(qf * m + bf, col) - roots[bf](qf, q)));
                }
            }
    }
    return worst;
}

}  // namespace

TEST_CASE("POM validation") {
    SUBCASE("identity singleton") {
        Pom p{2, {Mat::identity(2)}};
        CHECK(validate_pom(p).ok());
    }
    SUBCASE("trine POM is complete") {
        PomReport rep = validate_pom(trine_pom());
        CHECK(rep.ok());
        CHECK(rep.completeness_residual < 1e-12);
        CHECK(rep.min_eigenvalue > -1e-12);
    }
    SUBCASE("overcomplete set fails") {
        Pom p{2, {Mat::identity(2).scaled(2.0)}};
        CHECK_FALSE(validate_pom(p).ok());
    }
}

TEST_CASE("POM classification") {
    SUBCASE("basis projectors form an ideal measurement") {
        PomClass c = classify_pom(basis_pom(2));
        CHECK(c.orthogonal);
        CHECK(c.pure);
        CHECK(c.von_neumann);
    }
    SUBCASE("trine POM is neither orthogonal nor a projector set") {
        PomClass c = classify_pom(trine_pom());
        CHECK_FALSE(c.orthogonal);
        CHECK_FALSE(c.pure);
        CHECK_FALSE(c.von_neumann);
        // rank one but scaled: F^2 != F
        Mat f = trine_pom().elements[0];
        CHECK((f * f - f).max_abs() > 0.1);
    }
    SUBCASE("split identity is neither") {
        Pom p{2, {Mat::identity(2).scaled(0.5), Mat::identity(2).scaled(0.5)}};
        PomClass c = classify_pom(p);
        CHECK_FALSE(c.orthogonal);
        CHECK_FALSE(c.pure);
    }
}

TEST_CASE("measurement probabilities") {
    SUBCASE("trine signals against the trine POM") {
        Ensemble e = trine_ensemble();
        Pom pom = trine_pom();
        for (int a = 0; a < 3; ++a) {
            DensityMatrix rho({{"q", 2}}, e.signals[a]);
            ProbTable p = measure_probs(rho, pom);
            for (int b = 0; b < 3; ++b)
                CHECK(p.p[b] == doctest::Approx(a == b ? 0.0 : 0.5).epsilon(1e-12));
        }
    }
    SUBCASE("identity POM is certain") {
        SplitMix64 rng(131);
        DensityMatrix rho({{"q", 2}}, random_density(2, rng));
        ProbTable p = measure_probs(rho, Pom{2, {Mat::identity(2)}});
        CHECK(p.p[0] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("basis measurement of the maximally mixed state is uniform") {
        DensityMatrix rho({{"q", 2}}, Mat::identity(2).scaled(0.5));
        ProbTable p = measure_probs(rho, basis_pom(2));
        CHECK(p.p[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.p[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("probabilities normalize for random pairs") {
        SplitMix64 rng(137);
        for (int t = 0; t < 20; ++t) {
            DensityMatrix rho({{"q", 2}}, random_density(2, rng));
            // random two-outcome POM: F, I - F with F = s * projector
            CVec v = random_state(2, rng);
            Mat f = Mat::outer(v, v).scaled(rng.uniform());
            Pom p{2, {f, Mat::identity(2) - f}};
            REQUIRE(validate_pom(p).ok());
            ProbTable probs = measure_probs(rho, p);
            CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-10));
            for (double x : probs.p) CHECK(x >= -1e-12);
        }
    }
}

TEST_CASE("dilation unitaries") {
    SUBCASE("basis projectors, pointer variant acts as a controlled copy") {
        Pom p = basis_pom(2);
        Mat u = dilation_unitary(p, DilationVariant::OrthogonalProjector);
        CHECK((u.adjoint() * u - Mat::identity(4)).max_abs() < 1e-9);
        CHECK(dilation_constraint_residual(p, u, DilationVariant::OrthogonalProjector) < 1e-10);
        // |q>|0> -> |q>|q>
        for (int q = 0; q < 2; ++q)
            for (int qf = 0; qf < 2; ++qf)
                for (int bf = 0; bf < 2; ++bf) {
                    Cplx want = (qf == q && bf == q) ? 1.0 : 0.0;
                    CHECK(std::abs(u(qf * 2 + bf, q * 2) - want) < 1e-12);
                }
    }
    SUBCASE("identity singleton dilation is trivial on the q register") {
        Pom p{2, {Mat::identity(2)}};
        Mat u = dilation_unitary(p, DilationVariant::OrthogonalProjector);
        CHECK((u - Mat::identity(2)).max_abs() < 1e-12);
    }
    SUBCASE("general variant covers the trine POM") {
        Pom p = trine_pom();
        Mat u = dilation_unitary(p, DilationVariant::General);
        CHECK(u.rows() == 2 * 3 * 3);
        CHECK((u.adjoint() * u - Mat::identity(18)).max_abs() < 1e-9);
        CHECK(dilation_constraint_residual(p, u, DilationVariant::General) < 1e-10);
    }
    SUBCASE("pointer variant rejects non-orthogonal POMs") {
        CHECK_THROWS_AS(dilation_unitary(trine_pom(), DilationVariant::OrthogonalProjector),
                        NotUnitarizable);
    }
    SUBCASE("general variant on random rank-one POMs") {
        SplitMix64 rng(139);
        for (int t = 0; t < 5; ++t) {
            // pure POM from a random 3x2 isometry
            Mat omega = random_unitary(3, rng);
            Pom p;
            p.dim = 2;
            for (int b = 0; b < 3; ++b) {
                CVec v(2);
                for (int q = 0; q < 2; ++q) v[q] = std::conj(omega(b, q));
                p.elements.push_back(Mat::outer(v, v));
            }
            REQUIRE(validate_pom(p).ok());
            Mat u = dilation_unitary(p, DilationVariant::General);
            CHECK((u.adjoint() * u - Mat::identity(18)).max_abs() < 1e-9);
            CHECK(dilation_constraint_residual(p, u, DilationVariant::General) < 1e-10);
        }
    }
}

TEST_CASE("POM nets reproduce measurement statistics") {
    SUBCASE("basis projectors on the maximally mixed state") {
        Mat beta = Mat::identity(2).scaled(0.5);
        QbNet net = pom_net(basis_pom(2), mixed_state_net(beta), "q",
                            DilationVariant::OrthogonalProjector);
        CHECK(validate(net).ok());
        DensityMatrix rho = pom_net_outcome(net);
        REQUIRE(rho.axes().size() == 1);
        CHECK(rho.axes()[0].node == "bf");
        CHECK(std::real(rho.matrix()(0, 0)) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(std::real(rho.matrix()(1, 1)) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("trine POM on a trine signal") {
        Ensemble e = trine_ensemble();
        QbNet net =
            pom_net(trine_pom(), mixed_state_net(e.signals[0]), "q", DilationVariant::General);
        DensityMatrix rho = pom_net_outcome(net);
        CHECK(std::real(rho.matrix()(0, 0)) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(std::real(rho.matrix()(1, 1)) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(std::real(rho.matrix()(2, 2)) == doctest::Approx(0.5).epsilon(1e-10));
        // the trace over the second pointer register kills the off-diagonals
        double offdiag = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) offdiag = std::max(offdiag, std::abs(rho.matrix()(i, j)));
        CHECK(offdiag < 1e-10);
    }
    SUBCASE("outcome diagonal equals direct measurement for random states") {
        SplitMix64 rng(149);
        for (int t = 0; t < 5; ++t) {
            Mat beta = random_density(2, rng);
            Pom pom = trine_pom();
            QbNet net = pom_net(pom, mixed_state_net(beta), "q", DilationVariant::General);
            DensityMatrix rho = pom_net_outcome(net);
            DensityMatrix rho0({{"q", 2}}, beta);
            ProbTable direct = measure_probs(rho0, pom);
            for (int b = 0; b < 3; ++b)
                CHECK(std::real(rho.matrix()(b, b)) ==
                      doctest::Approx(direct.p[b]).epsilon(1e-10));
        }
    }
}

TEST_CASE("psd square root input validation") {
    Mat not_psd(2, 2);
    not_psd(0, 0) = 1.0;
    not_psd(1, 1) = -0.5;
    CHECK_THROWS_AS(sqrt_psd(not_psd), NotPsd);
}
