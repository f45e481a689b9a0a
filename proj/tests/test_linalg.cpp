#include "doctest.h"
#include "qbn/eig.hpp"
#include "qbn/linalg.hpp"
#include "qbn/rng.hpp"

using namespace qbn;

TEST_CASE("index helpers round trip") {
    std::vector<int> dims = {2, 3, 4};
    CHECK(total_dim(dims) == 24);
    for (uint64_t f = 0; f < 24; ++f) {
        std::vector<int> idx = unflatten_index(dims, f);
        CHECK(flatten_index(dims, idx) == f);
    }
    // first index varies slowest
    CHECK(flatten_index(dims, {1, 0, 0}) == 12);
    CHECK(flatten_index(dims, {0, 1, 0}) == 4);
    CHECK(flatten_index(dims, {0, 0, 1}) == 1);
}

TEST_CASE("matrix basics") {
    Mat a(2, 2);
    a(0, 0) = Cplx(1, 1);
    a(0, 1) = Cplx(0, 2);
    a(1, 0) = 3;
    a(1, 1) = Cplx(-1, 0);
    Mat ad = a.adjoint();
    CHECK(ad(0, 0) == Cplx(1, -1));
    CHECK(ad(1, 0) == Cplx(0, -2));
    CHECK(ad(0, 1) == Cplx(3, 0));

    Mat i2 = Mat::identity(2);
    CHECK((a * i2 - a).max_abs() == 0.0);
    CHECK(a.trace() == Cplx(0, 1));

    Mat k = kron(i2, a);
    CHECK(k.rows() == 4);
    CHECK(k(2, 2) == a(0, 0));
    CHECK(k(0, 1) == a(0, 1));
    CHECK(k(0, 2) == Cplx(0, 0));
}

TEST_CASE("jacobi eigensolver on known matrices") {
    SUBCASE("maximally mixed qubit") {
        Mat m = Mat::identity(2).scaled(0.5);
        EigenDecomposition e = hermitian_eig(m);
        CHECK(e.eigenvalues[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(e.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("basis projector") {
        Mat m(2, 2);
        m(0, 0) = 1.0;
        EigenDecomposition e = hermitian_eig(m);
        CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(e.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("complex off-diagonal") {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1
        Mat m(2, 2);
        m(0, 0) = 2;
        m(0, 1) = Cplx(0, 1);
        m(1, 0) = Cplx(0, -1);
        m(1, 1) = 2;
        EigenDecomposition e = hermitian_eig(m);
        CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("rejects non-hermitian input") {
        Mat m(2, 2);
        m(0, 1) = 1.0;
        CHECK_THROWS_AS(hermitian_eig(m), NotHermitian);
    }
}

TEST_CASE("jacobi eigensolver reconstruction on random matrices") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + int(rng.below(10));
        Mat g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian();
        Mat herm = (g + g.adjoint()).scaled(0.5);

        EigenDecomposition e = hermitian_eig(herm);
        CHECK((e.reconstruct() - herm).max_abs() < 1e-9);
        // descending order
        for (size_t i = 1; i < e.eigenvalues.size(); ++i)
            CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i] - 1e-12);
        // orthonormal columns
        Mat gram = e.eigenvectors.adjoint() * e.eigenvectors;
        CHECK((gram - Mat::identity(n)).max_abs() < 1e-10);
    }
}

TEST_CASE("psd square root") {
    SUBCASE("projector is its own root") {
        Mat m(2, 2);
        m(0, 0) = 1.0;
        CHECK((sqrt_psd(m) - m).max_abs() < 1e-12);
    }
    SUBCASE("diagonal") {
        Mat m(2, 2);
        m(0, 0) = 4.0;
        m(1, 1) = 1.0;
        Mat r = sqrt_psd(m);
        CHECK(std::abs(r(0, 0) - Cplx(2.0)) < 1e-12);
        CHECK(std::abs(r(1, 1) - Cplx(1.0)) < 1e-12);
    }
    SUBCASE("random psd squares back") {
        SplitMix64 rng(5);
        for (int t = 0; t < 20; ++t) {
            int n = 2 + int(rng.below(5));
            Mat rho = random_density(n, rng).scaled(double(n));
            Mat r = sqrt_psd(rho);
            CHECK((r * r - rho).max_abs() < 1e-10);
        }
    }
    SUBCASE("rejects negative eigenvalues") {
        Mat m(2, 2);
        m(0, 0) = -1.0;
        m(1, 1) = 1.0;
        CHECK_THROWS_AS(sqrt_psd(m), NotPsd);
    }
}

TEST_CASE("splitmix stream is deterministic") {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    SplitMix64 c(42);
    CHECK(c.next_u64() == SplitMix64(42).next_u64());
}

TEST_CASE("random unitaries are unitary") {
    SplitMix64 rng(3);
    for (int t = 0; t < 10; ++t) {
        int n = 2 + int(rng.below(6));
        Mat u = random_unitary(n, rng);
        CHECK((u.adjoint() * u - Mat::identity(n)).max_abs() < 1e-10);
    }
}

TEST_CASE("random distributions normalize") {
    SplitMix64 rng(9);
    for (int t = 0; t < 10; ++t) {
        auto p = random_distribution(4, rng);
        double s = 0;
        for (double v : p) {
            CHECK(v >= 0);
            s += v;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        Mat m = random_column_stochastic(3, 4, rng);
        for (int c = 0; c < 4; ++c) {
            double cs = 0;
            for (int r = 0; r < 3; ++r) cs += m(r, c).real();
            CHECK(cs == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}
