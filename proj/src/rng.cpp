#include "qbn/rng.hpp"

#include <cmath>

namespace qbn {

double SplitMix64::gaussian() {
    // Box-Muller; no caching so the stream is a pure function of draw count.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Mat random_unitary(int n, SplitMix64& rng) {
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian();
    // modified Gram-Schmidt on columns
    for (int j = 0; j < n; ++j) {
        CVec col = g.column(j);
        for (int k = 0; k < j; ++k) {
            CVec prev = g.column(k);
            Cplx c = dot(prev, col);
            for (int i = 0; i < n; ++i) col[i] -= c * prev[i];
        }
        double nn = norm2(col);
        for (int i = 0; i < n; ++i) col[i] /= nn;
        g.set_column(j, col);
    }
    return g;
}

CVec random_state(int n, SplitMix64& rng) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.cgaussian();
    double nn = norm2(v);
    for (int i = 0; i < n; ++i) v[i] /= nn;
    return v;
}

Mat random_density(int n, SplitMix64& rng) {
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian();
    Mat rho = g * g.adjoint();
    return rho.scaled(1.0 / rho.trace());
}

std::vector<double> random_distribution(int n, SplitMix64& rng) {
    std::vector<double> p(n);
    double s = 0;
    for (int i = 0; i < n; ++i) {
        p[i] = -std::log(1.0 - rng.uniform());
        s += p[i];
    }
    for (int i = 0; i < n; ++i) p[i] /= s;
    return p;
}

Mat random_column_stochastic(int rows, int cols, SplitMix64& rng) {
    Mat m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        std::vector<double> col = random_distribution(rows, rng);
        for (int i = 0; i < rows; ++i) m(i, j) = col[i];
    }
    return m;
}

}  // namespace qbn
