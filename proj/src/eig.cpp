#include "qbn/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qbn {

namespace {

double off_diagonal_norm(const Mat& a) {
    double s = 0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace

Mat EigenDecomposition::reconstruct() const {
    const Mat& v = eigenvectors;
    Mat lam = Mat::diag(eigenvalues);
    return v * lam * v.adjoint();
}

EigenDecomposition hermitian_eig(const Mat& a, double herm_tol) {
    if (!a.square()) throw NotHermitian("matrix is not square");
    double scale = std::max(1.0, a.max_abs());
    if (a.hermiticity_residual() > herm_tol * scale)
        throw NotHermitian("matrix is not Hermitian within tolerance");

    const int n = a.rows();
    Mat m = a;
    // Symmetrize to kill rounding-level asymmetry before iterating.
    for (int i = 0; i < n; ++i) {
        m(i, i) = std::real(m(i, i));
        for (int j = i + 1; j < n; ++j) {
            Cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
    Mat w = Mat::identity(n);

    const double threshold = 1e-13 * scale;
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(m) <= threshold) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                Cplx b = m(p, q);
                double babs = std::abs(b);
                if (babs <= threshold * 1e-2) continue;

                // Unitary 2x2 rotation V = [[c, s*e^{i phi}], [-s*e^{-i phi}, c]]
                // chosen so (V^dag M V)(p,q) = 0, with b = |b| e^{i phi}.
                Cplx phase = b / babs;
                double app = std::real(m(p, p));
                double aqq = std::real(m(q, q));
                double tau = (aqq - app) / (2.0 * babs);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                Cplx sp = s * phase;         // V(p,q)
                Cplx spc = s * std::conj(phase);  // -V(q,p)

                // Update rows/columns p and q of m (m <- V^dag m V).
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    Cplx mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - spc * mkq;
                    m(k, q) = sp * mkp + c * mkq;
                    m(p, k) = std::conj(m(k, p));
                    m(q, k) = std::conj(m(k, q));
                }
                m(p, p) = app - t * babs;
                m(q, q) = aqq + t * babs;
                m(p, q) = 0;
                m(q, p) = 0;

                for (int k = 0; k < n; ++k) {
                    Cplx wkp = w(k, p), wkq = w(k, q);
                    w(k, p) = c * wkp - spc * wkq;
                    w(k, q) = sp * wkp + c * wkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = std::real(m(i, i));
    std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] > diag[j]; });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Mat(n, n);
    for (int c = 0; c < n; ++c) {
        out.eigenvalues[c] = diag[order[c]];
        for (int r = 0; r < n; ++r) out.eigenvectors(r, c) = w(r, order[c]);
    }
    return out;
}

Mat sqrt_psd(const Mat& f) {
    EigenDecomposition e = hermitian_eig(f);
    std::vector<double> roots(e.eigenvalues.size());
    for (size_t i = 0; i < roots.size(); ++i) {
        double lam = e.eigenvalues[i];
        if (lam < -1e-9) throw NotPsd("matrix has a negative eigenvalue");
        roots[i] = lam > 0 ? std::sqrt(lam) : 0.0;
    }
    return e.eigenvectors * Mat::diag(roots) * e.eigenvectors.adjoint();
}

Mat log2_pd(const Mat& a) {
    EigenDecomposition e = hermitian_eig(a);
    std::vector<double> logs(e.eigenvalues.size());
    for (size_t i = 0; i < logs.size(); ++i) {
        if (e.eigenvalues[i] <= 1e-14) throw NotPsd("log2 needs a positive-definite matrix");
        logs[i] = std::log2(e.eigenvalues[i]);
    }
    return e.eigenvectors * Mat::diag(logs) * e.eigenvectors.adjoint();
}

}  // namespace qbn
