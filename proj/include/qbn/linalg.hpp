#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qbn/errors.hpp"

namespace qbn {

using Cplx = std::complex<double>;
using CVec = std::vector<Cplx>;

// Dense row-major complex matrix. Sized for node matrices and density
// matrices of small tensor products; not meant for large-scale numerics.
class Mat {
  public:
    Mat() : rows_(0), cols_(0) {}
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diag(const std::vector<double>& d) {
        Mat m(int(d.size()), int(d.size()));
        for (size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
        return m;
    }
    static Mat outer(const CVec& u, const CVec& v) {
        Mat m(int(u.size()), int(v.size()));
        for (size_t i = 0; i < u.size(); ++i)
            for (size_t j = 0; j < v.size(); ++j) m(int(i), int(j)) = u[i] * std::conj(v[j]);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Cplx& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const Cplx& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw DimensionMismatch("matrix product shape mismatch");
        Mat r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                Cplx aik = (*this)(i, k);
                if (aik == Cplx{}) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }
    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }
    Mat operator-(const Mat& o) const {
        Mat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }
    Mat scaled(Cplx c) const {
        Mat r = *this;
        for (auto& v : r.a_) v *= c;
        return r;
    }

    Mat adjoint() const {
        Mat r(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    Cplx trace() const {
        Cplx t = 0;
        for (int i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : a_) m = std::max(m, std::abs(v));
        return m;
    }
    double frobenius() const {
        double s = 0;
        for (const auto& v : a_) s += std::norm(v);
        return std::sqrt(s);
    }
    // max |A - A^dagger| over all entries
    double hermiticity_residual() const {
        double m = 0;
        for (int i = 0; i < rows_; ++i)
            for (int j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    CVec apply(const CVec& v) const {
        if (int(v.size()) != cols_) throw DimensionMismatch("matrix-vector shape mismatch");
        CVec r(rows_);
        for (int i = 0; i < rows_; ++i) {
            Cplx s = 0;
            for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    CVec column(int j) const {
        CVec c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_column(int j, const CVec& c) {
        for (int i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

  private:
    int rows_, cols_;
    CVec a_;
};

inline Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j) == Cplx{}) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
    return r;
}

inline Cplx dot(const CVec& u, const CVec& v) {
    Cplx s = 0;
    for (size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}
inline double norm2(const CVec& v) { return std::sqrt(std::real(dot(v, v))); }

// --- mixed-radix index helpers (first dimension varies slowest) ---

inline uint64_t total_dim(const std::vector<int>& dims) {
    uint64_t p = 1;
    for (int d : dims) p *= uint64_t(d);
    return p;
}

inline uint64_t flatten_index(const std::vector<int>& dims, const std::vector<int>& idx) {
    uint64_t f = 0;
    for (size_t i = 0; i < dims.size(); ++i) f = f * uint64_t(dims[i]) + uint64_t(idx[i]);
    return f;
}

inline std::vector<int> unflatten_index(const std::vector<int>& dims, uint64_t flat) {
    std::vector<int> idx(dims.size());
    for (size_t i = dims.size(); i-- > 0;) {
        idx[i] = int(flat % uint64_t(dims[i]));
        flat /= uint64_t(dims[i]);
    }
    return idx;
}

}  // namespace qbn
