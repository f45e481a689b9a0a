#pragma once

#include <vector>

#include "qbn/linalg.hpp"

namespace qbn {

// Eigenvalues in descending order; eigenvectors() holds the matching
// orthonormal eigenvectors as columns.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    Mat eigenvectors;

    Mat reconstruct() const;
};

// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
// Throws NotHermitian when the input is not Hermitian within tolerance.
EigenDecomposition hermitian_eig(const Mat& a, double herm_tol = 1e-9);

// Hermitian non-negative square root via the eigendecomposition.
// Eigenvalues in [-1e-9, 0) are clipped to zero; below that throws NotPsd.
Mat sqrt_psd(const Mat& f);

// log2 of a positive-definite Hermitian matrix. Throws NotPsd when an
// eigenvalue is not strictly positive.
Mat log2_pd(const Mat& a);

}  // namespace qbn
