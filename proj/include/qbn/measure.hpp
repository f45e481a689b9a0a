#pragma once

#include <vector>

#include "qbn/density.hpp"
#include "qbn/netcore.hpp"
#include "qbn/qprob.hpp"

namespace qbn {

// Probability operator measure: a complete set of non-negative Hermitian
// operators on one Hilbert space.
struct Pom {
    int dim = 0;
    std::vector<Mat> elements;

    int outcomes() const { return int(elements.size()); }
};

struct PomReport {
    double hermiticity_residual = 0;
    double min_eigenvalue = 0;
    double completeness_residual = 0;  // max-abs of (sum F_b - I)
    bool ok() const {
        return hermiticity_residual <= 1e-9 && min_eigenvalue >= -1e-9 &&
               completeness_residual <= 1e-9;
    }
};

PomReport validate_pom(const Pom& pom);

struct PomClass {
    bool orthogonal = false;   // F_b F_b' = 0 for b != b'
    bool pure = false;         // every F_b is a rank-1 projector
    bool von_neumann = false;  // both
};

PomClass classify_pom(const Pom& pom);

// P(b) = tr(rho F_b) for a single-axis density matrix.
ProbTable measure_probs(const DensityMatrix& rho, const Pom& pom);

enum class DilationVariant {
    OrthogonalProjector,  // ancilla register b only; needs orthogonal projectors
    General,              // ancilla registers b and x; works for any POM
};

// Fills the non-fixed columns of u with an orthonormal completion of the
// fixed ones, by modified Gram-Schmidt over canonical basis seeds.
void orthonormal_complete(Mat& u, const std::vector<bool>& fixed_columns);

// Unitary on the q (x) ancilla space sending |phi>|0...> to
// sum_b (sqrt(F_b)|phi>) |b> (|b>), completed column-by-column with modified
// Gram-Schmidt over canonical seeds.
Mat dilation_unitary(const Pom& pom, DilationVariant variant);

// Extends a preparation net with the dilation of a POM measured on one of
// its nodes. Adds nodes b, t, qf, bf (and x, xf for the general variant);
// the node named by `q` gains the arrow into t.
QbNet pom_net(const Pom& pom, const QbNet& prep, const std::string& q,
              DilationVariant variant);

// Reduction of a POM net per its measurement semantics: e-sum every internal
// node, trace every external node except bf.
DensityMatrix pom_net_outcome(const QbNet& net);

}  // namespace qbn
