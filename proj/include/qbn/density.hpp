#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qbn/eig.hpp"
#include "qbn/entexpr.hpp"
#include "qbn/netcore.hpp"

namespace qbn {

struct Axis {
    std::string node;
    int dim;
};

// Labelled state vector over a tensor product of node spaces, indexed
// row-major with the first axis slowest-varying.
struct MetaState {
    std::vector<Axis> axes;
    CVec amplitudes;

    uint64_t dim() const;
    int axis_index(const std::string& node) const;  // throws UnknownAxis
};

// Hermitian unit-trace operator over a labelled tensor product of node
// spaces. Hermiticity and trace are checked at construction; positivity is
// enforced wherever eigenvalues are consumed.
class DensityMatrix {
  public:
    DensityMatrix(std::vector<Axis> axes, Mat m);

    const std::vector<Axis>& axes() const { return axes_; }
    const Mat& matrix() const { return m_; }
    int dim() const { return m_.rows(); }
    int axis_index(const std::string& node) const;  // throws UnknownAxis
    bool has_axis(const std::string& node) const;
    std::vector<int> dims() const;

  private:
    std::vector<Axis> axes_;
    Mat m_;
};

// ---- nets to states -------------------------------------------------------

inline constexpr uint64_t kMetaVectorCap = uint64_t(1) << 20;
inline constexpr uint64_t kMetaMatrixCap = uint64_t(1) << 11;

// Vector of all story amplitudes over the net's node spaces.
MetaState meta_state(const QbNet& net);
// Rank-1 density matrix built from the meta state.
DensityMatrix meta_density(const QbNet& net);

// ---- reductions -----------------------------------------------------------

DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<std::string>& nodes);
DensityMatrix project_reduce(const DensityMatrix& rho, const std::string& node, const CVec& vec);
// Projects each listed node onto the uniform-superposition average of its
// basis, then normalizes; models an unmeasured node.
DensityMatrix esum(const DensityMatrix& rho, const std::set<std::string>& nodes);

// Unnormalized projection of one axis: <vec| rho |vec> over the remaining
// axes, with no division by the normalization constant.
Mat project_unnormalized(const DensityMatrix& rho, const std::string& node, const CVec& vec);

// A reduction recipe applied to the meta density matrix of a net. Nodes not
// mentioned stay uncommitted. Evaluation contracts e-summed and projected
// axes on the story-amplitude vector first and postpones traces to the
// reduced operator, so nets far above the meta-state cap stay tractable.
class NetReduction {
  public:
    NetReduction& esum(const std::vector<std::string>& nodes);
    NetReduction& trace(const std::vector<std::string>& nodes);
    NetReduction& project(const std::string& node, CVec vec);
    NetReduction& project_state(const std::string& node, int flat_state);

    DensityMatrix run(const QbNet& net) const;

    // Contracted story-amplitude vector over the non-contracted axes, in
    // declaration order, without normalization. Traced nodes are kept.
    MetaState raw_vector(const QbNet& net) const;

  private:
    std::map<std::string, CVec> contractions_;       // node -> projection vector (empty = Av)
    std::map<std::string, int> project_markers_;     // node -> basis state
    std::set<std::string> traced_;
};

// e-sums the meta density matrix over all internal nodes; pure by
// construction, acting on the external nodes.
DensityMatrix rho_out(const QbNet& net);

// ---- spectra and entropies -------------------------------------------------

EigenDecomposition eigensystem(const DensityMatrix& rho);

// -sum lambda log2 lambda; eigenvalues in [-1e-9, 0) clip to zero, below
// that throws NotPsd.
double von_neumann_entropy(const DensityMatrix& rho);

// Quantum entropy of a compound expression: each joint term is the von
// Neumann entropy of the reduction onto that node set.
double s_entropy(const DensityMatrix& rho, const EntropyExpr& expr);
double s_entropy(const DensityMatrix& rho, const std::string& expr);

// Classical entropy of the diagonal distributions of the same reductions.
double h_rho(const DensityMatrix& rho, const EntropyExpr& expr);
double h_rho(const DensityMatrix& rho, const std::string& expr);

// Coherence H_rho - S_rho of a node collection; 0 iff the reduction is
// diagonal in the node basis.
double coherence(const DensityMatrix& rho, const std::vector<std::string>& nodes);

// Diagonal probabilities of the reduction onto `gamma` (declaration order).
std::vector<double> diag_distribution(const DensityMatrix& rho,
                                      const std::vector<std::string>& gamma);

// ---- mixed states -----------------------------------------------------------

// Pure bipartite vector over axes(rho) plus one ancilla axis whose partial
// trace over the ancilla reproduces rho.
MetaState purify(const DensityMatrix& rho, const std::string& ancilla_name = "anc");

// Three-node net (j -> q, j -> r) whose q reduction reproduces an arbitrary
// density matrix beta.
QbNet mixed_state_net(const Mat& beta);

}  // namespace qbn
