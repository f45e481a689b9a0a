#pragma once

#include <string>
#include <vector>

#include "qbn/density.hpp"
#include "qbn/netcore.hpp"

namespace qbn {

// Joint probability table over an ordered list of variables; values are
// indexed row-major with the first variable slowest-varying.
struct ProbTable {
    std::vector<Axis> vars;
    std::vector<double> p;

    uint64_t size() const { return total_dim(dims()); }
    std::vector<int> dims() const;
    double& at(const std::vector<int>& idx) { return p[flatten_index(dims(), idx)]; }
    double at(const std::vector<int>& idx) const { return p[flatten_index(dims(), idx)]; }

    ProbTable marginal(const std::vector<std::string>& keep) const;
    double entropy() const;  // -sum p log2 p
    double sum() const;
};

// Probability of observing the nodes in gamma, with the remaining internal
// nodes unmeasured (e-summed) and remaining external nodes passively
// measured (traced). Variables come back in net declaration order.
ProbTable p_gamma(const QbNet& net, const std::vector<std::string>& gamma);

// Conditional family: table over g1 - g2 given the flat assignment x2 of g2.
// The denominator sums the joint over the g1 variables (the family is not
// closed under marginalization, so this is not the g2 marginal in general).
ProbTable p_gamma_cond(const QbNet& net, const std::vector<std::string>& g1,
                       const std::vector<std::string>& g2, const std::vector<int>& x2);

// Diagonal probabilities of a density matrix reduced onto gamma.
ProbTable p_rho(const DensityMatrix& rho, const std::vector<std::string>& gamma);

ProbTable p_rho_cond(const DensityMatrix& rho, const std::vector<std::string>& g1,
                     const std::vector<std::string>& g2, const std::vector<int>& x2);

struct ClosureReport {
    double p_family_residual = 0;     // max marginalization mismatch of P[.]
    double p_mu_family_residual = 0;  // same for the meta-matrix family
};

// Scans every disjoint pair (gamma, gamma') of node subsets and reports the
// worst marginalization residual for both probability families.
ClosureReport closure_check(const QbNet& net);

// ---- classical nets ---------------------------------------------------------

// Full joint distribution of a classical net by story enumeration.
ProbTable joint_table(const CbNet& net);

// Classical entropy of a compound expression over a joint table.
double h_entropy(const ProbTable& joint, const EntropyExpr& expr);
double h_entropy(const ProbTable& joint, const std::string& expr);

// Classical entropy of a compound expression over a net's joint distribution.
double h_entropy(const CbNet& net, const EntropyExpr& expr);
double h_entropy(const CbNet& net, const std::string& expr);

}  // namespace qbn
