#pragma once

#include <cstdint>
#include <vector>

#include "qbn/measure.hpp"

namespace qbn {

// Weighted collection of signal density matrices on one Hilbert space.
struct Ensemble {
    int dim = 0;
    std::vector<double> weights;
    std::vector<Mat> signals;

    int size() const { return int(signals.size()); }
    void check() const;  // throws on invalid weights/signals
};

// rho = sum_a w_a rho_a
Mat ensemble_avg(const Ensemble& e);

// chi = S(rho) - sum_a w_a S(rho_a)
double holevo(const Ensemble& e);

// Net with a scalar-weight signal source: reducing onto q reproduces the
// ensemble average.
QbNet scalar_weight_net(const Ensemble& e);
// Net with orthogonal-projector weights: reducing onto (a, q) reproduces
// sigma = sum_a w_a |a><a| (x) rho_a, whose mutual entropy S(a:q) equals chi.
QbNet orthogonal_weight_net(const Ensemble& e);

// Reduction recipes matching the two source nets.
DensityMatrix scalar_weight_state(const QbNet& net);      // axes: q
DensityMatrix orthogonal_weight_state(const QbNet& net);  // axes: a, q

struct ChannelTable {
    std::vector<double> prior;                 // P(a) = w_a
    std::vector<std::vector<double>> cond;     // cond[a][b] = P(b|a)
    std::vector<std::vector<double>> posterior() const;  // Bayes P(a|b)
};

// P(b|a) = tr(F_b rho_a)
ChannelTable channel(const Ensemble& e, const Pom& pom);

// H(a:b) of the joint P(a) P(b|a), via the expression engine.
double mutual_info(const ChannelTable& t);

struct AccInfoResult {
    Pom pom;
    double value = 0;
    int best_restart = -1;
};

// Derivative-free maximization of the transmitted information over pure
// POMs with `outcomes` elements: seeded random-unitary restarts, each
// refined by coordinate golden-section sweeps over Givens-rotation
// parameters. Deterministic for a fixed seed; restarts merge by maximum
// value with ties going to the earlier restart. When a baseline POM is
// supplied it is refined alongside (restart -1) so the result never falls
// below it.
AccInfoResult maximize_accessible_info(const Ensemble& e, int outcomes, int restarts,
                                       uint64_t seed, const Pom* baseline = nullptr);

struct HolevoNetReport {
    double chi = 0;
    double mutual_chain_residual = 0;   // |S(a:(bf,qf,xf)) - chi| on the full net
    double h_equals_s_residual = 0;     // |H(a:bf) - S(a:bf)| on the full net
    double chain_slack = 0;             // min slack of the inequality chain
    double diagonal_residual = 0;       // off-diagonal mass of tr_{qf,xf} rho_f
    double outcome_residual = 0;        // max |diag - P(a,b)|
    bool ok(double tol) const;
};

// Builds the orthogonal-weight source net extended by the general dilation
// of the POM and verifies the information chain that bounds the transmitted
// information by chi.
HolevoNetReport holevo_net_check(const Ensemble& e, const Pom& pom);

// The equilateral three-signal qubit ensemble and the matching
// complement measurement.
Ensemble trine_ensemble();
Pom trine_pom();
// Two-copy variant of the trine ensemble.
Ensemble double_trine_ensemble();
// Tensor square of a POM (product measurement on two copies).
Pom tensor_pom(const Pom& a, const Pom& b);

}  // namespace qbn
