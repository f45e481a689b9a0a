#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qbn/density.hpp"
#include "qbn/netcore.hpp"
#include "qbn/qprob.hpp"
#include "qbn/rng.hpp"

namespace qbn {

// One machine-checkable statement about a fixture: |expected - actual| <= tol.
struct Expected {
    std::string name;
    double expected;
    double actual;
    double tol;

    bool pass() const { return std::abs(expected - actual) <= tol; }
};

// An inequality check encoded as "violation must be zero": slack >= -tol.
Expected ineq(const std::string& name, double slack, double tol);

struct ProtocolFixture {
    QbNet net;
    std::vector<Expected> checks;

    bool all_pass() const;
    double worst() const;
};

// ---- entangled-pair fixtures -------------------------------------------------

// Singlet source feeding two copy nodes; reproduces the entropy table of the
// unmeasured-pair state and its projective reductions.
ProtocolFixture epr_net();

// EPR pair with one side rotated into the conjugate basis before readout;
// checks the coherence-restoring reduction and projection-order symmetry.
ProtocolFixture eraser_net();

// Bell measurement plus conditional correction; checks the K identities,
// exact state transfer for every measurement branch, and both entropy
// tables. alpha must be a unit vector.
ProtocolFixture teleport_net(const std::array<Cplx, 2>& alpha);

// Two classical bits through one qubit plus a shared pair; checks the K
// identities, state transfer, and both entropy tables.
ProtocolFixture dense_coding_net(const std::array<Cplx, 4>& alpha);

// ---- open-system fixtures -------------------------------------------------------

struct SysEnvParams {
    Mat alpha;   // joint (q, r) amplitude, dq x dr, unit Frobenius norm
    CVec beta1;  // environment state, dim de
    Mat u1;      // unitary on dq * de
    CVec beta2;  // second interaction (steps == 2)
    Mat u2;
};
SysEnvParams random_sys_env_params(int steps, int dq, int dr, int de, uint64_t seed);

// System coupled to fresh environments once or twice; checks purity of the
// e-summed states, the entropy-transfer inequality, and for two steps the
// conditional-entropy growth along the chain.
ProtocolFixture sys_env_net(int steps, const SysEnvParams& p);

struct TwoMixParams {
    Mat alpha1;  // (q1, r1) amplitude
    Mat alpha2;  // (q2, r2) amplitude
    Mat u;       // unitary on dq1 * dq2
};
TwoMixParams random_two_mix_params(int dq1, int dr1, int dq2, int dr2, uint64_t seed);

// Two purified mixtures scattering through one unitary; checks the equality
// of the two entanglement entropies and the two-sided bound on the entropy
// change of each subsystem.
ProtocolFixture two_mixtures_net(const TwoMixParams& p);

// ---- classical examples -----------------------------------------------------------

CbNet diverging_net(const std::vector<int>& dims, SplitMix64& rng);        // a <- b -> c
CbNet converging_net(const std::vector<int>& dims, SplitMix64& rng);       // a -> b <- c
CbNet fully_connected3_net(const std::vector<int>& dims, SplitMix64& rng); // a -> b -> c, a -> c
// Chain q1 -> q2 -> ... -> qN with random column-stochastic matrices.
CbNet markov_chain_net(const std::vector<int>& dims, SplitMix64& rng);

// Structural entropy constraints of the three-node example nets.
std::vector<Expected> cb_example_checks(uint64_t seed, int trials);

// Data-processing inequalities for a 3- or 4-node chain (by node count).
std::vector<Expected> dp_inequality_check(const CbNet& chain);

// Extends a 3-chain by its time-reversed tail and checks that the mutual
// entropies survive the reversal.
std::vector<Expected> time_reversal_check(const CbNet& chain3);

}  // namespace qbn
