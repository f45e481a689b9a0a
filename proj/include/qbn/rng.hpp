#pragma once

#include <cstdint>
#include <vector>

#include "qbn/linalg.hpp"

namespace qbn {

// Seeded 64-bit generator with the splitmix64 recurrence:
//   state += 0x9E3779B97F4A7C15
//   z = state; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
// Doubles are (z >> 11) * 2^-53.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    uint64_t below(uint64_t n) { return next_u64() % n; }

    double gaussian();
    Cplx cgaussian() { return Cplx(gaussian(), gaussian()); }

  private:
    uint64_t state_;
};

// Haar-ish random unitary: complex Gaussian matrix orthonormalized by
// modified Gram-Schmidt.
Mat random_unitary(int n, SplitMix64& rng);

// Unit-norm random complex vector.
CVec random_state(int n, SplitMix64& rng);

// Full-rank random density matrix (normalized Wishart).
Mat random_density(int n, SplitMix64& rng);

// Probability vector sampled from a flat Dirichlet.
std::vector<double> random_distribution(int n, SplitMix64& rng);

// Matrix with non-negative entries and unit column sums.
Mat random_column_stochastic(int rows, int cols, SplitMix64& rng);

}  // namespace qbn
