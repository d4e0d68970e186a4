#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lueq/types.hpp"

namespace lueq {

// Haar-distributed random unitary: QR of a complex Ginibre matrix with the
// phases of R's diagonal absorbed into Q.
ComplexMatrix haar_unitary(int d, std::mt19937_64& rng);

struct RandomPair {
  MultipartiteState rho1;
  MultipartiteState rho2;
  std::vector<ComplexMatrix> planted;  // rho2 = (⊗ planted_k) rho1 (⊗ planted_k)^dag
};

// Deterministic pseudorandom pair of locally-unitarily equivalent density
// matrices: rho1 has a Haar-random eigenbasis and a spectrum with the given
// eigenvalue multiplicity profile (empty profile = all multiplicities one);
// rho2 conjugates rho1 by independent Haar-random factors on each subsystem.
// Cluster gaps stay above 2e-2/d and eigenvalues above 1e-2/d before trace
// normalization, so small spectral perturbations keep positivity and ordering.
RandomPair random_pair(const MultipartiteDims& dims, const std::vector<int>& multiplicities,
                       std::uint64_t seed);

}  // namespace lueq
