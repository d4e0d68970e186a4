#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "lueq/types.hpp"

namespace lueq {

// Full SVD of realign(W, M, N). Since realignment permutes entries,
// sum sigma_i^2 = ||W||_F^2.
struct RealignmentSVD {
  RealVector sigma;     // descending
  ComplexMatrix left;   // columns mu_i  (M^2 x q)
  ComplexMatrix right;  // columns nu_i  (N^2 x q)
  int m = 0, n = 0;
  double deficiency = 0;  // 1 - sigma_1^2 / sum sigma_i^2 (0 for a zero matrix)
};

RealignmentSVD realignment_svd(const ComplexMatrix& w, int m, int n);

// Thrown when a realignment is not rank 1 within tol_rank, i.e. the matrix is
// not a tensor product across the bipartition.
class RankError : public std::runtime_error {
 public:
  RankError(int bipartition, double deficiency, double tol_rank)
      : std::runtime_error("not a tensor product at bipartition " + std::to_string(bipartition) +
                           ": rank-1 deficiency = " + std::to_string(deficiency) +
                           (deficiency <= 10 * tol_rank
                                ? " (warning band: within 10x of tol_rank " + std::to_string(tol_rank) + ")"
                                : "")),
        bipartition_(bipartition),
        deficiency_(deficiency),
        near_miss_(deficiency <= 10 * tol_rank) {}

  int bipartition() const { return bipartition_; }
  double deficiency() const { return deficiency_; }
  // True when the deficiency is within (tol_rank, 10*tol_rank]: near-rank-1
  // inputs usually signal a tolerance/degeneracy interplay worth inspecting.
  bool near_miss() const { return near_miss_; }

 private:
  int bipartition_;
  double deficiency_;
  bool near_miss_;
};

struct KronFactors {
  ComplexMatrix u1, u2;
  double residual = 0;  // ||W - u1 (x) u2||_F
};

// Rank-1 factor extraction across the M|N bipartition of a unitary W:
// u1 = unvec(sqrt(alpha sigma_1) mu_1), u2 = unvec(sqrt(sigma_1/alpha) nu_1*)
// with alpha = M/sigma_1, so both factors are unitary when the deficiency is 0;
// both are projected to the nearest unitary unconditionally. The phase is fixed
// by making u1's largest-magnitude entry real positive, folding the
// compensating phase into u2. Throws RankError when deficiency > tol_rank.
KronFactors nearest_kron_factors(const ComplexMatrix& w, int m, int n, double tol_rank);

struct LocalUnitaryFactorization {
  std::vector<ComplexMatrix> factors;  // u_i is N_i x N_i, unitary
  double residual = 0;                 // ||W - u_1 (x) ... (x) u_n||_F
};

// Recursive peeling of a product unitary into its local factors. Verifies the
// deficiency at every bipartition i|rest first, then peels at 1|rest,
// re-unitarizing the remainder before recursing. Throws RankError naming the
// first bipartition that fails.
LocalUnitaryFactorization factor_local_unitary(const ComplexMatrix& w,
                                               const MultipartiteDims& dims, double tol_rank);

// Internal helper shared with the gauge search: peel without any rank check
// (best rank-1 approximation at every step, unconditional unitarization).
LocalUnitaryFactorization peel_unchecked(const ComplexMatrix& w, const MultipartiteDims& dims);

// Nearest unitary in Frobenius norm (polar factor).
ComplexMatrix nearest_unitary(const ComplexMatrix& a);

}  // namespace lueq
