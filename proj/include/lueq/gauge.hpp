#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lueq/spectral.hpp"
#include "lueq/types.hpp"

namespace lueq {

// Parameters of one diagonal block of a gauge unitary.
//  multiplicity 1: theta, block = e^{i theta}.
//  multiplicity 2: (phase, t, z1, z2, z3) with t^2 + |z|^2 = 1,
//    block = e^{i phase} [[t + i z3, z1 + i z2], [-z1 + i z2, t - i z3]]
//    (the constant phase extends the special-unitary form to all of U(2);
//    without it blocks of determinant != 1 are unreachable).
//  multiplicity m >= 3: Hermitian generator H, block = exp(iH).
struct GaugeBlockParams {
  int multiplicity = 1;
  double theta = 0;
  double phase = 0, t = 1, z1 = 0, z2 = 0, z3 = 0;
  ComplexMatrix generator;
};

struct GaugeUnitary {
  GaugeBlockStructure structure;
  std::vector<GaugeBlockParams> blocks;
};

// Identity parameters for a structure.
GaugeUnitary identity_gauge(const GaugeBlockStructure& structure);

// Assembles the explicit block-diagonal unitary. Throws on 2-block parameters
// whose normalization is off by more than 1e-6 (renormalizes below that) and
// on non-Hermitian generators.
ComplexMatrix assemble_gauge(const GaugeUnitary& g);

// Inverse of assemble_gauge on block-diagonal unitaries: recovers parameters
// with assemble_gauge(gauge_from_matrix(U, st)) == U up to roundoff.
GaugeUnitary gauge_from_matrix(const ComplexMatrix& u, const GaugeBlockStructure& structure);

// f(g) = sum over bipartitions i of the rank-1 deficiency of
// realign_bipartition(X * assemble_gauge(g) * Y^dag, dims, i).
// Zero exactly when X U Y^dag is a tensor product of local unitaries.
double gauge_objective(const ComplexMatrix& x, const ComplexMatrix& y,
                       const MultipartiteDims& dims, const GaugeUnitary& g);

struct SearchConfig {
  double tol_rank = 1e-7;
  int max_restarts = 64;
  int max_iterations = 500;  // per restart
  std::uint64_t seed = 0;
  bool discrete_phase_grid = true;
  double objective_target = 1e-10;
};

struct SearchResult {
  GaugeUnitary gauge;  // best parameters found
  double f_best = 0;
  // Discrete-grid stage outcome (before any refinement); stage1_ran is false
  // when the grid was disabled.
  bool stage1_ran = false;
  double stage1_f = 0;
  GaugeUnitary stage1_gauge;
  int restarts_used = 0;
  long evaluations = 0;
  double seconds = 0;
  std::string stage;  // which stage produced the best value: grid|refine|restart
};

// Three-stage search for gauge parameters driving the objective to zero:
//  stage 1 (optional): enumerate diagonal gauges with per-eigenvector phases
//    from {0, pi/2, pi, 3pi/2} (first vector pinned to 0, at most 12 gridded
//    vectors). Among grid points reaching objective_target the canonical
//    representative maximizes sum_k |tr u_k| of the extracted local factors
//    (witness closest to identity), then has the fewest nonzero phases, then
//    is lexicographically smallest.
//  stage 2: finite-difference gradient descent with backtracking line search
//    from the best grid candidates (2-block parameters renormalized to the
//    unit sphere after each step; generator blocks unconstrained).
//  stage 3: multi-restart from random parameters until the target or budget.
// Results below 1e-4 are polished by alternating projection between the
// product-unitary set and block-diagonal unitaries, reaching machine precision
// at true solutions. Deterministic for a fixed cfg.seed in the sequential
// schedule; with LUEQ_THREADS > 1 the same f_best is found up to tie order.
SearchResult search_gauge(const ComplexMatrix& x, const ComplexMatrix& y,
                          const MultipartiteDims& dims, const GaugeBlockStructure& structure,
                          const SearchConfig& cfg);

// Number of worker threads honored by the concurrent sections:
// LUEQ_THREADS if set (>= 1), otherwise the machine parallelism.
int thread_budget();

}  // namespace lueq
