#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lueq/gauge.hpp"
#include "lueq/spectral.hpp"
#include "lueq/types.hpp"

namespace lueq {

enum class VerdictKind { Equivalent, Inequivalent, Undetermined };

// Product witness rho2 = (w_1 ⊗ ... ⊗ w_n) rho1 (w_1 ⊗ ... ⊗ w_n)^dag.
struct LocalWitness {
  std::vector<ComplexMatrix> factors;
};

struct EquivalenceVerdict {
  VerdictKind kind = VerdictKind::Undetermined;
  std::optional<LocalWitness> witness;  // present exactly when Equivalent
  std::optional<double> residual;       // witness verification residual
  std::string reason;
  std::vector<int> pt_subset;  // 1-based subsystems transposed before the search
  // Gauge-search statistics (zero when the search never ran).
  int restarts = 0;
  double best_objective = 0;
  double seconds = 0;
};

enum class PtMode { Auto, None, Forced };

struct CheckConfig {
  double tol_cluster = 1e-8;
  double tol_rank = 1e-7;
  double tol_verify = 1e-8;
  double tol_spectrum = 1e-8;
  int pmax = 4;
  PtMode pt_mode = PtMode::Auto;
  std::vector<int> forced_pt;  // 1-based, consulted when pt_mode == Forced
  SearchConfig search;
};

// Chooses the subset of subsystems to partially transpose on both states
// before the gauge search. Candidates are the empty set, all singletons and,
// for up to four subsystems, all pairs; the winner maximizes the number of
// distinct eigenvalue clusters of the transformed first state, with ties
// broken by fewer degenerate clusters, then by the earlier candidate (the
// empty set first). Subsets on which the two transformed spectra disagree are
// excluded; they certify inequivalence, which check_equivalence reports.
std::vector<int> pt_select(const MultipartiteState& s1, const MultipartiteState& s2,
                           double tol_cluster = 1e-8, double tol_spectrum = 1e-8);

struct WitnessReport {
  bool ok = false;
  double residual = 0;         // max-abs entry of rho2 - W rho1 W^dag
  double unitarity_error = 0;  // max over factors of the max-abs entry of u u^dag - I
};

// Re-verifies a claimed witness against the original states.
WitnessReport verify_witness(const MultipartiteState& s1, const MultipartiteState& s2,
                             const LocalWitness& w, double tol_verify = 1e-8);

// Full decision pipeline: spectral compatibility, invariant screens,
// partial-transpose selection, gauge search on the eigenbases, factorization
// of the resulting product unitary, and verification of the witness on the
// original (untransposed) states. A failed search yields Undetermined, never
// Inequivalent; Inequivalent is reserved for certified invariant mismatches.
EquivalenceVerdict check_equivalence(const MultipartiteState& s1, const MultipartiteState& s2,
                                     const CheckConfig& cfg);

}  // namespace lueq
