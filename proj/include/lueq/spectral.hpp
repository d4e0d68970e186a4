#pragma once

#include <string>
#include <vector>

#include "lueq/types.hpp"

namespace lueq {

// Eigendecomposition of a Hermitian matrix: values descending, basis columns
// are the matching orthonormal eigenvectors.
struct Spectrum {
  RealVector values;
  ComplexMatrix basis;
};

struct GaugeBlock {
  double value = 0;      // representative eigenvalue (cluster mean)
  int multiplicity = 0;  // n_k >= 1
};

// Clustered multiplicity structure of a spectrum: the shape of the
// block-diagonal gauge unitaries commuting with diag(values).
struct GaugeBlockStructure {
  std::vector<GaugeBlock> blocks;

  int r() const { return static_cast<int>(blocks.size()); }
  int s() const {
    int count = 0;
    for (const auto& b : blocks)
      if (b.multiplicity == 2) ++count;
    return count;
  }
  int dimension() const {
    int d = 0;
    for (const auto& b : blocks) d += b.multiplicity;
    return d;
  }
  // Column offset of each block in the assembled matrix.
  std::vector<int> offsets() const {
    std::vector<int> off;
    int acc = 0;
    for (const auto& b : blocks) {
      off.push_back(acc);
      acc += b.multiplicity;
    }
    return off;
  }
};

// Deterministic Hermitian eigendecomposition, descending eigenvalues.
// Within each eigenvalue cluster (gap <= tol_cluster) the basis is rotated to
// diagonalize the projected position operator diag(1..d) (remaining ties are
// split by a second fixed generic diagonal), then every column's
// largest-magnitude entry (ties: lowest index) is made real positive. This
// makes the basis independent of eigensolver internals; the gauge search
// absorbs the remaining degenerate-block freedom.
Spectrum eig_hermitian_matrix(const ComplexMatrix& h, double tol_herm = 1e-10,
                              double tol_cluster = 1e-8);
Spectrum eig_hermitian(const MultipartiteState& s, double tol_cluster = 1e-8);

// Greedy clustering of the sorted eigenvalues: consecutive values join a block
// iff their gap is <= tol_cluster; representative = block mean.
GaugeBlockStructure group_spectrum(const RealVector& values, double tol_cluster);
inline GaugeBlockStructure group_spectrum(const Spectrum& spec, double tol_cluster) {
  return group_spectrum(spec.values, tol_cluster);
}

// True iff max_k |values1_k - values2_k| <= tol over the sorted spectra.
bool spectra_compatible(const RealVector& v1, const RealVector& v2, double tol);
inline bool spectra_compatible(const Spectrum& s1, const Spectrum& s2, double tol) {
  return spectra_compatible(s1.values, s2.values, tol);
}

struct ScreenCheck {
  std::string name;
  bool applicable = true;  // inapplicable checks never affect the verdict
  bool passed = true;
  double max_deviation = 0;
  std::string detail;
};

struct ScreenReport {
  std::vector<ScreenCheck> checks;

  bool all_passed() const {
    for (const auto& c : checks)
      if (c.applicable && !c.passed) return false;
    return true;
  }
  const ScreenCheck* first_failure() const {
    for (const auto& c : checks)
      if (c.applicable && !c.passed) return &c;
    return nullptr;
  }
};

// Necessary-condition screens; any applicable failure certifies inequivalence.
//  - subsystem spectra: local unitaries preserve each reduced state's spectrum.
//  - eigenvector trace invariants (bipartite states only): for eigenvectors in
//    multiplicity-1 blocks, reshaped to M x N matrices A, the values
//    Tr[(A A^dag)^p], p = 1..pmax must agree. Within degenerate blocks the same
//    comparison is reported with applicable=false: eigenvectors there are
//    gauge-dependent and the naive screen can misfire on equivalent pairs.
ScreenReport invariant_screens(const MultipartiteState& s1, const MultipartiteState& s2,
                               int pmax);

}  // namespace lueq
