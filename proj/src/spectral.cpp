#include "lueq/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "lueq/tensor_ops.hpp"

namespace lueq {

namespace {

// Cluster boundaries [start, end) over descending values with a greedy gap rule.
std::vector<std::pair<int, int>> cluster_ranges(const RealVector& values, double tol) {
  std::vector<std::pair<int, int>> ranges;
  const int d = static_cast<int>(values.size());
  int start = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || values(i - 1) - values(i) > tol) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  return ranges;
}

// Rotate the columns of a degenerate cluster to the ascending eigenbasis of a
// projected diagonal operator; recurse on remaining ties with the tie-breaker.
void canonicalize_cluster(ComplexMatrix& basis, int start, int end,
                          const RealVector& op_diag, const RealVector& tie_diag) {
  const int m = end - start;
  if (m <= 1) return;
  ComplexMatrix block = basis.middleCols(start, m);
  ComplexMatrix projected = block.adjoint() * op_diag.asDiagonal() * block;
  projected = 0.5 * (projected + projected.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(projected);
  block = block * es.eigenvectors();  // ascending projected eigenvalues
  basis.middleCols(start, m) = block;
  // Split still-tied sub-ranges and break them with the second operator.
  const RealVector& w = es.eigenvalues();
  int sub_start = 0;
  for (int i = 1; i <= m; ++i) {
    if (i == m || w(i) - w(i - 1) > 1e-9) {
      const int sub_m = i - sub_start;
      if (sub_m > 1) {
        ComplexMatrix sub = basis.middleCols(start + sub_start, sub_m);
        ComplexMatrix p2 = sub.adjoint() * tie_diag.asDiagonal() * sub;
        p2 = 0.5 * (p2 + p2.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es2(p2);
        basis.middleCols(start + sub_start, sub_m) = sub * es2.eigenvectors();
      }
      sub_start = i;
    }
  }
}

void fix_column_phases(ComplexMatrix& basis) {
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const double mx = basis.col(k).cwiseAbs().maxCoeff();
    if (mx <= 0) continue;
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, k)) >= mx * (1.0 - 1e-12)) {
        pick = i;
        break;
      }
    }
    const Complex ph = basis(pick, k) / std::abs(basis(pick, k));
    basis.col(k) /= ph;
  }
}

RealVector sorted_eigenvalues(const ComplexMatrix& reduced) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (reduced + reduced.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  RealVector v = es.eigenvalues();
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return v;
}

}  // namespace

Spectrum eig_hermitian_matrix(const ComplexMatrix& h, double tol_herm, double tol_cluster) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eig_hermitian: matrix must be square");
  const double herm_dev = (h - h.adjoint()).norm();
  if (herm_dev > tol_herm)
    throw std::invalid_argument("eig_hermitian: input not Hermitian, ||M - M^dag||_F = " +
                                std::to_string(herm_dev));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  const int d = static_cast<int>(h.rows());
  Spectrum spec;
  spec.values = es.eigenvalues().reverse();
  spec.basis = es.eigenvectors().rowwise().reverse();
  RealVector position(d), tie(d);
  for (int i = 0; i < d; ++i) {
    position(i) = static_cast<double>(i + 1);
    tie(i) = std::sin(0.7 * (i + 1) + 0.3);
  }
  for (const auto& [start, end] : cluster_ranges(spec.values, tol_cluster))
    canonicalize_cluster(spec.basis, start, end, position, tie);
  fix_column_phases(spec.basis);
  return spec;
}

Spectrum eig_hermitian(const MultipartiteState& s, double tol_cluster) {
  return eig_hermitian_matrix(s.matrix(), s.tolerances().herm, tol_cluster);
}

GaugeBlockStructure group_spectrum(const RealVector& values, double tol_cluster) {
  GaugeBlockStructure st;
  for (const auto& [start, end] : cluster_ranges(values, tol_cluster)) {
    GaugeBlock b;
    b.multiplicity = end - start;
    b.value = values.segment(start, end - start).mean();
    st.blocks.push_back(b);
  }
  return st;
}

bool spectra_compatible(const RealVector& v1, const RealVector& v2, double tol) {
  if (v1.size() != v2.size())
    throw std::invalid_argument("spectra_compatible: dimension mismatch");
  return (v1 - v2).cwiseAbs().maxCoeff() <= tol;
}

ScreenReport invariant_screens(const MultipartiteState& s1, const MultipartiteState& s2,
                               int pmax) {
  if (!(s1.dims() == s2.dims()))
    throw std::invalid_argument("invariant_screens: dimension mismatch");
  ScreenReport report;
  const double tol = 1e-8;

  // Reduced-state spectra per subsystem.
  for (int k = 1; k <= s1.dims().n(); ++k) {
    ComplexMatrix r1 = s1.matrix();
    ComplexMatrix r2 = s2.matrix();
    // Trace out all subsystems except k.
    std::vector<int> remaining = s1.dims().list();
    int target = k;
    while (static_cast<int>(remaining.size()) > 1) {
      const int drop = (target > 1) ? 1 : 2;
      MultipartiteDims cur(remaining);
      r1 = partial_trace(r1, cur, drop);
      r2 = partial_trace(r2, cur, drop);
      remaining.erase(remaining.begin() + (drop - 1));
      if (drop < target) --target;
    }
    ScreenCheck c;
    c.name = "subsystem " + std::to_string(k) + " reduced spectrum";
    c.max_deviation = (sorted_eigenvalues(r1) - sorted_eigenvalues(r2)).cwiseAbs().maxCoeff();
    c.passed = c.max_deviation <= tol;
    if (!c.passed)
      c.detail = "reduced spectra differ by " + std::to_string(c.max_deviation);
    report.checks.push_back(std::move(c));
  }

  // Eigenvector trace invariants Tr[(A A^dag)^p] for bipartite states.
  if (s1.dims().n() != 2) {
    ScreenCheck c;
    c.name = "eigenvector trace invariants";
    c.applicable = false;
    c.detail = "only defined for bipartite states";
    report.checks.push_back(std::move(c));
    return report;
  }
  const int m = s1.dims().dim(1);
  const int n = s1.dims().dim(2);
  const Spectrum sp1 = eig_hermitian(s1);
  const Spectrum sp2 = eig_hermitian(s2);
  const GaugeBlockStructure st = group_spectrum(sp1, 1e-8);
  const std::vector<int> offsets = st.offsets();
  for (int b = 0; b < st.r(); ++b) {
    const bool nondegenerate = st.blocks[static_cast<size_t>(b)].multiplicity == 1;
    for (int j = 0; j < st.blocks[static_cast<size_t>(b)].multiplicity; ++j) {
      const int alpha = offsets[static_cast<size_t>(b)] + j;
      // Row-major reshape of the composite eigenvector into an m x n matrix.
      ComplexMatrix a(m, n), bmat(m, n);
      for (int r = 0; r < m; ++r)
        for (int cidx = 0; cidx < n; ++cidx) {
          a(r, cidx) = sp1.basis(static_cast<Eigen::Index>(r) * n + cidx, alpha);
          bmat(r, cidx) = sp2.basis(static_cast<Eigen::Index>(r) * n + cidx, alpha);
        }
      ComplexMatrix ga = a * a.adjoint();
      ComplexMatrix gb = bmat * bmat.adjoint();
      ComplexMatrix pa = ComplexMatrix::Identity(m, m);
      ComplexMatrix pb = ComplexMatrix::Identity(m, m);
      double dev = 0;
      for (int p = 1; p <= pmax; ++p) {
        pa = pa * ga;
        pb = pb * gb;
        dev = std::max(dev, std::abs(pa.trace() - pb.trace()));
      }
      ScreenCheck c;
      c.name = "eigenvector " + std::to_string(alpha + 1) + " trace invariants";
      c.applicable = nondegenerate;
      c.max_deviation = dev;
      c.passed = dev <= tol;
      if (!nondegenerate)
        c.detail = "informational: eigenvector lies in a degenerate block (gauge-dependent)";
      else if (!c.passed)
        c.detail = "Tr[(AA^dag)^p] mismatch up to " + std::to_string(dev);
      report.checks.push_back(std::move(c));
    }
  }
  return report;
}

}  // namespace lueq
