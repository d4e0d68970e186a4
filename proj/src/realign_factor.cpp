#include "lueq/realign_factor.hpp"

#include <cmath>

#include "lueq/tensor_ops.hpp"

namespace lueq {

namespace {

void require_unitary(const ComplexMatrix& w, const char* who) {
  const double dev = (w.adjoint() * w - ComplexMatrix::Identity(w.cols(), w.cols())).norm();
  if (dev > 1e-6)
    throw std::invalid_argument(std::string(who) + ": input not unitary, ||W^dag W - I||_F = " +
                                std::to_string(dev));
}

// Fix u1's largest-magnitude entry (ties: lowest row-major index) to be real
// positive; fold the compensating phase into u2 so u1 (x) u2 is unchanged.
void fix_factor_phase(ComplexMatrix& u1, ComplexMatrix& u2) {
  const double mx = u1.cwiseAbs().maxCoeff();
  if (mx <= 0) return;
  Complex pivot(1, 0);
  bool found = false;
  for (Eigen::Index i = 0; i < u1.rows() && !found; ++i)
    for (Eigen::Index j = 0; j < u1.cols() && !found; ++j)
      if (std::abs(u1(i, j)) >= mx * (1.0 - 1e-12)) {
        pivot = u1(i, j);
        found = true;
      }
  const Complex ph = pivot / std::abs(pivot);
  u1 /= ph;
  u2 *= ph;
}

KronFactors split_once(const ComplexMatrix& w, int m, int n) {
  const RealignmentSVD svd = realignment_svd(w, m, n);
  const double sigma1 = svd.sigma(0);
  if (sigma1 <= 0) throw std::invalid_argument("factor extraction: zero matrix");
  const double alpha = static_cast<double>(m) / sigma1;
  KronFactors out;
  out.u1 = unvec(std::sqrt(alpha * sigma1) * svd.left.col(0), m, m);
  out.u2 = unvec(std::sqrt(sigma1 / alpha) * svd.right.col(0).conjugate(), n, n);
  out.u1 = nearest_unitary(out.u1);
  out.u2 = nearest_unitary(out.u2);
  fix_factor_phase(out.u1, out.u2);
  out.residual = (w - tensor_product({out.u1, out.u2})).norm();
  return out;
}

}  // namespace

ComplexMatrix nearest_unitary(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

RealignmentSVD realignment_svd(const ComplexMatrix& w, int m, int n) {
  const ComplexMatrix r = realign(w, m, n);
  Eigen::JacobiSVD<ComplexMatrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RealignmentSVD out;
  out.sigma = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV();
  out.m = m;
  out.n = n;
  const double total = out.sigma.squaredNorm();
  out.deficiency = total > 0 ? 1.0 - out.sigma(0) * out.sigma(0) / total : 0.0;
  return out;
}

KronFactors nearest_kron_factors(const ComplexMatrix& w, int m, int n, double tol_rank) {
  require_unitary(w, "nearest_kron_factors");
  const RealignmentSVD svd = realignment_svd(w, m, n);
  if (svd.deficiency > tol_rank) throw RankError(1, svd.deficiency, tol_rank);
  return split_once(w, m, n);
}

LocalUnitaryFactorization peel_unchecked(const ComplexMatrix& w, const MultipartiteDims& dims) {
  LocalUnitaryFactorization out;
  ComplexMatrix rest = w;
  std::vector<int> remaining = dims.list();
  while (remaining.size() > 1) {
    const int m = remaining.front();
    const int n = static_cast<int>(rest.rows()) / m;
    KronFactors split = split_once(rest, m, n);
    out.factors.push_back(std::move(split.u1));
    rest = std::move(split.u2);
    remaining.erase(remaining.begin());
  }
  out.factors.push_back(nearest_unitary(rest));
  out.residual = (w - tensor_product(out.factors)).norm();
  return out;
}

LocalUnitaryFactorization factor_local_unitary(const ComplexMatrix& w,
                                               const MultipartiteDims& dims, double tol_rank) {
  if (w.rows() != dims.total() || w.cols() != dims.total())
    throw std::invalid_argument("factor_local_unitary: matrix side must equal dims total");
  require_unitary(w, "factor_local_unitary");
  // The full product condition: rank-1 realignment at every bipartition i|rest,
  // not only at the sequentially peeled cuts.
  for (int i = 1; i <= dims.n(); ++i) {
    const ComplexMatrix r = realign_bipartition(w, dims, i);
    Eigen::JacobiSVD<ComplexMatrix> svd(r);
    const RealVector sig = svd.singularValues();
    const double total = sig.squaredNorm();
    const double deficiency = total > 0 ? 1.0 - sig(0) * sig(0) / total : 0.0;
    if (deficiency > tol_rank) throw RankError(i, deficiency, tol_rank);
  }
  return peel_unchecked(w, dims);
}

}  // namespace lueq
