#include "lueq/tensor_ops.hpp"

#include <cmath>

namespace lueq {

namespace {

void check_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

}  // namespace

MultipartiteState::MultipartiteState(ComplexMatrix matrix, MultipartiteDims dims,
                                     StateMode mode, StateTolerances tol)
    : matrix_(std::move(matrix)), dims_(std::move(dims)), mode_(mode), tol_(tol) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("state matrix must be square");
  if (matrix_.rows() != dims_.total())
    throw std::invalid_argument("state matrix side " + std::to_string(matrix_.rows()) +
                                " does not match dims total " + std::to_string(dims_.total()));
  check_finite(matrix_, "state matrix");
  const double herm_dev = (matrix_ - matrix_.adjoint()).norm();
  if (herm_dev > tol_.herm)
    throw std::invalid_argument("state not Hermitian: ||M - M^dag||_F = " +
                                std::to_string(herm_dev));
  if (mode_ == StateMode::Density) {
    const double trace_dev = std::abs(matrix_.trace() - Complex(1.0, 0.0));
    if (trace_dev > tol_.trace)
      throw std::invalid_argument("density matrix trace deviates from 1 by " +
                                  std::to_string(trace_dev));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (matrix_ + matrix_.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol_.psd)
      throw std::invalid_argument("density matrix not positive semidefinite: min eigenvalue = " +
                                  std::to_string(min_eig));
  }
}

ComplexVector vec(const ComplexMatrix& a) {
  ComplexVector v(a.rows() * a.cols());
  Eigen::Index idx = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) v(idx++) = a(i, j);
  return v;
}

ComplexMatrix unvec(const ComplexVector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw std::invalid_argument("unvec: length " + std::to_string(v.size()) +
                                " != " + std::to_string(rows) + "x" + std::to_string(cols));
  ComplexMatrix a(rows, cols);
  Eigen::Index idx = 0;
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = v(idx++);
  return a;
}

ComplexMatrix realign(const ComplexMatrix& z, int m, int n) {
  if (m < 1 || n < 1 || z.rows() != static_cast<Eigen::Index>(m) * n || z.rows() != z.cols())
    throw std::invalid_argument("realign: matrix must be MN x MN for the given M, N");
  ComplexMatrix r(m * m, n * n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      // Block (i, j) occupies rows i*n..(i+1)*n, cols j*n..(j+1)*n.
      Eigen::Index row = static_cast<Eigen::Index>(j) * m + i;
      Eigen::Index idx = 0;
      for (int bj = 0; bj < n; ++bj)
        for (int bi = 0; bi < n; ++bi)
          r(row, idx++) = z(static_cast<Eigen::Index>(i) * n + bi,
                            static_cast<Eigen::Index>(j) * n + bj);
    }
  }
  return r;
}

std::vector<int> front_permutation(const MultipartiteDims& dims, int i) {
  const int n = dims.n();
  if (i < 1 || i > n) throw std::out_of_range("subsystem index out of range");
  const int d = dims.total();
  std::vector<int> order;
  order.push_back(i - 1);
  for (int k = 0; k < n; ++k)
    if (k != i - 1) order.push_back(k);
  std::vector<int> perm(static_cast<size_t>(d));
  std::vector<int> digits(static_cast<size_t>(n));
  for (int idx = 0; idx < d; ++idx) {
    int rem = idx;
    for (int k = n - 1; k >= 0; --k) {
      digits[static_cast<size_t>(k)] = rem % dims.list()[static_cast<size_t>(k)];
      rem /= dims.list()[static_cast<size_t>(k)];
    }
    int v = 0;
    for (int k : order) v = v * dims.list()[static_cast<size_t>(k)] + digits[static_cast<size_t>(k)];
    perm[static_cast<size_t>(idx)] = v;
  }
  return perm;
}

ComplexMatrix permute_subsystem_front(const ComplexMatrix& t, const MultipartiteDims& dims, int i) {
  if (t.rows() != dims.total() || t.cols() != dims.total())
    throw std::invalid_argument("permute_subsystem_front: matrix side must equal dims total");
  const std::vector<int> perm = front_permutation(dims, i);
  const int d = dims.total();
  ComplexMatrix out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      out(perm[static_cast<size_t>(r)], perm[static_cast<size_t>(c)]) = t(r, c);
  return out;
}

ComplexMatrix realign_bipartition(const ComplexMatrix& t, const MultipartiteDims& dims, int i) {
  const int m = dims.dim(i);
  const int n = dims.total() / m;
  if (i == 1) return realign(t, m, n);
  return realign(permute_subsystem_front(t, dims, i), m, n);
}

ComplexMatrix tensor_product(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product: no factors");
  ComplexMatrix acc = factors.front();
  for (size_t f = 1; f < factors.size(); ++f) {
    const ComplexMatrix& b = factors[f];
    ComplexMatrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
      for (Eigen::Index j = 0; j < acc.cols(); ++j)
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
    acc.swap(next);
  }
  return acc;
}

ComplexMatrix partial_transpose_matrix(const ComplexMatrix& t, const MultipartiteDims& dims, int k) {
  const int n = dims.n();
  if (k < 1 || k > n) throw std::out_of_range("subsystem index out of range");
  if (t.rows() != dims.total() || t.cols() != dims.total())
    throw std::invalid_argument("partial_transpose: matrix side must equal dims total");
  const int nk = dims.dim(k);
  // Stride of subsystem k's digit in the composite row-major index.
  int stride = 1;
  for (int j = k; j < n; ++j) stride *= dims.list()[static_cast<size_t>(j)];
  const int d = dims.total();
  ComplexMatrix out(d, d);
  for (int r = 0; r < d; ++r) {
    const int rk = (r / stride) % nk;
    const int rbase = r - rk * stride;
    for (int c = 0; c < d; ++c) {
      const int ck = (c / stride) % nk;
      const int cbase = c - ck * stride;
      out(rbase + ck * stride, cbase + rk * stride) = t(r, c);
    }
  }
  return out;
}

ComplexMatrix partial_transpose_matrix(const ComplexMatrix& t, const MultipartiteDims& dims,
                                       const std::vector<int>& subsystems) {
  ComplexMatrix out = t;
  for (int k : subsystems) out = partial_transpose_matrix(out, dims, k);
  return out;
}

MultipartiteState partial_transpose(const MultipartiteState& s, int k) {
  ComplexMatrix m = partial_transpose_matrix(s.matrix(), s.dims(), k);
  return MultipartiteState(std::move(m), s.dims(), StateMode::Hermitian, s.tolerances());
}

MultipartiteState partial_transpose(const MultipartiteState& s, const std::vector<int>& subsystems) {
  ComplexMatrix m = partial_transpose_matrix(s.matrix(), s.dims(), subsystems);
  return MultipartiteState(std::move(m), s.dims(), StateMode::Hermitian, s.tolerances());
}

ComplexMatrix partial_trace(const ComplexMatrix& t, const MultipartiteDims& dims, int k) {
  const int n = dims.n();
  if (k < 1 || k > n) throw std::out_of_range("subsystem index out of range");
  if (t.rows() != dims.total() || t.cols() != dims.total())
    throw std::invalid_argument("partial_trace: matrix side must equal dims total");
  const int nk = dims.dim(k);
  int stride = 1;
  for (int j = k; j < n; ++j) stride *= dims.list()[static_cast<size_t>(j)];
  const int d = dims.total();
  const int dout = d / nk;
  ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
  // Map a reduced index to a full index with subsystem k's digit set to q.
  auto expand = [&](int idx, int q) {
    const int low = idx % stride;
    const int high = idx / stride;
    return low + stride * (q + nk * high);
  };
  for (int r = 0; r < dout; ++r)
    for (int c = 0; c < dout; ++c)
      for (int q = 0; q < nk; ++q) out(r, c) += t(expand(r, q), expand(c, q));
  return out;
}

}  // namespace lueq
