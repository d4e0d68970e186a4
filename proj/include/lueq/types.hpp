#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lueq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Ordered subsystem dimensions [N_1, ..., N_n], each >= 2.
class MultipartiteDims {
 public:
  explicit MultipartiteDims(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("dims: need at least one subsystem");
    total_ = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("dims: every subsystem dimension must be >= 2");
      total_ *= d;
    }
  }

  const std::vector<int>& list() const { return dims_; }
  int n() const { return static_cast<int>(dims_.size()); }
  int total() const { return total_; }
  // 1-based subsystem dimension accessor.
  int dim(int k) const {
    if (k < 1 || k > n()) throw std::out_of_range("subsystem index out of range");
    return dims_[static_cast<size_t>(k - 1)];
  }
  bool operator==(const MultipartiteDims& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_;
  int total_ = 0;
};

enum class StateMode { Density, Hermitian };

struct StateTolerances {
  double herm = 1e-10;   // ||M - M^dag||_F
  double trace = 1e-10;  // |tr M - 1| (Density only)
  double psd = 1e-9;     // min eigenvalue >= -psd (Density only)
};

// A validated multipartite mixed state (or general Hermitian matrix after a
// partial transpose). Validation happens at construction and throws
// std::invalid_argument naming the violated invariant and its magnitude.
class MultipartiteState {
 public:
  MultipartiteState(ComplexMatrix matrix, MultipartiteDims dims,
                    StateMode mode = StateMode::Density, StateTolerances tol = {});

  const ComplexMatrix& matrix() const { return matrix_; }
  const MultipartiteDims& dims() const { return dims_; }
  StateMode mode() const { return mode_; }
  const StateTolerances& tolerances() const { return tol_; }

 private:
  ComplexMatrix matrix_;
  MultipartiteDims dims_;
  StateMode mode_;
  StateTolerances tol_;
};

}  // namespace lueq
