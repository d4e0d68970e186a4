#include "lueq/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lueq/tensor_ops.hpp"

namespace lueq {

ComplexMatrix haar_unitary(int d, std::mt19937_64& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary: dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) g(j, k) = Complex(gauss(rng), gauss(rng));
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    q.col(j) *= std::abs(rjj) > 0 ? rjj / std::abs(rjj) : Complex(1, 0);
  }
  return q;
}

RandomPair random_pair(const MultipartiteDims& dims, const std::vector<int>& multiplicities,
                       std::uint64_t seed) {
  const int d = dims.total();
  std::vector<int> profile = multiplicities;
  if (profile.empty()) profile.assign(d, 1);
  for (int m : profile)
    if (m < 1) throw std::invalid_argument("random_pair: multiplicities must be positive");
  if (std::accumulate(profile.begin(), profile.end(), 0) != d)
    throw std::invalid_argument("random_pair: multiplicities must sum to the total dimension");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Cluster values: descending uniforms padded so consecutive clusters differ
  // by at least 2e-2/d and the smallest stays above 1e-2/d.
  const int r = static_cast<int>(profile.size());
  const double gap = 2e-2 / d;
  const double floor_value = 1e-2 / d;
  std::vector<double> vals(r);
  for (double& v : vals) v = unif(rng);
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  for (int i = 0; i < r; ++i) vals[i] += floor_value + gap * (r - 1 - i);

  RealVector lambda(d);
  double total = 0;
  for (int i = 0, pos = 0; i < r; ++i)
    for (int m = 0; m < profile[i]; ++m, ++pos) {
      lambda(pos) = vals[i];
      total += vals[i];
    }
  lambda /= total;

  const ComplexMatrix x = haar_unitary(d, rng);
  ComplexMatrix rho1 = x * lambda.cast<Complex>().asDiagonal() * x.adjoint();
  rho1 = 0.5 * (rho1 + rho1.adjoint());

  std::vector<ComplexMatrix> planted;
  planted.reserve(dims.n());
  for (int k = 1; k <= dims.n(); ++k) planted.push_back(haar_unitary(dims.dim(k), rng));
  const ComplexMatrix p = tensor_product(planted);
  ComplexMatrix rho2 = p * rho1 * p.adjoint();
  rho2 = 0.5 * (rho2 + rho2.adjoint());

  return {MultipartiteState(rho1, dims, StateMode::Density),
          MultipartiteState(rho2, dims, StateMode::Density), std::move(planted)};
}

}  // namespace lueq
