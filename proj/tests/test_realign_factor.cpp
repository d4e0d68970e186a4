#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>
#include <lueq/oracle.hpp>
#include <lueq/realign_factor.hpp>
#include <lueq/tensor_ops.hpp>

#include "test_support.hpp"

using namespace lueq;
using test::max_abs_diff;
using test::random_complex;

TEST_CASE("realignment_svd of a product unitary: sigma_1 = sqrt(M N), deficiency 0") {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> pick(2, 4);
  for (int trial = 0; trial < 120; ++trial) {
    const int m = pick(rng), n = pick(rng);
    const ComplexMatrix w = tensor_product({haar_unitary(m, rng), haar_unitary(n, rng)});
    const RealignmentSVD svd = realignment_svd(w, m, n);
    CHECK(svd.sigma(0) == doctest::Approx(std::sqrt(double(m * n))).epsilon(1e-12));
    CHECK(svd.deficiency < 1e-14);
    CHECK(svd.m == m);
    CHECK(svd.n == n);
    // Frobenius norm is preserved: sum sigma^2 = MN.
    CHECK(svd.sigma.squaredNorm() == doctest::Approx(double(m * n)).epsilon(1e-12));
  }
}

TEST_CASE("nearest_kron_factors reconstructs product unitaries") {
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<int> pick(2, 4);
  for (int trial = 0; trial < 120; ++trial) {
    const int m = pick(rng), n = pick(rng);
    const ComplexMatrix u1 = haar_unitary(m, rng), u2 = haar_unitary(n, rng);
    const ComplexMatrix w = tensor_product({u1, u2});
    const KronFactors kf = nearest_kron_factors(w, m, n, 1e-7);
    CHECK(kf.residual < 1e-12);
    CHECK(max_abs_diff(tensor_product({kf.u1, kf.u2}), w) < 1e-12);
    CHECK(max_abs_diff(kf.u1 * kf.u1.adjoint(), ComplexMatrix::Identity(m, m)) < 1e-12);
    CHECK(max_abs_diff(kf.u2 * kf.u2.adjoint(), ComplexMatrix::Identity(n, n)) < 1e-12);

    // The phase split is canonical: among u1's largest-magnitude entries
    // (unitaries have exact magnitude ties) the first in row-major order is
    // real positive.
    const double mx = kf.u1.cwiseAbs().maxCoeff();
    Complex pivot(0, 0);
    for (int r = 0; r < m && pivot == Complex(0, 0); ++r)
      for (int c = 0; c < m && pivot == Complex(0, 0); ++c)
        if (std::abs(kf.u1(r, c)) >= mx * (1.0 - 1e-12)) pivot = kf.u1(r, c);
    CHECK(pivot.real() > 0);
    CHECK(std::abs(pivot.imag()) < 1e-12);
  }
}

TEST_CASE("nearest_kron_factors is deterministic under an input phase") {
  std::mt19937_64 rng(53);
  const ComplexMatrix u1 = haar_unitary(2, rng), u2 = haar_unitary(3, rng);
  const ComplexMatrix w = tensor_product({u1, u2});
  const KronFactors a = nearest_kron_factors(w, 2, 3, 1e-7);
  // Multiplying W by a global phase moves the phase entirely into u2.
  const KronFactors b = nearest_kron_factors(Complex(0, 1) * w, 2, 3, 1e-7);
  CHECK(max_abs_diff(a.u1, b.u1) < 1e-12);
  CHECK(max_abs_diff(Complex(0, 1) * a.u2, b.u2) < 1e-12);
}

TEST_CASE("unitarization absorbs small perturbations of a product") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    const ComplexMatrix w = tensor_product({haar_unitary(2, rng), haar_unitary(3, rng)});
    const ComplexMatrix noisy = w + 1e-9 * random_complex(6, 6, rng);
    const KronFactors kf = nearest_kron_factors(noisy, 2, 3, 1e-7);
    CHECK(max_abs_diff(kf.u1 * kf.u1.adjoint(), ComplexMatrix::Identity(2, 2)) < 1e-13);
    CHECK(max_abs_diff(kf.u2 * kf.u2.adjoint(), ComplexMatrix::Identity(3, 3)) < 1e-13);
    CHECK(max_abs_diff(tensor_product({kf.u1, kf.u2}), w) < 1e-7);
  }
}

TEST_CASE("an entangling unitary is rejected with RankError") {
  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = Complex(1, 0);
  CHECK_THROWS_AS(nearest_kron_factors(cnot, 2, 2, 1e-7), RankError);

  try {
    nearest_kron_factors(cnot, 2, 2, 1e-7);
  } catch (const RankError& e) {
    CHECK(e.deficiency() == doctest::Approx(0.5).epsilon(1e-12));  // two equal singular values
    CHECK_FALSE(e.near_miss());
  }
}

TEST_CASE("RankError near the tolerance reports the warning band") {
  // Sweep a perturbation strength until the deficiency lands inside
  // (tol_rank, 10 tol_rank]; continuity in epsilon guarantees a hit.
  std::mt19937_64 rng(55);
  const double tol = 1e-7;
  const ComplexMatrix w = tensor_product({haar_unitary(2, rng), haar_unitary(2, rng)});
  const ComplexMatrix noise = random_complex(4, 4, rng);

  bool found = false;
  for (double eps = 1e-5; eps < 3e-2; eps *= 1.03) {
    const ComplexMatrix probe = nearest_unitary(w + eps * noise);
    const double def = realignment_svd(probe, 2, 2).deficiency;
    if (def > 1.2 * tol && def < 8 * tol) {
      found = true;
      try {
        nearest_kron_factors(probe, 2, 2, tol);
        CHECK(false);  // must throw
      } catch (const RankError& e) {
        CHECK(e.near_miss());
        CHECK(std::string(e.what()).find("warning band") != std::string::npos);
      }
      break;
    }
  }
  CHECK(found);
}

TEST_CASE("factor_local_unitary peels multipartite products") {
  std::mt19937_64 rng(56);
  const std::vector<std::vector<int>> shapes = {{2, 2}, {2, 3}, {2, 2, 2}, {3, 2, 2}};
  int instances = 0;
  for (int trial = 0; trial < 30; ++trial)
    for (const auto& dim_list : shapes) {
      const MultipartiteDims dims(dim_list);
      std::vector<ComplexMatrix> f;
      for (int d : dim_list) f.push_back(haar_unitary(d, rng));
      const ComplexMatrix w = tensor_product(f);

      const LocalUnitaryFactorization fac = factor_local_unitary(w, dims, 1e-7);
      REQUIRE(fac.factors.size() == dim_list.size());
      CHECK(fac.residual < 1e-10);
      CHECK(max_abs_diff(tensor_product(fac.factors), w) < 1e-10);
      for (size_t k = 0; k < fac.factors.size(); ++k) {
        const int d = dim_list[k];
        REQUIRE(fac.factors[k].rows() == d);
        CHECK(max_abs_diff(fac.factors[k] * fac.factors[k].adjoint(),
                           ComplexMatrix::Identity(d, d)) < 1e-12);
      }
      ++instances;
    }
  CHECK(instances >= 100);
}

TEST_CASE("factor_local_unitary names the first failing bipartition") {
  std::mt19937_64 rng(57);
  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = Complex(1, 0);

  // u1 (x) CNOT_{23}: cut 1 is fine, cuts 2 and 3 both fail; the scan goes in
  // order, so the error names bipartition 2.
  const ComplexMatrix w = tensor_product({haar_unitary(2, rng), cnot});
  const MultipartiteDims dims({2, 2, 2});
  try {
    factor_local_unitary(w, dims, 1e-7);
    CHECK(false);
  } catch (const RankError& e) {
    CHECK(e.bipartition() == 2);
    CHECK(e.deficiency() > 0.1);
  }
}

TEST_CASE("peel_unchecked returns best-effort factors without throwing") {
  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = Complex(1, 0);
  const MultipartiteDims dims({2, 2});
  const LocalUnitaryFactorization fac = peel_unchecked(cnot, dims);
  REQUIRE(fac.factors.size() == 2);
  CHECK(fac.residual > 0.1);  // genuinely far from a product
  for (const auto& u : fac.factors)
    CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::Identity(u.rows(), u.rows())) < 1e-12);
}

TEST_CASE("nearest_unitary is the polar factor") {
  std::mt19937_64 rng(58);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix a = random_complex(4, 4, rng);
    const ComplexMatrix q = nearest_unitary(a);
    CHECK(max_abs_diff(q * q.adjoint(), ComplexMatrix::Identity(4, 4)) < 1e-12);
    // Q^dag A is positive semidefinite Hermitian for the polar factor.
    const ComplexMatrix h = q.adjoint() * a;
    CHECK(max_abs_diff(h, h.adjoint()) < 1e-12);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }

  // A unitary is its own polar factor.
  const ComplexMatrix u = haar_unitary(3, rng);
  CHECK(max_abs_diff(nearest_unitary(u), u) < 1e-13);
}
