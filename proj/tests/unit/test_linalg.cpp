// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "tevlab/eigensolve.hpp"
#include "tevlab/linalg.hpp"

using namespace tevlab;

namespace {

SparseSym random_sparse_symmetric(int n, double density, std::mt19937_64& rng, double diag_shift) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) {
    trip.emplace_back(i, i, diag_shift + u(rng));
    for (int j = 0; j < i; ++j) {
      if (coin(rng) > density) continue;
      const double v = u(rng);
      trip.emplace_back(i, j, v);
      trip.emplace_back(j, i, v);
    }
  }
  SparseSym A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("1x1 solve") {
    SparseSym K(1, 1), M(1, 1);
    K.insert(0, 0) = 3.0;
    M.insert(0, 0) = 2.0;
    const cplx sigma(0.5, 1.0);
    const ComplexLU lu(K, M, sigma);
    VecC b(1);
    b[0] = cplx(1.0, -2.0);
    CHECK(std::abs(lu.solve(b)[0] - b[0] / (3.0 - sigma * 2.0)) <= 1e-15);
    CHECK(std::abs(lu.solve_adjoint(b)[0] - b[0] / std::conj(3.0 - sigma * 2.0)) <= 1e-15);
  }

  TEST_CASE("random sparse 50x50 at sigma = i") {
    std::mt19937_64 rng(11);
    const SparseSym K = random_sparse_symmetric(50, 0.1, rng, 4.0);
    const SparseSym M = random_sparse_symmetric(50, 0.1, rng, 0.0);
    const cplx sigma(0.0, 1.0);
    const ComplexLU lu(K, M, sigma);
    VecC b = VecC::Random(50);
    const MatC A = MatR(K).cast<cplx>() - sigma * MatR(M).cast<cplx>();
    const VecC x = lu.solve(b);
    CHECK((A * x - b).norm() <= 1e-10 * b.norm());
    const VecC y = lu.solve_adjoint(b);
    CHECK((A.adjoint() * y - b).norm() <= 1e-10 * b.norm());
    const VecC dense = A.partialPivLu().solve(b);
    CHECK((x - dense).norm() <= 1e-10 * dense.norm());
  }

  TEST_CASE("shift at an eigenvalue reports a singular factorization") {
    std::mt19937_64 rng(5);
    const SparseSym K = random_sparse_symmetric(12, 0.3, rng, 2.0);
    const SparseSym M = random_sparse_symmetric(12, 0.3, rng, 0.5);
    const auto ev = dense_eigenvalues(MatR(K), MatR(M));
    REQUIRE(!ev.empty());
    try {
      ComplexLU lu(K, M, ev.front());
      FAIL("expected a singular shift");
    } catch (const SingularShiftError& e) {
      CHECK(std::abs(e.shift() - ev.front()) == 0.0);
      CHECK(e.condition_estimate() > 1e13);
    }
  }
}
