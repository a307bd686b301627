// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "tevlab/oracles.hpp"

using namespace tevlab;

TEST_SUITE("oracles") {
  TEST_CASE("single-mode multiplier") {
    ModeProblem p;
    p.A = SymMat2::identity();
    p.lambda = cplx(0.0, 1.0);
    p.xi = {1.0, 0.0};
    CHECK(std::abs(multiplier_mode_solve(p) + 1.0 / cplx(1.0, 1.0)) <= 1e-15);
    p.xi = {0.0, 0.0};
    p.amplitude = cplx(2.0, 1.0);
    p.Sigma = 3.0;
    CHECK(std::abs(multiplier_mode_solve(p) + p.amplitude / (p.lambda * 3.0)) <= 1e-15);
    p.xi = {0.3, -1.2};
    const cplx u = multiplier_mode_solve(p);
    const cplx symbol = p.A.form(p.xi, p.xi) + p.lambda * p.Sigma;
    CHECK(std::abs(-symbol * u - p.amplitude) <= 1e-15);
    p.lambda = cplx(-1.0, 0.0);
    p.Sigma = 1.0;
    p.xi = {1.0, 0.0};
    CHECK_THROWS_AS(multiplier_mode_solve(p), std::domain_error);
  }

  TEST_CASE("multiplier bounded on the imaginary ray") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    const double eps0 = M_PI / 8;
    for (double t : {1.0, 10.0, 100.0}) {
      for (int i = 0; i < 200; ++i) {
        ModeProblem p;
        p.A = SymMat2{2.0, 0.5, 1.0};
        p.Sigma = 0.7;
        p.lambda = cplx(0.0, t);
        p.xi = {u(rng), u(rng)};
        CHECK(std::abs(multiplier_mode_solve(p)) <= 1.0 / (t * p.Sigma * std::sin(eps0)));
      }
    }
  }

  TEST_CASE("engineered half-space amplitudes") {
    const auto s = halfspace_solve(SymMat2::identity(), SymMat2::identity(), 1.0, 4.0, 1.0, 0.0, 1.0);
    CHECK(std::abs(s.medium[0].Delta - 1.0) <= 1e-15);
    CHECK(std::abs(s.medium[1].Delta - 4.0) <= 1e-15);
    CHECK(std::abs(s.medium[0].alpha - 2.0) <= 1e-15);
    CHECK(std::abs(s.medium[1].alpha - 1.0) <= 1e-15);
  }

  TEST_CASE("diagonal half-space decay rate") {
    const double xi = 1.7;
    const auto s = halfspace_solve(SymMat2::identity(), SymMat2::diag(2.0, 1.0), 1.0, 1.0, cplx(0.0, 1.0), xi, 1.0);
    const cplx expect = std::sqrt(cplx(xi * xi, 1.0));
    CHECK(std::abs(s.medium[0].Delta - cplx(xi * xi, 1.0)) <= 1e-14);
    CHECK(std::abs(s.medium[0].eta + expect) <= 1e-14);
  }

  TEST_CASE("random admissible half-space samples") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0), ang(M_PI / 8, M_PI - M_PI / 8);
    for (int i = 0; i < 2000; ++i) {
      auto spd = [&] {
        const double a = u(rng), b = u(rng), c = u(rng);
        return SymMat2{a * a + 0.5, a * c + 0.2 * b, c * c + b * b + 0.5};
      };
      const SymMat2 A1 = spd(), A2 = spd();
      const double S1 = 1.0 + 0.5 * u(rng), S2 = 2.5 + u(rng);
      const cplx lambda = std::polar(std::exp(3.0 * u(rng)), ang(rng));
      const double xi = 5.0 * u(rng);
      HalfSpaceSolution s;
      try {
        s = halfspace_solve(A1, A2, S1, S2, lambda, xi, cplx(u(rng), u(rng)));
      } catch (const std::domain_error&) {
        continue;
      }
      for (const auto& m : s.medium) {
        CHECK(m.a * m.c - m.b * m.b > -1e-15 * m.a * m.c);
        CHECK(m.sqrt_Delta.real() > 0.0);
        CHECK(m.eta.real() < 0.0);
      }
      const auto r = verify_halfspace(s, {0.0, 0.1, 1.0, 10.0});
      CHECK(r.ode <= 1e-12);
      CHECK(r.jump <= 1e-13);
      CHECK(r.flux <= 1e-13 * (1.0 + std::abs(s.medium[0].alpha * s.medium[0].sqrt_Delta)));
      CHECK(r.decaying);
    }
  }

  TEST_CASE("equal square roots are a degenerate contrast") {
    CHECK_THROWS_AS(halfspace_solve(SymMat2::identity(), SymMat2::identity(), 1.0, 1.0, cplx(0, 1), 1.0, 1.0),
                    std::domain_error);
  }

  TEST_CASE("Bessel constant terms and recurrence") {
    CHECK(bessel_J(0, 0.0) == 1.0);
    CHECK(bessel_J(1, 0.0) == 0.0);
    for (int m = 1; m < 12; ++m) {
      for (double x = 0.05; x < 30.0; x += 0.37) {
        const double lhs = bessel_J(m - 1, x) + bessel_J(m + 1, x);
        const double rhs = 2.0 * m / x * bessel_J(m, x);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(bessel_J(m - 1, x))));
      }
    }
    // complex and real variants agree on the real axis
    for (double x : {0.3, 2.0, 7.5, 14.0}) {
      CHECK(std::abs(bessel_J(3, cplx(x, 0.0)) - bessel_J(3, x)) <= 1e-13);
      CHECK(std::abs(bessel_J_prime(2, cplx(x, 0.0)) - bessel_J_prime(2, x)) <= 1e-13);
    }
  }

  TEST_CASE("first zero of J0") {
    const double z = bessel_zero(0, 1);
    CHECK(z > 2.4);
    CHECK(z < 2.5);
    CHECK(std::abs(z - 2.404825557695773) <= 1e-10);
    // sign-change scan
    double lo = 2.0, prev = bessel_J(0, lo), bracket = 0.0;
    for (int i = 1; i <= 10000; ++i) {
      const double x = 2.0 + i * 1e-4, v = bessel_J(0, x);
      if (prev * v <= 0.0) {
        bracket = x;
        break;
      }
      prev = v;
    }
    CHECK(std::abs(bracket - z) <= 1e-4);
  }

  TEST_CASE("disk determinant vanishes identically at n = 1") {
    for (double k = 0.5; k < 10.0; k += 0.7) CHECK(std::abs(disk_determinant(2, k, 1.0)) <= 1e-15);
  }

  TEST_CASE("disk oracle roots and multiplicities") {
    DiskOracleOptions o;
    o.k_max = 8.0;
    o.max_mode = 8;
    const auto real = disk_real_eigenvalues(4.0, o);
    REQUIRE(!real.empty());
    for (const auto& e : real) {
      CHECK(std::abs(disk_determinant(e.mode, e.k.real(), 4.0)) <= 1e-10);
      CHECK(e.multiplicity == (e.mode == 0 ? 1 : 2));
      CHECK(std::abs(e.lambda + e.k * e.k) <= 1e-12 * std::abs(e.lambda));
    }
    o.scan_step = 5e-4;
    const auto fine = disk_real_eigenvalues(4.0, o);
    REQUIRE(fine.size() == real.size());
    for (std::size_t i = 0; i < real.size(); ++i) CHECK(std::abs(fine[i].k - real[i].k) <= 1e-10);
  }

  TEST_CASE("complex disk roots come in conjugate pairs") {
    DiskOracleOptions o;
    o.k_max = 5.0;
    o.max_mode = 4;
    const auto all = disk_eigenvalues(4.0, o);
    int complex_count = 0;
    for (const auto& e : all) {
      if (std::abs(e.lambda.imag()) < 1e-9) continue;
      ++complex_count;
      CHECK(std::abs(disk_determinant(e.mode, e.k, 4.0)) <= 1e-9);
      bool partner = false;
      for (const auto& f : all) partner = partner || std::abs(f.lambda - std::conj(e.lambda)) <= 1e-9;
      CHECK(partner);
    }
    CHECK(complex_count >= 2);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(std::abs(all[i].lambda) >= std::abs(all[i - 1].lambda));
  }
}
