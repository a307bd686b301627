// SPDX-License-Identifier: Apache-2.0
//
// Closed-form reference solutions:
//  * single-mode whole-space solves with the symbol 1 / (<A xi, xi> + lambda Sigma),
//  * the constant-coefficient half-space transmission solution for one
//    tangential frequency,
//  * Bessel functions and the separation-of-variables determinant whose roots
//    give the transmission eigenvalues of the unit disk with A1 = A2 = I,
//    Sigma1 = 1, Sigma2 = n.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "tevlab/media.hpp"

namespace tevlab {

using cplx = std::complex<double>;

struct ModeProblem {
  SymMat2 A;
  double Sigma = 1.0;
  cplx lambda;
  Point2 xi;
  cplx amplitude = 1.0;
};

/// Coefficient of u for g = amplitude * exp(i <xi, x>) in
/// div(A grad u) - lambda Sigma u = g. Throws std::domain_error when the
/// symbol vanishes.
cplx multiplier_mode_solve(const ModeProblem& problem);

/// Square root with positive real part (principal branch, flipped if needed).
cplx sqrt_positive_real(cplx z);

struct HalfSpaceMedium {
  double a = 0.0, b = 0.0, c = 0.0;  // <A e_d, e_d>, <A xi, e_d>, <A xi, xi>
  cplx Delta;                         // -b^2 + a (c + lambda Sigma)
  cplx sqrt_Delta;                    // Re > 0
  cplx eta;                           // (-i b - sqrt(Delta)) / a, the decay rate
  cplx alpha;                         // amplitude: v(t) = alpha exp(eta t)
  double Sigma = 0.0;
};

struct HalfSpaceSolution {
  HalfSpaceMedium medium[2];
  double xi_tangential = 0.0;
  cplx phi_hat;  // Fourier coefficient of the boundary jump u1 - u2
  cplx lambda;
};

/// Solves the two-media half-space problem {x_2 > 0} for one tangential
/// frequency. Throws std::domain_error when sqrt(Delta_1) == sqrt(Delta_2).
HalfSpaceSolution halfspace_solve(const SymMat2& A1, const SymMat2& A2, double Sigma1, double Sigma2, cplx lambda,
                                  double xi_tangential, cplx phi_hat);

struct HalfSpaceResiduals {
  double ode = 0.0;   // max_j,t |a eta^2 + 2 i b eta - (c + lambda Sigma)| |v_j(t)| / scale
  double jump = 0.0;  // |(alpha_1 - alpha_2) - phi_hat|
  double flux = 0.0;  // |alpha_1 <i A1 xi + eta_1 A1 e_d, e_d> - alpha_2 <...>|
  bool decaying = false;  // |v_j(t)| <= |alpha_j| exp(-|Re eta_j| t) at all depths, Re eta_j < 0
};

HalfSpaceResiduals verify_halfspace(const HalfSpaceSolution& sol, const std::vector<double>& depths);

// --- Bessel functions of the first kind -----------------------------------

/// J_m(x) for x >= 0: ascending series for x <= 1, Miller backward recurrence
/// otherwise.
double bessel_J(int m, double x);
/// J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2, with J_{-1} = -J_1.
double bessel_J_prime(int m, double x);

/// Complex-argument variants (backward recurrence normalised by
/// J_0 + 2 sum J_2k = 1); intended for |Im z| of order ten or less.
cplx bessel_J(int m, cplx z);
cplx bessel_J_prime(int m, cplx z);

/// Smallest positive zero of J_m by scan + bisection.
double bessel_zero(int m, int index);

// --- Unit-disk transmission oracle ----------------------------------------

/// D_m(k) = J_m(k) sqrt(n) J_m'(sqrt(n) k) - J_m'(k) J_m(sqrt(n) k).
double disk_determinant(int m, double k, double n);
cplx disk_determinant(int m, cplx k, double n);

struct DiskEigenvalue {
  int mode = 0;
  cplx k;             // root of D_m (Re k > 0)
  cplx lambda;        // -k^2
  int multiplicity = 1;  // 2 for m >= 1, times 1 per conjugate partner
  double determinant_residual = 0.0;
};

struct DiskOracleOptions {
  int max_mode = 30;
  double k_max = 15.0;
  double scan_step = 1e-3;  // real scan resolution in k
  /// complex search window Im k in [im_min, im_max] (upper half plane; the
  /// conjugate root is added automatically)
  double im_min = 1e-3;
  double im_max = 4.0;
  double cell = 0.25;  // argument-principle cell size in the complex k plane
  bool complex_roots = true;
};

class DiskOracleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Real roots (lambda = -k^2 < 0) for m = 0..max_mode and k <= k_max, found by
/// sign-change bracketing and bisection to 1e-12.
std::vector<DiskEigenvalue> disk_real_eigenvalues(double n, const DiskOracleOptions& opts = {});

/// Non-real roots k with Re k in (0, k_max] located by the argument principle
/// on a cell grid and refined by Newton. Each root k yields the eigenvalues
/// -k^2 and its conjugate.
std::vector<DiskEigenvalue> disk_complex_eigenvalues(double n, const DiskOracleOptions& opts = {});

/// Real and (optionally) complex eigenvalues, sorted by |lambda|, each
/// conjugate listed separately.
std::vector<DiskEigenvalue> disk_eigenvalues(double n, const DiskOracleOptions& opts = {});

}  // namespace tevlab
