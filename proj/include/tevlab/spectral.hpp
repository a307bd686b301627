// SPDX-License-Identifier: Apache-2.0
//
// Quantitative spectral checks on a transmission pencil:
//  * the Weyl constant from sublevel volumes and a fit of the counting
//    function against it,
//  * the Stieltjes-transform (Tauberian) route to the same constant,
//  * power-iteration estimates of resolvent norms along a ray,
//  * Hilbert-Schmidt norms in a weighted geometry, the shifted resolvent
//    identity and the trace identity for a product of four resolvents,
//  * the frozen-coefficient kernel diagonal and its leading term.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tevlab/assembly.hpp"
#include "tevlab/eigensolve.hpp"

namespace tevlab {

class AnalysisError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> log_grid(double lo, double hi, int n);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // residual root mean square
};

/// Least squares y ~ slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Least squares of log y against log x. Non-positive entries are rejected.
LineFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

// --- Weyl constant and counting fit ---------------------------------------

/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

/// |{xi : <A xi, xi> < Sigma}| = omega_d Sigma^{d/2} / sqrt(det A). Throws
/// std::domain_error unless A is positive definite and Sigma > 0.
double sublevel_volume(const SymMat2& A, double Sigma);
double sublevel_volume(const MatR& A, double Sigma);

/// (2 pi)^{-2} sum_j int_Omega |{<A_j xi, xi> < Sigma_j}| dx with centroid
/// quadrature per triangle.
double weyl_constant(const TriMesh& mesh, const MediumPair& pair);

/// Phase-space Monte-Carlo estimate of the same constant: x uniform on the
/// mesh, xi uniform on a box containing both sublevel sets.
double weyl_constant_monte_carlo(const TriMesh& mesh, const MediumPair& pair, long samples, std::uint64_t seed);

struct WeylWindow {
  double lo_fraction = 0.2;
  double hi_fraction = 0.9;
  int grid = 64;  // log-spaced fit points
};

struct WeylEstimate {
  double c_analytic = 0.0;
  double c_fit = 0.0;         // slope of N(t) ~ c t + b
  double intercept = 0.0;     // b
  double c_fit_origin = 0.0;  // slope of N(t) ~ c t
  double t_lo = 0.0, t_hi = 0.0;
  double relative_deviation = 0.0;  // |c_fit - c_analytic| / c_analytic
  int eigenvalues_in_window = 0;
  std::vector<double> t_grid, counts;
};

/// Piecewise-linear interpolant through (0, 0) and the staircase corners
/// (r_i, #{r <= r_i}) of the ascending moduli.
double interpolated_count(const std::vector<double>& moduli, double t);

/// Fits the counting function over [lo t_max, hi t_max]. Throws AnalysisError
/// with fewer than 10 eigenvalues in the window.
WeylEstimate fit_weyl(const std::vector<double>& moduli, double t_max, double c_analytic,
                      const WeylWindow& window = {});
WeylEstimate fit_weyl(const Spectrum& spectrum, double c_analytic, const WeylWindow& window = {});

// --- Tauberian fit ---------------------------------------------------------

/// a int_0^inf s^{a-1} / (1 + s) ds = a pi / sin(pi a) for a in (0, 1).
double tauberian_normalization(double a);
/// The same integral by Gauss-Legendre quadrature after s = e^x.
double tauberian_normalization_quadrature(double a);

struct TauberianOptions {
  cplx lambda0 = cplx(0.0, 10.0);
  int d = 2;
  int k = 1;
  double c_reference = 0.0;  // compared against when positive
};

struct TauberianReport {
  double a = 0.0;      // d / (8 (k + 1))
  int power = 0;       // 4 (k + 1)
  std::vector<double> T, S;
  double P = 0.0;             // S(T) ~ P T^{a-1} with the exponent fixed
  double free_slope = 0.0;    // fitted exponent of S
  double normalization = 0.0;
  double c_tauberian = 0.0;   // P / normalization
  double c_reference = 0.0;
  double relative_deviation = 0.0;
  std::vector<std::string> warnings;
};

/// S(T) = sum_j mult_j / (|lambda_j - lambda0|^{4(k+1)} + T).
TauberianReport tauberian_check(const std::vector<SpectrumEntry>& spectrum, const std::vector<double>& T,
                                const TauberianOptions& opts = {});

// --- Resolvent norms -------------------------------------------------------

struct ResolventOptions {
  int iterations = 30;
  int restarts = 3;
  std::uint64_t seed = 0;
  double epsilon0 = 0.39269908169872414;  // pi / 8
  double Lambda0 = 10.0;
  bool max_norm = true;  // nodal max-norm estimate as well
  LuOptions lu;
};

struct ResolventPoint {
  double t = 0.0;
  cplx lambda;
  double l2 = 0.0;        // ||T||, unsigned mass geometry
  double gradient = 0.0;  // sup ||grad T f|| / ||f||
  double max_norm = 0.0;  // nodal max-norm estimate
  bool ok = true;
  std::string error;
};

struct ResolventScan {
  double theta = 0.0;
  std::vector<ResolventPoint> points;
  double slope_l2 = 0.0, slope_gradient = 0.0, slope_max = 0.0;
  std::vector<std::string> warnings;
};

/// Applies the weighted adjoint T_lambda^* = J T_conj(lambda) J, J = diag(I, -I),
/// given the resolvent at conj(lambda).
NodalPair resolvent_adjoint_apply(const DiscreteResolvent& conjugate, const NodalPair& g);

/// Operator norms of T_lambda for lambda = t e^{i theta}. Points whose shift
/// cannot be factored are kept with ok = false and skipped in the fits.
/// Throws std::domain_error if theta is within epsilon0 of the real axis.
ResolventScan resolvent_norm_scan(const TransmissionPencil& pencil, double theta, const std::vector<double>& t,
                                  const ResolventOptions& opts = {});

// --- Hilbert-Schmidt norms and resolvent identities ------------------------

/// sqrt(sum_ij w_i |T_ij|^2 / w_j): Frobenius norm in the geometry of diag(w).
double hs_norm(const MatC& T, const VecR& weights);
/// Same for a dense SPD Gram matrix W.
double hs_norm(const MatC& T, const MatR& W);

/// Dense nodal operator T_lambda (2V x 2V).
MatC dense_resolvent(const TransmissionPencil& pencil, cplx lambda, const LuOptions& lu = {});
/// Dense DOF-space operator (K - lambda M)^{-1} M.
MatC dense_pencil_resolvent(const MatR& K, const MatR& M, cplx lambda);

struct HsDecayReport {
  double theta = 0.0;
  std::vector<double> t, hs;
  double slope = 0.0;
};

/// hs_norm of T_lambda T_lambda, lambda = t e^{i theta}, in the unsigned mass
/// geometry. Dense; refuses pencils with more than max_nodes nodal unknowns.
HsDecayReport hs_decay_scan(const TransmissionPencil& pencil, double theta, const std::vector<double>& t,
                            int max_nodes = 4000);

struct ModifiedResolventReport {
  double deviation_right = 0.0;  // T (I - s T)^{-1} vs T_shifted
  double deviation_left = 0.0;   // (I - s T)^{-1} T vs T_shifted
  double condition = 1.0;        // 2-norm condition number of I - s T
  double tolerance = 0.0;
  bool pass = false;
};

/// Entrywise deviations relative to max |T_shifted|. The tolerance is
/// base_tol * condition.
ModifiedResolventReport modified_resolvent_check(const MatC& T, const MatC& T_shifted, cplx s,
                                                 double base_tol = 1e-8);
/// Builds T at lambda and lambda + s from the dense pencil.
ModifiedResolventReport modified_resolvent_check(const MatR& K, const MatR& M, cplx lambda, cplx s,
                                                 double base_tol = 1e-8);

struct TraceOptions {
  double Lambda0 = 10.0;
  int k = 1;
  int dense_cap = 400;
  double max_condition = 1e10;  // per-shift bound before Lambda0 is raised
  int max_raises = 5;
};

struct TraceReport {
  double t = 0.0;
  int k = 1;
  double Lambda0 = 0.0;
  cplx lambda0;
  int raises = 0;
  std::vector<double> theta;
  std::vector<cplx> shifts;
  std::vector<double> conditions;
  cplx lhs, rhs;
  double abs_gap = 0.0, rel_gap = 0.0;
  int eigenvalues = 0;
  std::vector<std::string> warnings;
};

/// Shift angles (1/4 + 2(j-1)) pi/(k+1) followed by (5/4 + 2(j-1)) pi/(k+1),
/// j = 1..k+1. Their e^{i theta} are the 2(k+1)-th roots of i.
std::vector<double> trace_angles(int k);

/// trace(prod_j (K - mu_j M)^{-1} M) against
/// sum_j 1 / ((lambda_j - lambda0)^{2(k+1)} - i t^{2(k+1)}) over every finite
/// eigenvalue of the dense pencil, with mu_j = lambda0 + t e^{i theta_j} and
/// lambda0 = i Lambda0.
TraceReport trace_identity_check(const SparseSym& K, const SparseSym& M, double t, const TraceOptions& opts = {});
TraceReport trace_identity_check(const MatR& K, const MatR& M, double t, const TraceOptions& opts = {});

struct KernelOptions {
  cplx lambda0 = cplx(0.0, 10.0);
  int k = 1;
  double radius = 60.0;  // integrate |eta| <= radius sqrt(t) in normalized variables
  double tail_tol = 1e-10;
};

struct KernelDiagonal {
  cplx full;
  cplx leading;
  cplx ratio;
  double tail_bound = 0.0;
};

/// Leading coefficient (2 pi)^{-2} int dxi / ((Sigma^{-1} <A xi, xi>)^{2(k+1)} - i)
/// in closed form.
cplx kernel_leading_coefficient(const SymMat2& A, double Sigma, int k);
/// The same by radial quadrature.
cplx kernel_leading_coefficient_quadrature(const SymMat2& A, double Sigma, int k);

/// Frozen-coefficient kernel at z = 0 for one medium. Throws AnalysisError if
/// the tail beyond the quadrature radius exceeds tail_tol of the head.
KernelDiagonal kernel_diag_medium(const SymMat2& A, double Sigma, double t, const KernelOptions& opts = {});
/// Both media at x0.
std::array<KernelDiagonal, 2> kernel_diag_asymptotic(Point2 x0, const MediumPair& pair, double t,
                                                     const KernelOptions& opts = {});

}  // namespace tevlab
