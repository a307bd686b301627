// SPDX-License-Identifier: Apache-2.0

#include "tevlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace tevlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    constexpr int n = 20;
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        const double p = std::legendre(n, x), q = std::legendre(n - 1, x);
        const double dp = n * (x * p - q) / (x * x - 1.0);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double p = std::legendre(n, x), q = std::legendre(n - 1, x);
      const double dp = n * (x * p - q) / (x * x - 1.0);
      r.x[i] = x;
      r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

template <typename F>
auto integrate(F f, double a, double b) -> decltype(f(a)) {
  const GaussRule& g = gauss_rule();
  const double h = 0.5 * (b - a), c = 0.5 * (b + a);
  decltype(f(a)) s{};
  for (std::size_t i = 0; i < g.x.size(); ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

NodalPair random_pair(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  NodalPair v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return v;
}

double weighted_norm(const TransmissionPencil& p, const NodalPair& f) {
  return std::sqrt(std::max(0.0, f.dot(weight_apply(p, f)).real()));
}

// J P A^{-H} P^T g: the weighted adjoint of f -> P A^{-1} P^T D f applied to
// W^{-1} g.
NodalPair adjoint_core(const TransmissionPencil& p, const ComplexLU& lu, const VecC& g) {
  NodalPair x = p.dofs.prolongation() * lu.solve_adjoint(p.dofs.prolongation().transpose() * g);
  x.tail(p.num_vertices()) *= -1.0;
  return x;
}

// Largest value of sqrt(<Q T f, T f> / <W f, f>) by power iteration, where Q
// is `form` (W for the L2 norm, the stiffness blocks for the gradient).
template <typename Form>
double power_norm(const TransmissionPencil& p, const DiscreteResolvent& R, Form form, const ResolventOptions& o,
                  std::mt19937_64& rng) {
  double best = 0.0;
  const Eigen::Index n = 2 * p.num_vertices();
  for (int r = 0; r < o.restarts; ++r) {
    NodalPair x = random_pair(n, rng);
    x /= weighted_norm(p, x);
    for (int it = 0; it < o.iterations; ++it) {
      const NodalPair y = R.apply(x);
      const VecC qy = form(y);
      const double val = std::sqrt(std::max(0.0, y.dot(qy).real()));
      best = std::max(best, val);
      NodalPair z = adjoint_core(p, R.lu(), qy);
      const double nz = weighted_norm(p, z);
      if (!(nz > 0.0)) break;
      x = z / nz;
    }
  }
  return best;
}

// Hager-Higham estimate of max_i sum_j |T_ij| for the nodal matrix of T.
double max_norm_estimate(const TransmissionPencil& p, const DiscreteResolvent& R) {
  const Eigen::Index n = 2 * p.num_vertices();
  const auto& P = p.dofs.prolongation();
  // T^T x = D P A^{-1} P^T x (A is complex symmetric)
  auto apply_transpose = [&](const VecC& x) -> VecC { return signed_mass_apply(p, P * R.solve(P.transpose() * x)); };
  VecC x = VecC::Constant(n, cplx(1.0 / static_cast<double>(n), 0.0));
  double est = 0.0;
  Eigen::Index last = -1;
  for (int it = 0; it < 5; ++it) {
    const VecC y = apply_transpose(x);
    est = std::max(est, y.cwiseAbs().sum());
    VecC xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi[i] = std::abs(y[i]) > 0.0 ? y[i] / std::abs(y[i]) : cplx(1.0, 0.0);
    // conj(T) xi
    const VecC z = R.apply(xi.conjugate()).conjugate();
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x).real() || j == last) break;
    x.setZero();
    x[j] = 1.0;
    last = j;
  }
  return est;
}

MatC pencil_inverse_times(const ComplexLU& lu, const MatC& B) {
  MatC X(B.rows(), B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) X.col(j) = lu.solve(B.col(j));
  return X;
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need two or more paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * x[i] - f.intercept;
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

LineFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(i < y.size() && y[i] > 0.0)) throw std::domain_error("fit_log_log: non-positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

// --- Weyl -------------------------------------------------------------------

double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: d >= 1");
  return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double sublevel_volume(const SymMat2& A, double Sigma) {
  if (!(Sigma > 0.0)) throw std::domain_error("sublevel_volume: Sigma must be positive");
  if (!(A.a11 > 0.0) || !(A.det() > 0.0)) throw std::domain_error("sublevel_volume: A is not positive definite");
  return kPi * Sigma / std::sqrt(A.det());
}

double sublevel_volume(const MatR& A, double Sigma) {
  if (A.rows() != A.cols() || A.rows() < 1) throw std::invalid_argument("sublevel_volume: A must be square");
  if (!(Sigma > 0.0)) throw std::domain_error("sublevel_volume: Sigma must be positive");
  Eigen::LLT<MatR> llt(0.5 * (A + A.transpose()));
  if (llt.info() != Eigen::Success) throw std::domain_error("sublevel_volume: A is not positive definite");
  const int d = static_cast<int>(A.rows());
  double sqrt_det = 1.0;
  for (int i = 0; i < d; ++i) sqrt_det *= llt.matrixL()(i, i);
  return unit_ball_volume(d) * std::pow(Sigma, 0.5 * d) / sqrt_det;
}

double weyl_constant(const TriMesh& mesh, const MediumPair& pair) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Point2 x = mesh.centroid(t);
    const double area = std::abs(mesh.signed_area(t));
    s += area * (sublevel_volume(pair.A1(x), pair.Sigma1(x)) + sublevel_volume(pair.A2(x), pair.Sigma2(x)));
  }
  return s / (4.0 * kPi * kPi);
}

double weyl_constant_monte_carlo(const TriMesh& mesh, const MediumPair& pair, long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("weyl_constant_monte_carlo: samples >= 1");
  std::vector<double> areas(mesh.num_triangles());
  for (std::size_t t = 0; t < areas.size(); ++t) areas[t] = std::abs(mesh.signed_area(t));
  const double total = std::accumulate(areas.begin(), areas.end(), 0.0);
  auto rng = make_rng(seed, 0x5eed);
  std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double acc = 0.0;
  for (long s = 0; s < samples; ++s) {
    const auto& tri = mesh.triangles()[pick(rng)];
    double r1 = u(rng), r2 = u(rng);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const auto& v = mesh.vertices();
    const Point2 x = v[tri[0]] + r1 * (v[tri[1]] - v[tri[0]]) + r2 * (v[tri[2]] - v[tri[0]]);
    for (int j = 1; j <= 2; ++j) {
      const SymMat2 A = j == 1 ? pair.A1(x) : pair.A2(x);
      const double Sigma = j == 1 ? pair.Sigma1(x) : pair.Sigma2(x);
      const double half = std::sqrt(Sigma / A.eigenvalues().first);
      const Point2 xi{half * (2.0 * u(rng) - 1.0), half * (2.0 * u(rng) - 1.0)};
      if (A.form(xi, xi) < Sigma) acc += 4.0 * half * half;
    }
  }
  return total * acc / static_cast<double>(samples) / (4.0 * kPi * kPi);
}

double interpolated_count(const std::vector<double>& moduli, double t) {
  if (moduli.empty() || t <= 0.0) return 0.0;
  // corners (r_i, N(r_i)) at distinct moduli
  auto hi = std::upper_bound(moduli.begin(), moduli.end(), t);
  const double n_at = static_cast<double>(hi - moduli.begin());
  if (hi == moduli.end()) return n_at;
  const double r_next = *hi;
  const double n_next = static_cast<double>(std::upper_bound(moduli.begin(), moduli.end(), r_next) - moduli.begin());
  const double r_prev = hi == moduli.begin() ? 0.0 : *(hi - 1);
  const double n_prev = n_at;
  if (r_prev == t) return n_prev;
  return n_prev + (n_next - n_prev) * (t - r_prev) / (r_next - r_prev);
}

WeylEstimate fit_weyl(const std::vector<double>& moduli, double t_max, double c_analytic, const WeylWindow& window) {
  if (!(window.lo_fraction > 0.0) || !(window.hi_fraction > window.lo_fraction) || window.hi_fraction > 1.0)
    throw std::invalid_argument("fit_weyl: window must satisfy 0 < lo < hi <= 1");
  if (!std::is_sorted(moduli.begin(), moduli.end())) throw std::invalid_argument("fit_weyl: moduli must be sorted");
  if (!std::isfinite(t_max) || !(t_max > 0.0)) throw std::invalid_argument("fit_weyl: t_max must be finite");
  WeylEstimate w;
  w.c_analytic = c_analytic;
  w.t_lo = window.lo_fraction * t_max;
  w.t_hi = window.hi_fraction * t_max;
  w.eigenvalues_in_window = static_cast<int>(std::upper_bound(moduli.begin(), moduli.end(), w.t_hi) -
                                             std::lower_bound(moduli.begin(), moduli.end(), w.t_lo));
  if (w.eigenvalues_in_window < 10) {
    throw AnalysisError("fit_weyl: " + std::to_string(w.eigenvalues_in_window) +
                        " eigenvalues in the fit window, at least 10 needed");
  }
  w.t_grid = log_grid(w.t_lo, w.t_hi, std::max(window.grid, 2));
  w.counts.resize(w.t_grid.size());
  double stn = 0.0, stt = 0.0;
  for (std::size_t i = 0; i < w.t_grid.size(); ++i) {
    w.counts[i] = interpolated_count(moduli, w.t_grid[i]);
    stn += w.t_grid[i] * w.counts[i];
    stt += w.t_grid[i] * w.t_grid[i];
  }
  const LineFit f = fit_line(w.t_grid, w.counts);
  w.c_fit = f.slope;
  w.intercept = f.intercept;
  w.c_fit_origin = stn / stt;
  w.relative_deviation = c_analytic > 0.0 ? std::abs(w.c_fit - c_analytic) / c_analytic : 0.0;
  return w;
}

WeylEstimate fit_weyl(const Spectrum& spectrum, double c_analytic, const WeylWindow& window) {
  return fit_weyl(spectrum.moduli(), spectrum.t_max, c_analytic, window);
}

// --- Tauberian --------------------------------------------------------------

double tauberian_normalization(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("tauberian_normalization: a must lie in (0, 1)");
  return a * kPi / std::sin(kPi * a);
}

double tauberian_normalization_quadrature(double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("tauberian_normalization_quadrature: a must lie in (0, 1)");
  // int e^{a x} / (1 + e^x) dx over R; the tails are summed in closed form
  const double lo = -40.0 / a, hi = 40.0 / (1.0 - a);
  auto f = [a](double x) { return x < 0.0 ? std::exp(a * x) / (1.0 + std::exp(x)) : std::exp((a - 1.0) * x) / (1.0 + std::exp(-x)); };
  double s = 0.0;
  const int panels = static_cast<int>(std::ceil(hi - lo));
  const double h = (hi - lo) / panels;
  for (int i = 0; i < panels; ++i) s += integrate(f, lo + i * h, lo + (i + 1) * h);
  s += std::exp(a * lo) / a + std::exp((a - 1.0) * hi) / (1.0 - a);
  return a * s;
}

TauberianReport tauberian_check(const std::vector<SpectrumEntry>& spectrum, const std::vector<double>& T,
                                const TauberianOptions& opts) {
  if (spectrum.empty()) throw AnalysisError("tauberian_check: empty spectrum");
  if (T.size() < 2) throw std::invalid_argument("tauberian_check: need at least two grid points");
  if (opts.d < 1 || opts.k < 0) throw std::invalid_argument("tauberian_check: bad dimension or order");
  TauberianReport r;
  r.power = 4 * (opts.k + 1);
  r.a = static_cast<double>(opts.d) / (8.0 * (opts.k + 1));
  r.normalization = tauberian_normalization(r.a);
  r.T = T;
  std::vector<double> shifted;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (const auto& e : spectrum) {
    const double m = std::abs(e.lambda - opts.lambda0);
    rmin = std::min(rmin, m);
    rmax = std::max(rmax, m);
    shifted.push_back(std::pow(m, r.power));
  }
  r.S.resize(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!(T[i] > 0.0)) throw std::invalid_argument("tauberian_check: grid must be positive");
    double s = 0.0;
    for (std::size_t j = 0; j < spectrum.size(); ++j) s += spectrum[j].multiplicity / (shifted[j] + T[i]);
    r.S[i] = s;
  }
  const LineFit free = fit_log_log(r.T, r.S);
  r.free_slope = free.slope;
  const double a_fit = free.slope + 1.0;
  if (!(a_fit > 0.02 && a_fit < 1.0)) {
    throw AnalysisError("tauberian_check: fitted exponent a = " + std::to_string(a_fit) +
                        " is outside (0, 1); the grid does not see a power law");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) acc += std::log(r.S[i]) - (r.a - 1.0) * std::log(T[i]);
  r.P = std::exp(acc / static_cast<double>(T.size()));
  r.c_tauberian = r.P / r.normalization;
  r.c_reference = opts.c_reference;
  if (opts.c_reference > 0.0) r.relative_deviation = std::abs(r.c_tauberian - opts.c_reference) / opts.c_reference;
  const auto [tmin, tmax] = std::minmax_element(T.begin(), T.end());
  if (*tmax > std::pow(rmax, r.power) / 100.0)
    r.warnings.push_back("grid reaches the top of the spectrum; truncation biases S low");
  if (*tmin < std::pow(rmin, r.power))
    r.warnings.push_back("grid starts below the lowest eigenvalue; preasymptotic regime");
  return r;
}

// --- Resolvent norms -----------------------------------------------------------

NodalPair resolvent_adjoint_apply(const DiscreteResolvent& conjugate, const NodalPair& g) {
  const int nv = conjugate.pencil().num_vertices();
  NodalPair h = g;
  h.tail(nv) *= -1.0;
  NodalPair out = conjugate.apply(h);
  out.tail(nv) *= -1.0;
  return out;
}

ResolventScan resolvent_norm_scan(const TransmissionPencil& pencil, double theta, const std::vector<double>& t,
                                  const ResolventOptions& opts) {
  const double dist = std::abs(theta - kPi * std::round(theta / kPi));
  if (dist < opts.epsilon0) {
    throw std::domain_error("resolvent_norm_scan: ray angle is within epsilon0 of the real axis");
  }
  if (!std::is_sorted(t.begin(), t.end()) || t.empty()) throw std::invalid_argument("resolvent_norm_scan: bad t grid");
  ResolventScan scan;
  scan.theta = theta;
  if (t.front() <= opts.Lambda0) scan.warnings.push_back("t grid starts at or below Lambda0");
  std::vector<double> ft, fl2, fgrad, fmax;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ResolventPoint pt;
    pt.t = t[i];
    pt.lambda = std::polar(t[i], theta);
    try {
      DiscreteResolvent R(pencil, pt.lambda, opts.lu);
      auto rng = make_rng(opts.seed, i);
      pt.l2 = power_norm(pencil, R, [&](const VecC& y) { return weight_apply(pencil, y); }, opts, rng);
      pt.gradient = power_norm(pencil, R, [&](const VecC& y) { return gradient_form_apply(pencil, y); }, opts, rng);
      if (opts.max_norm) pt.max_norm = max_norm_estimate(pencil, R);
      ft.push_back(pt.t);
      fl2.push_back(pt.l2);
      fgrad.push_back(pt.gradient);
      fmax.push_back(pt.max_norm);
    } catch (const SingularShiftError& e) {
      pt.ok = false;
      pt.error = e.what();
      scan.warnings.push_back("skipped t = " + std::to_string(t[i]) + ": " + e.what());
    }
    scan.points.push_back(pt);
  }
  if (ft.size() >= 2) {
    scan.slope_l2 = fit_log_log(ft, fl2).slope;
    scan.slope_gradient = fit_log_log(ft, fgrad).slope;
    if (opts.max_norm) scan.slope_max = fit_log_log(ft, fmax).slope;
  } else {
    scan.warnings.push_back("fewer than two usable points; no slopes fitted");
  }
  return scan;
}

// --- Hilbert-Schmidt ---------------------------------------------------------

double hs_norm(const MatC& T, const VecR& weights) {
  if (T.rows() != T.cols() || T.rows() != weights.size()) throw std::invalid_argument("hs_norm: shape mismatch");
  if ((weights.array() <= 0.0).any()) throw std::domain_error("hs_norm: weights must be positive");
  double s = 0.0;
  for (Eigen::Index j = 0; j < T.cols(); ++j) {
    for (Eigen::Index i = 0; i < T.rows(); ++i) s += weights[i] * std::norm(T(i, j)) / weights[j];
  }
  return std::sqrt(s);
}

double hs_norm(const MatC& T, const MatR& W) {
  if (T.rows() != T.cols() || T.rows() != W.rows() || W.rows() != W.cols())
    throw std::invalid_argument("hs_norm: shape mismatch");
  Eigen::LLT<MatR> llt(W);
  if (llt.info() != Eigen::Success) throw std::domain_error("hs_norm: Gram matrix is not positive definite");
  // || L^T T L^{-T} ||_F with W = L L^T
  const MatC L = llt.matrixL().toDenseMatrix().cast<cplx>();
  const MatC LtT = L.adjoint() * T;
  const MatC X = L.triangularView<Eigen::Lower>().solve(LtT.transpose()).transpose();
  return X.norm();
}

MatC dense_resolvent(const TransmissionPencil& pencil, cplx lambda, const LuOptions& lu) {
  const Eigen::Index n = 2 * pencil.num_vertices();
  DiscreteResolvent R(pencil, lambda, lu);
  MatC T(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    NodalPair e = NodalPair::Zero(n);
    e[j] = 1.0;
    T.col(j) = R.apply(e);
  }
  return T;
}

MatC dense_pencil_resolvent(const MatR& K, const MatR& M, cplx lambda) {
  const MatC A = K.cast<cplx>() - lambda * M.cast<cplx>();
  Eigen::PartialPivLU<MatC> lu(A);
  return lu.solve(M.cast<cplx>());
}

HsDecayReport hs_decay_scan(const TransmissionPencil& pencil, double theta, const std::vector<double>& t,
                            int max_nodes) {
  if (2 * pencil.num_vertices() > max_nodes) {
    throw std::invalid_argument("hs_decay_scan: " + std::to_string(2 * pencil.num_vertices()) +
                                " nodal unknowns exceed the dense cap " + std::to_string(max_nodes));
  }
  HsDecayReport r;
  r.theta = theta;
  // With T = P A^{-1} P^T D, trace(T^* T) for the square reduces to
  // || L^T C L ||_F^2, C = A^{-1} M A^{-1}, P^T W P = L L^T.
  const auto& P = pencil.dofs.prolongation();
  SparseSym W(P.rows(), P.rows());
  {
    const int nv = pencil.num_vertices();
    std::vector<Eigen::Triplet<double>> trip;
    for (int b = 0; b < 2; ++b) {
      const SparseSym& blk = b == 0 ? pencil.blocks.mass1 : pencil.blocks.mass2;
      for (Eigen::Index j = 0; j < blk.outerSize(); ++j)
        for (SparseSym::InnerIterator it(blk, j); it; ++it) trip.emplace_back(it.row() + b * nv, it.col() + b * nv, it.value());
    }
    W.setFromTriplets(trip.begin(), trip.end());
  }
  const MatR Mw = MatR(SparseSym(P.transpose() * W * P));
  Eigen::LLT<MatR> llt(Mw);
  if (llt.info() != Eigen::Success) throw std::runtime_error("hs_decay_scan: mass matrix is not positive definite");
  const MatC L = llt.matrixL().toDenseMatrix().cast<cplx>();
  const MatC Md = MatR(pencil.M).cast<cplx>();
  for (double ti : t) {
    ComplexLU lu(pencil.K, pencil.M, std::polar(ti, theta));
    const MatC C = pencil_inverse_times(lu, Md * pencil_inverse_times(lu, MatC::Identity(Md.rows(), Md.cols())));
    r.t.push_back(ti);
    r.hs.push_back((L.adjoint() * C * L).norm());
  }
  if (r.t.size() >= 2) r.slope = fit_log_log(r.t, r.hs).slope;
  return r;
}

ModifiedResolventReport modified_resolvent_check(const MatC& T, const MatC& T_shifted, cplx s, double base_tol) {
  if (T.rows() != T.cols() || T.rows() != T_shifted.rows() || T.cols() != T_shifted.cols())
    throw std::invalid_argument("modified_resolvent_check: shape mismatch");
  const Eigen::Index n = T.rows();
  ModifiedResolventReport r;
  const MatC B = MatC::Identity(n, n) - s * T;
  Eigen::JacobiSVD<MatC> svd(B);
  const auto& sv = svd.singularValues();
  if (!(sv[n - 1] > 0.0)) throw AnalysisError("modified_resolvent_check: I - s T is singular");
  r.condition = sv[0] / sv[n - 1];
  Eigen::PartialPivLU<MatC> lu(B);
  const MatC left = lu.solve(T);                                       // (I - sT)^{-1} T
  const MatC right = Eigen::PartialPivLU<MatC>(B.transpose()).solve(T.transpose()).transpose();  // T (I - sT)^{-1}
  const double scale = std::max(T_shifted.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  r.deviation_right = (right - T_shifted).cwiseAbs().maxCoeff() / scale;
  r.deviation_left = (left - T_shifted).cwiseAbs().maxCoeff() / scale;
  r.tolerance = base_tol * r.condition;
  r.pass = r.deviation_right <= r.tolerance && r.deviation_left <= r.tolerance;
  return r;
}

ModifiedResolventReport modified_resolvent_check(const MatR& K, const MatR& M, cplx lambda, cplx s, double base_tol) {
  return modified_resolvent_check(dense_pencil_resolvent(K, M, lambda), dense_pencil_resolvent(K, M, lambda + s), s,
                                  base_tol);
}

// --- Trace identity -------------------------------------------------------------

std::vector<double> trace_angles(int k) {
  if (k < 0) throw std::invalid_argument("trace_angles: k >= 0");
  std::vector<double> th;
  for (int j = 1; j <= k + 1; ++j) th.push_back((0.25 + 2.0 * (j - 1)) * kPi / (k + 1));
  for (int j = 1; j <= k + 1; ++j) th.push_back((1.25 + 2.0 * (j - 1)) * kPi / (k + 1));
  return th;
}

TraceReport trace_identity_check(const MatR& K, const MatR& M, double t, const TraceOptions& opts) {
  if (K.rows() > opts.dense_cap) {
    throw std::invalid_argument("trace_identity_check: " + std::to_string(K.rows()) + " DOFs exceed the dense cap " +
                                std::to_string(opts.dense_cap));
  }
  if (t < 10.0 * opts.Lambda0) throw std::domain_error("trace_identity_check: need t >= 10 Lambda0");
  TraceReport r;
  r.t = t;
  r.k = opts.k;
  r.theta = trace_angles(opts.k);
  const int n = 2 * (opts.k + 1);
  const MatC Mc = M.cast<cplx>();
  const MatC Kc = K.cast<cplx>();
  std::vector<Eigen::PartialPivLU<MatC>> lus;
  double Lambda0 = opts.Lambda0;
  for (int raise = 0;; ++raise) {
    const cplx lambda0(0.0, Lambda0);
    r.shifts.clear();
    r.conditions.clear();
    lus.clear();
    bool ok = true;
    for (double th : r.theta) {
      const cplx mu = lambda0 + std::polar(t, th);
      r.shifts.push_back(mu);
      lus.emplace_back(Kc - mu * Mc);
      const double rc = lus.back().rcond();
      r.conditions.push_back(rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
      if (!(rc > 0.0) || 1.0 / rc > opts.max_condition) ok = false;
    }
    r.Lambda0 = Lambda0;
    r.lambda0 = lambda0;
    r.raises = raise;
    if (ok) break;
    if (raise == opts.max_raises) {
      throw AnalysisError("trace_identity_check: a shift stays ill-conditioned after raising Lambda0 " +
                          std::to_string(opts.max_raises) + " times");
    }
    Lambda0 *= 2.0;
    if (t < 10.0 * Lambda0) r.warnings.push_back("raised Lambda0 violates t >= 10 Lambda0");
  }
  MatC X = MatC::Identity(K.rows(), K.cols());
  for (auto& lu : lus) X = lu.solve(Mc * X);
  r.lhs = X.trace();
  const std::vector<cplx> ev = dense_eigenvalues(K, M);
  r.eigenvalues = static_cast<int>(ev.size());
  const cplx tn = cplx(0.0, 1.0) * std::pow(t, n);
  cplx s = 0.0;
  for (cplx l : ev) s += 1.0 / (std::pow(l - r.lambda0, n) - tn);
  r.rhs = s;
  r.abs_gap = std::abs(r.lhs - r.rhs);
  r.rel_gap = r.abs_gap / std::max(std::abs(r.rhs), std::numeric_limits<double>::min());
  return r;
}

TraceReport trace_identity_check(const SparseSym& K, const SparseSym& M, double t, const TraceOptions& opts) {
  if (K.rows() > opts.dense_cap) {
    throw std::invalid_argument("trace_identity_check: " + std::to_string(K.rows()) + " DOFs exceed the dense cap " +
                                std::to_string(opts.dense_cap));
  }
  return trace_identity_check(MatR(K), MatR(M), t, opts);
}

// --- Kernel diagonal -------------------------------------------------------------

namespace {

// (2 pi)^{-2} Sigma / sqrt(det A) * 2 pi: polar Jacobian after
// xi = Sigma^{1/2} A^{-1/2} eta, so that Sigma^{-1} <A xi, xi> = |eta|^2.
double radial_prefactor(const SymMat2& A, double Sigma) {
  if (!(Sigma > 0.0) || !(A.a11 > 0.0) || !(A.det() > 0.0))
    throw std::domain_error("kernel: need A positive definite and Sigma > 0");
  return Sigma / std::sqrt(A.det()) / (2.0 * kPi);
}

// int_0^U f(u) du / 2 on geometric panels around the scale `peak`.
template <typename F>
cplx radial_integral(F f, double peak, double U) {
  cplx s = 0.0;
  double a = 0.0, b = std::min(U, 1e-6 * peak);
  s += integrate(f, a, b);
  while (b < U) {
    a = b;
    b = std::min(U, b * 1.25);
    s += integrate(f, a, b);
  }
  return 0.5 * s;
}

}  // namespace

cplx kernel_leading_coefficient(const SymMat2& A, double Sigma, int k) {
  // int_0^inf du / (u^n + b) = (pi/n) / sin(pi/n) b^{1/n - 1}, b = -i
  const int n = 2 * (k + 1);
  const cplx b = std::polar(1.0, -kPi / 2.0);
  const cplx I = (kPi / n) / std::sin(kPi / n) * std::pow(b, 1.0 / n - 1.0);
  return radial_prefactor(A, Sigma) * 0.5 * I;
}

cplx kernel_leading_coefficient_quadrature(const SymMat2& A, double Sigma, int k) {
  const int n = 2 * (k + 1);
  const double U = 1e6;
  auto f = [n](double u) { return 1.0 / (std::pow(cplx(u, 0.0), n) - cplx(0.0, 1.0)); };
  cplx s = radial_integral(f, 1.0, U);
  s += 0.5 * std::pow(U, 1.0 - n) / (n - 1.0);  // tail of u^{-n}
  return radial_prefactor(A, Sigma) * s;
}

KernelDiagonal kernel_diag_medium(const SymMat2& A, double Sigma, double t, const KernelOptions& opts) {
  if (!(t > 0.0)) throw std::domain_error("kernel_diag_medium: t must be positive");
  const int n = 2 * (opts.k + 1);
  KernelDiagonal r;
  const double scale = std::pow(t, 1.0 - 2.0 * (opts.k + 1));  // t^{d/2 - 2(k+1)}, d = 2
  r.leading = scale * kernel_leading_coefficient(A, Sigma, opts.k);
  const double rho = opts.radius * std::sqrt(t);
  const double U = rho * rho;
  const cplx tn = cplx(0.0, 1.0) * std::pow(t, n);
  auto f = [&](double u) { return 1.0 / (std::pow(u + opts.lambda0, n) - tn); };
  const cplx head = radial_prefactor(A, Sigma) * radial_integral(f, t, U);
  // |(u + lambda0)^n - i t^n| >= (1 - q) (u - |lambda0|)^n for u >= U, q = (t / (U - |lambda0|))^n
  const double base = U - std::abs(opts.lambda0);
  const double q = base > 0.0 ? std::pow(t / base, n) : 1.0;
  r.tail_bound = q < 1.0 ? radial_prefactor(A, Sigma) * 0.5 * std::pow(base, 1.0 - n) / ((n - 1.0) * (1.0 - q))
                         : std::numeric_limits<double>::infinity();
  if (!(r.tail_bound <= opts.tail_tol * std::abs(head))) {
    throw AnalysisError("kernel_diag_medium: quadrature tail exceeds tolerance; increase the radius");
  }
  r.full = head;
  r.ratio = r.full / r.leading;
  return r;
}

std::array<KernelDiagonal, 2> kernel_diag_asymptotic(Point2 x0, const MediumPair& pair, double t,
                                                     const KernelOptions& opts) {
  return {kernel_diag_medium(pair.A1(x0), pair.Sigma1(x0), t, opts),
          kernel_diag_medium(pair.A2(x0), pair.Sigma2(x0), t, opts)};
}

}  // namespace tevlab
