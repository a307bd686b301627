// SPDX-License-Identifier: Apache-2.0

#include "tevlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace tevlab {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr int kMaxOrder = 10000;

// J_0 .. J_{order} by Miller's algorithm. Works for real or complex argument.
template <typename T>
std::vector<T> miller(int order, T z) {
  const double az = std::abs(z);
  const double top = std::max<double>(order, az);
  int start = static_cast<int>(top + 30.0 + std::sqrt(40.0 * top));
  start += start % 2;
  std::vector<T> J(order + 1, T(0.0));
  T next(0.0), cur(1e-30), norm(0.0);
  const T two_over_z = T(2.0) / z;
  for (int k = start; k >= 1; --k) {
    // cur = J_k, next = J_{k+1}
    const T prev = static_cast<double>(k) * two_over_z * cur - next;  // J_{k-1}
    if (k <= order) J[k] = cur;
    if (k % 2 == 0) norm += 2.0 * cur;
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      const double s = 1e-250;
      cur *= s;
      next *= s;
      norm *= s;
      for (int j = k; j <= order; ++j) J[j] *= s;
    }
  }
  J[0] = cur;
  norm += cur;
  for (auto& v : J) v /= norm;
  return J;
}

template <typename T>
T series(int m, T z) {
  // sum_k (-1)^k (z/2)^(2k+m) / (k! (k+m)!)
  const T half = z / 2.0;
  T term(1.0);
  for (int j = 1; j <= m; ++j) term *= half / static_cast<double>(j);
  T sum = term;
  const T q = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + m));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

template <typename T>
T bessel_impl(int m, T z) {
  if (m < 0 || m > kMaxOrder) throw std::domain_error("bessel_J: order out of range");
  if (std::abs(z) == 0.0) return T(m == 0 ? 1.0 : 0.0);
  if (std::abs(z) <= 1.0) return series(m, z);
  return miller(m, z)[m];
}

template <typename T>
T bessel_prime_impl(int m, T z) {
  if (m < 0 || m >= kMaxOrder) throw std::domain_error("bessel_J_prime: order out of range");
  if (std::abs(z) == 0.0) return T(m == 1 ? 0.5 : 0.0);
  if (std::abs(z) <= 1.0) {
    if (m == 0) return -series(1, z);
    return (series(m - 1, z) - series(m + 1, z)) / 2.0;
  }
  const auto J = miller(m + 1, z);
  if (m == 0) return -J[1];
  return (J[m - 1] - J[m + 1]) / 2.0;
}

// J_m, J_m', J_m'' at z in one pass.
struct Jet {
  cplx j, dj, ddj;
};

Jet bessel_jet(int m, cplx z) {
  const cplx j = bessel_impl(m, z);
  const cplx dj = bessel_prime_impl(m, z);
  const double mm = static_cast<double>(m) * m;
  const cplx ddj = -dj / z - (1.0 - mm / (z * z)) * j;
  return {j, dj, ddj};
}

// D_m and dD_m/dk.
std::pair<cplx, cplx> determinant_and_slope(int m, cplx k, double n) {
  const double s = std::sqrt(n);
  const Jet a = bessel_jet(m, k);
  const Jet b = bessel_jet(m, s * k);
  const cplx D = a.j * s * b.dj - a.dj * b.j;
  const cplx dD = n * a.j * b.ddj - a.ddj * b.j;
  return {D, dD};
}

void check_contrast(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw std::domain_error("disk oracle: contrast n must be positive");
  if (std::abs(n - 1.0) < 1e-12) throw std::domain_error("disk oracle: n = 1 gives identical media (D_m vanishes)");
}

// Change of arg D along the segment a -> b, subdividing while consecutive
// samples differ by more than 0.4 rad.
double arg_change(const std::function<cplx(cplx)>& f, cplx a, cplx b, cplx fa, cplx fb, int depth) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) < 0.4 || depth > 40) {
    if (depth > 40) throw DiskOracleError("disk oracle: contour passes too close to a root");
    return d;
  }
  const cplx mid = 0.5 * (a + b);
  const cplx fm = f(mid);
  if (fm == 0.0) throw DiskOracleError("disk oracle: root on contour");
  return arg_change(f, a, mid, fa, fm, depth + 1) + arg_change(f, mid, b, fm, fb, depth + 1);
}

int winding(const std::function<cplx(cplx)>& f, cplx lo, cplx hi) {
  const cplx c[4] = {lo, {hi.real(), lo.imag()}, hi, {lo.real(), hi.imag()}};
  cplx v[4];
  for (int i = 0; i < 4; ++i) {
    v[i] = f(c[i]);
    if (v[i] == 0.0) throw DiskOracleError("disk oracle: root at cell corner");
  }
  double total = 0.0;
  for (int i = 0; i < 4; ++i) total += arg_change(f, c[i], c[(i + 1) % 4], v[i], v[(i + 1) % 4], 0);
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

bool inside(cplx z, cplx lo, cplx hi, double slack) {
  return z.real() >= lo.real() - slack && z.real() <= hi.real() + slack && z.imag() >= lo.imag() - slack &&
         z.imag() <= hi.imag() + slack;
}

}  // namespace

cplx multiplier_mode_solve(const ModeProblem& p) {
  const double q = p.A.form(p.xi, p.xi);
  const cplx symbol = q + p.lambda * p.Sigma;
  const double scale = std::abs(q) + std::abs(p.lambda * p.Sigma);
  if (std::abs(symbol) <= 1e-14 * scale || symbol == 0.0) {
    throw std::domain_error("multiplier_mode_solve: <A xi, xi> + lambda Sigma vanishes");
  }
  return -p.amplitude / symbol;
}

cplx sqrt_positive_real(cplx z) {
  cplx r = std::sqrt(z);
  if (r.real() < 0.0) r = -r;
  return r;
}

HalfSpaceSolution halfspace_solve(const SymMat2& A1, const SymMat2& A2, double Sigma1, double Sigma2, cplx lambda,
                                  double xi_t, cplx phi_hat) {
  HalfSpaceSolution sol;
  sol.xi_tangential = xi_t;
  sol.phi_hat = phi_hat;
  sol.lambda = lambda;
  const Point2 xi{xi_t, 0.0};
  const Point2 ed{0.0, 1.0};
  const SymMat2* A[2] = {&A1, &A2};
  const double S[2] = {Sigma1, Sigma2};
  for (int j = 0; j < 2; ++j) {
    auto& m = sol.medium[j];
    m.a = A[j]->form(ed, ed);
    m.b = A[j]->form(xi, ed);
    m.c = A[j]->form(xi, xi);
    m.Sigma = S[j];
    if (!(m.a > 0.0)) throw std::domain_error("halfspace_solve: <A e_d, e_d> must be positive");
    m.Delta = -m.b * m.b + m.a * (m.c + lambda * m.Sigma);
    m.sqrt_Delta = sqrt_positive_real(m.Delta);
    m.eta = (-I * m.b - m.sqrt_Delta) / m.a;
  }
  const cplx s1 = sol.medium[0].sqrt_Delta, s2 = sol.medium[1].sqrt_Delta;
  if (std::abs(s2 - s1) <= 1e-12 * std::max({1.0, std::abs(s1), std::abs(s2)})) {
    throw std::domain_error("halfspace_solve: sqrt(Delta_1) == sqrt(Delta_2), degenerate contrast");
  }
  sol.medium[0].alpha = phi_hat * s2 / (s2 - s1);
  sol.medium[1].alpha = sol.medium[0].alpha - phi_hat;
  return sol;
}

HalfSpaceResiduals verify_halfspace(const HalfSpaceSolution& sol, const std::vector<double>& depths) {
  HalfSpaceResiduals r;
  r.decaying = true;
  for (const auto& m : sol.medium) {
    const cplx target = m.c + sol.lambda * m.Sigma;
    const cplx poly = m.a * m.eta * m.eta + 2.0 * I * m.b * m.eta - target;
    // relative to the size of the individual terms
    const double scale = std::abs(m.a * m.eta * m.eta) + std::abs(2.0 * m.b * m.eta) + std::abs(target);
    const double rel = std::abs(poly) / scale;
    if (!(m.eta.real() < 0.0) || !(m.sqrt_Delta.real() > 0.0)) r.decaying = false;
    for (double t : depths) {
      const cplx v = m.alpha * std::exp(m.eta * t);
      r.ode = std::max(r.ode, rel);
      const double bound = std::abs(m.alpha) * std::exp(-std::abs(m.eta.real()) * t);
      if (std::abs(v) > bound * (1.0 + 1e-12)) r.decaying = false;
    }
  }
  const auto& m1 = sol.medium[0];
  const auto& m2 = sol.medium[1];
  r.jump = std::abs((m1.alpha - m2.alpha) - sol.phi_hat);
  // <i A xi + eta A e_d, e_d> = i b + eta a
  const cplx f1 = m1.alpha * (I * m1.b + m1.eta * m1.a);
  const cplx f2 = m2.alpha * (I * m2.b + m2.eta * m2.a);
  r.flux = std::abs(f1 - f2);
  return r;
}

double bessel_J(int m, double x) {
  if (x < 0.0) throw std::domain_error("bessel_J: negative argument");
  return bessel_impl(m, x);
}

double bessel_J_prime(int m, double x) {
  if (x < 0.0) throw std::domain_error("bessel_J_prime: negative argument");
  return bessel_prime_impl(m, x);
}

cplx bessel_J(int m, cplx z) { return bessel_impl(m, z); }
cplx bessel_J_prime(int m, cplx z) { return bessel_prime_impl(m, z); }

double bessel_zero(int m, int index) {
  if (index < 1) throw std::domain_error("bessel_zero: index starts at 1");
  const double h = 1e-3;
  double x0 = (m == 0 ? h : m * 0.5 + h);
  double f0 = bessel_J(m, x0);
  int found = 0;
  for (double x1 = x0 + h;; x1 += h) {
    const double f1 = bessel_J(m, x1);
    if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
      if (++found == index) {
        double lo = x0, hi = x1, flo = f0;
        while (hi - lo > 1e-14 * hi) {
          const double mid = 0.5 * (lo + hi);
          const double fm = bessel_J(m, mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    x0 = x1;
    f0 = f1;
    if (x1 > 1e4) throw DiskOracleError("bessel_zero: not found below 1e4");
  }
}

double disk_determinant(int m, double k, double n) {
  const double s = std::sqrt(n);
  return bessel_J(m, k) * s * bessel_J_prime(m, s * k) - bessel_J_prime(m, k) * bessel_J(m, s * k);
}

cplx disk_determinant(int m, cplx k, double n) { return determinant_and_slope(m, k, n).first; }

std::vector<DiskEigenvalue> disk_real_eigenvalues(double n, const DiskOracleOptions& opts) {
  check_contrast(n);
  std::vector<DiskEigenvalue> out;
  const double h = opts.scan_step;
  for (int m = 0; m <= opts.max_mode; ++m) {
    double k0 = h;
    double f0 = disk_determinant(m, k0, n);
    const int steps = static_cast<int>(std::ceil((opts.k_max - h) / h));
    for (int i = 1; i <= steps; ++i) {
      const double k1 = h + i * h;
      const double f1 = disk_determinant(m, k1, n);
      if ((f0 < 0.0) != (f1 < 0.0) && f0 != 0.0) {
        double lo = k0, hi = k1, flo = f0;
        while (hi - lo > 1e-12) {
          const double mid = 0.5 * (lo + hi);
          const double fm = disk_determinant(m, mid, n);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        const double k = 0.5 * (lo + hi);
        DiskEigenvalue e;
        e.mode = m;
        e.k = k;
        e.lambda = -k * k;
        e.multiplicity = m == 0 ? 1 : 2;
        e.determinant_residual = std::abs(disk_determinant(m, k, n));
        out.push_back(e);
      }
      k0 = k1;
      f0 = f1;
    }
  }
  return out;
}

std::vector<DiskEigenvalue> disk_complex_eigenvalues(double n, const DiskOracleOptions& opts) {
  check_contrast(n);
  std::vector<DiskEigenvalue> out;
  // Cells start slightly off any round numbers so contours avoid roots that
  // sit on simple grid lines.
  const double re0 = 0.3 + 1.234567e-4;
  const double im0 = opts.im_min;
  const int nre = static_cast<int>(std::ceil((opts.k_max - re0) / opts.cell));
  const int nim = static_cast<int>(std::ceil((opts.im_max - im0) / opts.cell));

  for (int m = 0; m <= opts.max_mode; ++m) {
    auto f = [m, n](cplx z) { return determinant_and_slope(m, z, n).first; };
    std::vector<cplx> roots;
    std::function<void(cplx, cplx, int, int)> search = [&](cplx lo, cplx hi, int w, int depth) {
      if (w <= 0) return;
      const cplx centre = 0.5 * (lo + hi);
      const double size = std::abs(hi - lo);
      if (w == 1 || depth >= 6) {
        cplx z = centre;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
          const auto [D, dD] = determinant_and_slope(m, z, n);
          if (dD == 0.0) break;
          const cplx step = D / dD;
          z -= step;
          if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) {
            ok = true;
            break;
          }
          if (!inside(z, lo, hi, size)) break;
        }
        if (ok && inside(z, lo, hi, 1e-9)) {
          for (int r = 0; r < w; ++r) roots.push_back(z);
          return;
        }
        if (depth >= 6) throw DiskOracleError("disk oracle: Newton failed to converge in a cell");
      }
      // split into four and recount
      const cplx quads[4][2] = {{lo, centre},
                                {{centre.real(), lo.imag()}, {hi.real(), centre.imag()}},
                                {{lo.real(), centre.imag()}, {centre.real(), hi.imag()}},
                                {centre, hi}};
      for (const auto& q : quads) search(q[0], q[1], winding(f, q[0], q[1]), depth + 1);
    };
    for (int a = 0; a < nre; ++a) {
      for (int b = 0; b < nim; ++b) {
        const cplx lo{re0 + a * opts.cell, im0 + b * opts.cell};
        const cplx hi = lo + cplx(opts.cell, opts.cell);
        search(lo, hi, winding(f, lo, hi), 0);
      }
    }
    for (const cplx k : roots) {
      for (const cplx kk : {k, std::conj(k)}) {
        DiskEigenvalue e;
        e.mode = m;
        e.k = kk;
        e.lambda = -kk * kk;
        e.multiplicity = m == 0 ? 1 : 2;
        e.determinant_residual = std::abs(f(kk));
        out.push_back(e);
      }
    }
  }
  return out;
}

std::vector<DiskEigenvalue> disk_eigenvalues(double n, const DiskOracleOptions& opts) {
  auto out = disk_real_eigenvalues(n, opts);
  if (opts.complex_roots) {
    auto c = disk_complex_eigenvalues(n, opts);
    out.insert(out.end(), c.begin(), c.end());
  }
  std::stable_sort(out.begin(), out.end(), [](const DiskEigenvalue& a, const DiskEigenvalue& b) {
    const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
    if (ma != mb) return ma < mb;
    if (a.mode != b.mode) return a.mode < b.mode;
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

}  // namespace tevlab
