// SPDX-License-Identifier: Apache-2.0

#include "tevlab/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

namespace tevlab {

namespace {

// Swaps diagonal entries k and k+1 of the upper triangular T and updates the
// Schur vectors U.
void swap_schur(MatC& T, MatC& U, Eigen::Index k) {
  const cplx a = T(k, k), b = T(k, k + 1), c = T(k + 1, k + 1);
  cplx g0 = b, g1 = c - a;
  const double nrm = std::hypot(std::abs(g0), std::abs(g1));
  if (nrm == 0.0) return;
  g0 /= nrm;
  g1 /= nrm;
  const cplx h0 = -std::conj(g1), h1 = std::conj(g0);
  const Eigen::Index m = T.rows();
  // columns k, k+1 (rows 0..k+1 only, T is triangular)
  for (Eigen::Index i = 0; i <= k + 1; ++i) {
    const cplx x = T(i, k), y = T(i, k + 1);
    T(i, k) = x * g0 + y * g1;
    T(i, k + 1) = x * h0 + y * h1;
  }
  for (Eigen::Index j = k; j < m; ++j) {
    const cplx x = T(k, j), y = T(k + 1, j);
    T(k, j) = std::conj(g0) * x + std::conj(g1) * y;
    T(k + 1, j) = std::conj(h0) * x + std::conj(h1) * y;
  }
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const cplx x = U(i, k), y = U(i, k + 1);
    U(i, k) = x * g0 + y * g1;
    U(i, k + 1) = x * h0 + y * h1;
  }
  T(k + 1, k) = 0.0;
}

// Stable reordering of the Schur form by descending key.
template <typename Key>
void sort_schur(MatC& T, MatC& U, Key key) {
  const Eigen::Index m = T.rows();
  std::vector<double> keys(m);
  for (Eigen::Index i = 0; i < m; ++i) keys[i] = key(T(i, i));
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index best = i;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (keys[j] > keys[best]) best = j;
    }
    for (Eigen::Index j = best; j > i; --j) {
      swap_schur(T, U, j - 1);
      std::swap(keys[j], keys[j - 1]);
    }
  }
}

VecC random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VecC v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return v;
}

// Classical Gram-Schmidt against the first nb columns of B, repeated once if
// needed. Returns the accumulated coefficients.
VecC project_out(VecC& w, const MatC& B, Eigen::Index nb) {
  if (nb == 0) return VecC::Zero(0);
  const VecC coef = B.leftCols(nb).adjoint() * w;
  w -= B.leftCols(nb) * coef;
  return coef;
}

// Classical Gram-Schmidt against the locked block Q and the Krylov block V,
// always run twice so that w stays orthogonal to both.
void orthogonalize(VecC& w, const MatC& Q, Eigen::Index nq, const MatC& V, Eigen::Index nv, VecC& cq, VecC& cv) {
  cq = project_out(w, Q, nq);
  cv = project_out(w, V, nv);
  cq += project_out(w, Q, nq);
  cv += project_out(w, V, nv);
}

struct RoundResult {
  MatC Z;   // converged Schur vectors
  MatC T;   // their triangular block
  MatC Hq;  // Q^H Op Z
  bool converged = false;
  bool exhausted = false;  // the whole complement of Q was spanned
  int restarts = 0;
  int purged = 0;
  long solves = 0;
  double relation = 0.0;
  double orthogonality = 0.0;
};

class ShiftInvert {
 public:
  ShiftInvert(const SparseSym& K, const SparseSym& M, cplx sigma, const LuOptions& lu_opts)
      : K_(K), M_(M), lu_(K, M, sigma, lu_opts), sigma_(sigma) {}

  VecC apply(const VecC& x) const { return lu_.solve(M_ * x); }
  cplx lambda_of(cplx theta) const { return sigma_ + 1.0 / theta; }
  const ComplexLU& lu() const { return lu_; }
  const SparseSym& K() const { return K_; }
  const SparseSym& M() const { return M_; }
  cplx sigma() const { return sigma_; }

 private:
  const SparseSym& K_;
  const SparseSym& M_;
  ComplexLU lu_;
  cplx sigma_;
};

RoundResult krylov_schur_round(const ShiftInvert& op, const MatC& Q, int nev, int subspace,
                               const ArnoldiOptions& opts, std::mt19937_64& rng) {
  const Eigen::Index n = op.K().rows();
  const Eigen::Index q = Q.cols();
  const Eigen::Index avail = n - q;
  RoundResult res;
  if (avail <= 0) {
    res.converged = true;
    res.exhausted = true;
    return res;
  }
  const Eigen::Index m = std::min<Eigen::Index>(subspace, avail);
  const double null_bound = opts.null_tol * (1.0 + std::abs(op.sigma()));
  auto key = [&](cplx theta) {
    if (theta == 0.0) return 0.0;
    if (std::abs(op.lambda_of(theta)) < null_bound) return -1.0;
    return std::abs(theta);
  };

  MatC V = MatC::Zero(n, m + 1);
  MatC H = MatC::Zero(m + 1, m);
  MatC Hq = MatC::Zero(q, m);

  auto fresh = [&](Eigen::Index col) {
    for (int attempt = 0; attempt < 5; ++attempt) {
      VecC v = random_vector(n, rng);
      VecC cq, cv;
      orthogonalize(v, Q, q, V, col, cq, cv);
      const double nv = v.norm();
      if (nv > 1e-8) {
        V.col(col) = v / nv;
        return;
      }
    }
    throw std::runtime_error("shift_invert_arnoldi: could not generate a start vector");
  };
  fresh(0);

  Eigen::Index p = 0;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    for (Eigen::Index j = p; j < m; ++j) {
      VecC w = op.apply(V.col(j));
      ++res.solves;
      const double wn = w.norm();
      VecC hq, h;
      orthogonalize(w, Q, q, V, j + 1, hq, h);
      if (q > 0) Hq.col(j) = hq;
      H.col(j).head(j + 1) = h;
      const double beta = w.norm();
      if (beta <= 1e-13 * wn) {
        // invariant subspace: continue with an orthogonal random vector
        H(j + 1, j) = 0.0;
        if (j + 1 < avail) {
          fresh(j + 1);
        } else {
          V.col(j + 1).setZero();
        }
      } else {
        H(j + 1, j) = beta;
        V.col(j + 1) = w / beta;
      }
    }

    if (opts.verify_relation) {
      // Op V_m = Q Hq + V_m H_m + v_{m+1} b^T
      double worst = 0.0;
      const double hn = H.norm();
      for (Eigen::Index j = 0; j < m; ++j) {
        VecC r = op.apply(V.col(j)) - V * H.col(j);
        if (q > 0) r -= Q * Hq.col(j);
        worst = std::max(worst, r.norm() / hn);
      }
      res.relation = std::max(res.relation, worst);
      const MatC G = V.leftCols(m + (m < avail ? 1 : 0)).adjoint() * V.leftCols(m + (m < avail ? 1 : 0));
      res.orthogonality =
          std::max(res.orthogonality, (G - MatC::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff());
    }

    Eigen::ComplexSchur<MatC> schur(H.topRows(m));
    MatC T = schur.matrixT();
    MatC U = schur.matrixU();
    sort_schur(T, U, key);
    const Eigen::RowVectorXcd b = H.row(m) * U;

    int wanted = 0;
    int purged = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double k = key(T(i, i));
      if (k > 0.0) ++wanted;
      if (k < 0.0) ++purged;
    }
    res.purged = std::max(res.purged, purged);
    const int target = std::min(nev, wanted);
    int nconv = 0;
    while (nconv < target && std::abs(b[nconv]) <= opts.tol * std::abs(T(nconv, nconv))) ++nconv;

    const bool exhausted = (m == avail);
    if (nconv >= target || exhausted) {
      const int k = exhausted ? wanted : target;
      res.Z = V.leftCols(m) * U.leftCols(k);
      res.T = T.topLeftCorner(k, k);
      res.Hq = q > 0 ? MatC(Hq * U.leftCols(k)) : MatC(0, k);
      res.converged = true;
      res.exhausted = exhausted;
      res.restarts = restart;
      return res;
    }

    // Krylov-Schur restart: keep the leading Schur vectors.
    p = std::min<Eigen::Index>(m - 1, std::max<Eigen::Index>(nconv + 1, nev + (m - nev) / 2));
    MatC Vk = V.leftCols(m) * U.leftCols(p);
    const VecC vnext = V.col(m);
    V.setZero();
    V.leftCols(p) = Vk;
    V.col(p) = vnext;
    MatC Hq_new = MatC::Zero(q, m);
    if (q > 0) Hq_new.leftCols(p) = Hq * U.leftCols(p);
    Hq = Hq_new;
    H.setZero();
    H.topLeftCorner(p, p) = T.topLeftCorner(p, p);
    H.row(p).head(p) = b.head(p);
    res.restarts = restart + 1;
  }
  res.converged = false;
  return res;
}

}  // namespace

ShiftResult shift_invert_arnoldi(const SparseSym& K, const SparseSym& M, cplx sigma, const ArnoldiOptions& opts,
                                 const LuOptions& lu_opts) {
  if (opts.nev < 1) throw std::invalid_argument("shift_invert_arnoldi: nev must be positive");
  ShiftInvert op(K, M, sigma, lu_opts);
  const Eigen::Index n = K.rows();
  const int subspace = opts.subspace > 0 ? opts.subspace : std::max(2 * opts.nev + 10, opts.nev + 30);
  if (subspace <= opts.nev) throw std::invalid_argument("shift_invert_arnoldi: subspace must exceed nev");

  std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                    static_cast<std::uint32_t>(opts.stream), static_cast<std::uint32_t>(opts.stream >> 32)};
  std::mt19937_64 rng(seq);

  ShiftResult out;
  out.shift = sigma;
  out.factor_nonzeros = op.lu().nonzeros_factor();
  out.converged = true;

  MatC Q(n, 0), R(0, 0);
  double first_radius = -1.0;
  for (int round = 0; round < opts.max_rounds; ++round) {
    // later rounds only look for the missing partners of multiple eigenvalues
    const int nev = round == 0 ? opts.nev : std::max(4, opts.nev / 2);
    RoundResult rr = krylov_schur_round(op, Q, nev, subspace, opts, rng);
    out.rounds = round + 1;
    out.restarts += rr.restarts;
    out.solves += rr.solves;
    out.purged = std::max(out.purged, rr.purged);
    out.relation_residual = std::max(out.relation_residual, rr.relation);
    out.orthogonality_error = std::max(out.orthogonality_error, rr.orthogonality);
    if (!rr.converged) out.converged = false;

    const Eigen::Index k = rr.Z.cols();
    double radius = 0.0;
    bool beyond = false;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double d = std::abs(op.lambda_of(rr.T(i, i)) - sigma);
      radius = std::max(radius, d);
      if (first_radius >= 0.0 && d > first_radius) beyond = true;
    }
    if (k > 0) {
      const Eigen::Index q = Q.cols();
      MatC Qn(n, q + k);
      Qn << Q, rr.Z;
      MatC Rn = MatC::Zero(q + k, q + k);
      Rn.topLeftCorner(q, q) = R;
      Rn.topRightCorner(q, k) = rr.Hq;
      Rn.bottomRightCorner(k, k) = rr.T;
      Q = std::move(Qn);
      R = std::move(Rn);
    }
    if (first_radius < 0.0) {
      first_radius = radius;
      // every eigenvalue of the operator was found
      if (rr.exhausted) {
        first_radius = std::numeric_limits<double>::infinity();
        break;
      }
      continue;
    }
    if (beyond || k == 0 || !rr.converged || rr.exhausted) break;
  }
  out.trust_radius = out.converged ? first_radius : 0.0;

  if (Q.cols() == 0) return out;
  Eigen::ComplexEigenSolver<MatC> es(R);
  const MatC X = Q * es.eigenvectors();
  const Eigen::SparseMatrix<cplx> Kc = K.cast<cplx>(), Mc = M.cast<cplx>();
  const double null_bound = opts.null_tol * (1.0 + std::abs(sigma));
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    const cplx theta = es.eigenvalues()[i];
    if (theta == 0.0) continue;
    VecC x = op.apply(X.col(i));
    ++out.solves;
    x.normalize();
    const VecC Kx = Kc * x, Mx = Mc * x;
    const cplx den = x.transpose() * Mx;
    cplx lambda = op.lambda_of(theta);
    if (std::abs(den) > 1e-8 * Mx.norm()) lambda = cplx(x.transpose() * Kx) / den;
    if (std::abs(lambda) < null_bound) continue;
    EigenPair ep;
    ep.lambda = lambda;
    ep.residual = (Kx - lambda * Mx).norm() / Mx.norm();
    if (!(ep.residual <= opts.accept_residual)) {
      // a loose member of the lambda = 0 cluster whose vector is ill-determined
      if (std::abs(op.lambda_of(theta)) < std::sqrt(opts.null_tol) * (1.0 + std::abs(sigma))) {
        ++out.purged;
        continue;
      }
      // spurious Ritz value: nothing closer than it is trusted
      ++out.rejected;
      out.trust_radius = std::min(out.trust_radius, std::abs(lambda - sigma));
      continue;
    }
    ep.shift = sigma;
    ep.vector = std::move(x);
    out.pairs.push_back(std::move(ep));
  }
  std::stable_sort(out.pairs.begin(), out.pairs.end(), [&](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.lambda - sigma) < std::abs(b.lambda - sigma);
  });
  return out;
}

int Spectrum::total_multiplicity() const {
  int s = 0;
  for (const auto& e : entries) s += e.multiplicity;
  return s;
}

std::vector<double> Spectrum::moduli() const {
  std::vector<double> out;
  for (const auto& e : entries) out.insert(out.end(), e.multiplicity, std::abs(e.lambda));
  std::sort(out.begin(), out.end());
  return out;
}

void sort_entries(std::vector<SpectrumEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
    if (ma != mb) return ma < mb;
    return std::arg(a.lambda) < std::arg(b.lambda);
  });
}

namespace {

bool close(cplx a, cplx b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

std::vector<SpectrumEntry> cluster_pairs(const std::vector<EigenPair>& pairs, double rel_tol) {
  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const cplx la = pairs[a].lambda, lb = pairs[b].lambda;
    if (la.real() != lb.real()) return la.real() < lb.real();
    return la.imag() < lb.imag();
  });
  std::vector<bool> used(pairs.size(), false);
  std::vector<SpectrumEntry> out;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const int ia = order[a];
    if (used[ia]) continue;
    used[ia] = true;
    SpectrumEntry e;
    cplx sum = pairs[ia].lambda;
    e.multiplicity = 1;
    e.residual = pairs[ia].residual;
    e.shift = pairs[ia].shift;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const int ib = order[b];
      if (used[ib] || !close(pairs[ia].lambda, pairs[ib].lambda, rel_tol)) continue;
      used[ib] = true;
      sum += pairs[ib].lambda;
      ++e.multiplicity;
      e.residual = std::max(e.residual, pairs[ib].residual);
    }
    e.lambda = sum / static_cast<double>(e.multiplicity);
    out.push_back(e);
  }
  sort_entries(out);
  return out;
}

std::vector<SpectrumEntry> merge_entries(const std::vector<SpectrumEntry>& a, const std::vector<SpectrumEntry>& b,
                                         double rel_tol) {
  std::vector<SpectrumEntry> out = a;
  for (const auto& e : b) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SpectrumEntry& o) { return close(o.lambda, e.lambda, rel_tol); });
    if (it == out.end()) {
      out.push_back(e);
    } else if (e.multiplicity > it->multiplicity ||
               (e.multiplicity == it->multiplicity && e.residual < it->residual)) {
      *it = e;
    }
  }
  sort_entries(out);
  return out;
}

Spectrum spectrum_window(const SparseSym& K, const SparseSym& M, double t_max, const WindowOptions& opts) {
  if (!(t_max > 0.0)) throw std::invalid_argument("spectrum_window: t_max must be positive");
  if (!(opts.ladder_ratio > 1.0)) throw std::invalid_argument("spectrum_window: ladder ratio must exceed 1");
  Spectrum spec;
  spec.t_max = t_max;

  // coverage grid, cell half-diagonal delta / sqrt(2)
  const int g = std::max(opts.grid, 8);
  const double delta = 2.0 * t_max / g;
  const double margin = delta / std::sqrt(2.0);
  std::vector<cplx> points;
  for (int iy = -g / 2 - 1; iy <= g / 2 + 1; ++iy) {
    for (int ix = -g / 2 - 1; ix <= g / 2 + 1; ++ix) {
      const cplx p(ix * delta, iy * delta);
      if (std::abs(p) > t_max + margin) continue;
      const double r = std::abs(p);
      const double slack = r > margin ? std::asin(std::min(1.0, margin / r)) : std::numbers::pi;
      if (std::abs(std::arg(-p)) <= opts.sector_half_angle + slack) points.push_back(p);
    }
  }
  std::vector<bool> covered(points.size(), false);

  std::vector<SpectrumEntry> merged;
  std::uint64_t stream = opts.arnoldi.stream;
  auto run = [&](cplx sigma, int nev) {
    ArnoldiOptions ao = opts.arnoldi;
    ao.nev = nev;
    ao.stream = stream++;
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        ShiftResult r = shift_invert_arnoldi(K, M, sigma, ao, opts.lu);
        if (!r.converged) spec.warnings.push_back("shift did not converge; its eigenvalues are not trusted");
        std::vector<EigenPair> inside;
        for (auto& p : r.pairs) {
          if (std::abs(p.lambda - r.shift) < r.trust_radius) inside.push_back(p);
          p.vector.resize(0);
        }
        merged = merge_entries(merged, cluster_pairs(inside, opts.cluster_tol), opts.cluster_tol);
        for (std::size_t i = 0; i < points.size(); ++i) {
          if (!covered[i] && std::abs(points[i] - r.shift) + margin <= opts.coverage_factor * r.trust_radius) {
            covered[i] = true;
          }
        }
        spec.shifts.push_back(std::move(r));
        return;
      } catch (const SingularShiftError&) {
        sigma *= cplx(1.0, 1e-4 * (attempt + 1));
      }
    }
    throw CoverageError("spectrum_window: every perturbation of a shift is singular");
  };

  std::vector<cplx> initial;
  for (int i = 1;; ++i) {
    const double s = std::pow(opts.ladder_ratio, i);
    initial.emplace_back(-s, opts.imag_offset * s);
    if (s >= t_max) break;
  }
  initial.insert(initial.end(), opts.extra_shifts.begin(), opts.extra_shifts.end());
  for (cplx s : initial) {
    if (spec.shifts.size() >= static_cast<std::size_t>(opts.max_shifts)) break;
    const bool inside = std::any_of(spec.shifts.begin(), spec.shifts.end(), [&](const ShiftResult& r) {
      return std::abs(s - r.shift) <= opts.coverage_factor * r.trust_radius;
    });
    if (!inside) run(s, opts.arnoldi.nev);
  }

  while (true) {
    int next = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (covered[i]) continue;
      if (next < 0 || std::abs(points[i]) < std::abs(points[next])) next = static_cast<int>(i);
    }
    if (next < 0) break;
    const cplx p = points[next];
    const cplx sigma = p + cplx(0.0, opts.imag_offset * std::max(std::abs(p), 1.0));
    // Away from known eigenvalues a few Ritz values already give a trust
    // radius close to the distance to the spectrum.
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& e : merged) gap = std::min(gap, std::abs(e.lambda - p));
    int nev = gap > 0.05 * std::abs(p) + 1.0 ? std::min(opts.sparse_nev, opts.arnoldi.nev) : opts.arnoldi.nev;
    while (!covered[next]) {
      if (spec.shifts.size() >= static_cast<std::size_t>(opts.max_shifts)) {
        throw CoverageError("spectrum_window: shift cap reached with the disc |lambda| <= " + std::to_string(t_max) +
                            " not covered (first gap near " + std::to_string(p.real()) + " + " +
                            std::to_string(p.imag()) + "i)");
      }
      run(sigma, nev);
      nev *= 2;
      if (nev > K.rows()) nev = static_cast<int>(K.rows());
    }
  }

  for (const auto& e : merged) {
    if (std::abs(e.lambda) <= t_max) spec.entries.push_back(e);
  }
  sort_entries(spec.entries);
  return spec;
}

int counting_function(const Spectrum& spectrum, double t) {
  if (t > spectrum.t_max * (1.0 + 1e-12)) {
    throw std::domain_error("counting_function: t = " + std::to_string(t) + " is beyond the computed window t_max = " +
                            std::to_string(spectrum.t_max));
  }
  int n = 0;
  for (const auto& e : spectrum.entries) {
    if (std::abs(e.lambda) <= t) n += e.multiplicity;
  }
  return n;
}

std::vector<cplx> dense_eigenvalues(const MatR& K, const MatR& M) {
  Eigen::GeneralizedEigenSolver<MatR> ges(K, M, false);
  if (ges.info() != Eigen::Success) throw std::runtime_error("dense_eigenvalues: QZ iteration failed");
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    const cplx alpha = ges.alphas()[i];
    const double beta = ges.betas()[i];
    if (std::abs(beta) <= 1e-14 * std::abs(alpha) || beta == 0.0) continue;
    const cplx l = alpha / beta;
    if (std::isfinite(l.real()) && std::isfinite(l.imag())) out.push_back(l);
  }
  return out;
}

Spectrum dense_spectrum(const SparseSym& K, const SparseSym& M, int max_dofs) {
  if (K.rows() > max_dofs) {
    throw std::invalid_argument("dense_spectrum: " + std::to_string(K.rows()) + " DOFs exceeds the dense cap " +
                                std::to_string(max_dofs));
  }
  Spectrum s;
  for (cplx l : dense_eigenvalues(MatR(K), MatR(M))) {
    SpectrumEntry e;
    e.lambda = l;
    s.entries.push_back(e);
  }
  sort_entries(s.entries);
  return s;
}

void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out) {
  out << "re,im,multiplicity,residual,shift_re,shift_im\n";
  out << std::setprecision(17);
  for (const auto& e : spectrum.entries) {
    out << e.lambda.real() << ',' << e.lambda.imag() << ',' << e.multiplicity << ',' << e.residual << ','
        << e.shift.real() << ',' << e.shift.imag() << '\n';
  }
}

}  // namespace tevlab
