// SPDX-License-Identifier: Apache-2.0

#include "tevlab/media.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tevlab {

std::pair<double, double> SymMat2::eigenvalues() const {
  const double mean = 0.5 * (a11 + a22);
  const double rad = std::hypot(0.5 * (a11 - a22), a12);
  return {mean - rad, mean + rad};
}

namespace {

// Barycentric interpolation; falls back to the triangle whose smallest
// barycentric coordinate is largest when x lies outside the mesh.
template <typename Value>
Value interpolate(const NodalTable<Value>& table, Point2 x) {
  const auto& mesh = *table.mesh;
  const auto& v = mesh.vertices();
  double best_min = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  std::array<double, 3> best_w{};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point2 a = v[tri[0]], b = v[tri[1]], c = v[tri[2]];
    const double area2 = cross(b - a, c - a);
    std::array<double, 3> w{cross(b - x, c - x) / area2, cross(c - x, a - x) / area2, 0.0};
    w[2] = 1.0 - w[0] - w[1];
    const double m = std::min({w[0], w[1], w[2]});
    if (m > best_min) {
      best_min = m;
      best = t;
      best_w = w;
      if (m >= 0.0) break;
    }
  }
  if (best_min < 0.0) {
    for (double& wi : best_w) wi = std::max(wi, 0.0);
    const double s = best_w[0] + best_w[1] + best_w[2];
    for (double& wi : best_w) wi /= s;
  }
  const auto& tri = mesh.triangles()[best];
  return best_w[0] * table.values[tri[0]] + best_w[1] * table.values[tri[1]] + best_w[2] * table.values[tri[2]];
}

}  // namespace

template <typename Value>
Field<Value>::Field(Table table) : repr_(std::move(table)) {
  const auto& t = std::get<Table>(repr_);
  if (!t.mesh) throw std::invalid_argument("table field needs a mesh");
  if (t.values.size() != t.mesh->num_vertices()) {
    throw std::invalid_argument("table field needs one value per mesh vertex");
  }
}

template <typename Value>
Value Field<Value>::operator()(Point2 x) const {
  if (const auto* c = std::get_if<Value>(&repr_)) return *c;
  if (const auto* r = std::get_if<Radial>(&repr_)) {
    const double s = dot(x, x);
    Value acc{};
    double power = 1.0;
    for (const auto& coeff : r->coefficients) {
      acc = acc + power * coeff;
      power *= s;
    }
    return acc;
  }
  return interpolate(std::get<Table>(repr_), x);
}

template <typename Value>
std::string Field<Value>::kind() const {
  switch (repr_.index()) {
    case 0: return "constant";
    case 1: return "radial";
    default: return "table";
  }
}

template class Field<SymMat2>;
template class Field<double>;

namespace {

struct BandTracker {
  double lo, hi;
  ConditionReport report;

  void observe(double value, Point2 x) {
    const double m = std::min(value - lo, hi - value);
    if (report.samples == 0 || m < report.margin) {
      report.margin = m;
      report.location = x;
    }
    if (report.samples == 0) {
      report.min_value = report.max_value = value;
    } else {
      report.min_value = std::min(report.min_value, value);
      report.max_value = std::max(report.max_value, value);
    }
    ++report.samples;
  }
};

}  // namespace

std::pair<ConditionReport, ConditionReport> check_ellipticity(const MediumPair& pair,
                                                              const std::vector<Point2>& samples) {
  if (samples.empty()) throw std::invalid_argument("check_ellipticity needs at least one sample");
  const double lo = 1.0 / pair.Lambda;
  BandTracker mat{lo, pair.Lambda, {}};
  BandTracker sig{lo, pair.Lambda, {}};
  mat.report.id = "ellipticity";
  sig.report.id = "sigma_bounds";
  for (const auto& x : samples) {
    for (const MatrixField* A : {&pair.A1, &pair.A2}) {
      const auto [e0, e1] = (*A)(x).eigenvalues();
      mat.observe(e0, x);
      mat.observe(e1, x);
    }
    sig.observe(pair.Sigma1(x), x);
    sig.observe(pair.Sigma2(x), x);
  }
  // each sample contributed several observations; report distinct points
  mat.report.samples = sig.report.samples = samples.size();
  mat.report.pass = mat.report.margin >= 0.0;
  sig.report.pass = sig.report.margin >= 0.0;
  return {mat.report, sig.report};
}

double complementing_form(const SymMat2& A, const BoundaryFrame& frame) {
  const double nn = A.form(frame.normal, frame.normal);
  const double tt = A.form(frame.tangent, frame.tangent);
  const double nt = A.form(frame.normal, frame.tangent);
  return nn * tt - nt * nt;
}

double complementing_gap(const SymMat2& A1, const SymMat2& A2, const BoundaryFrame& frame) {
  return std::abs(complementing_form(A2, frame) - complementing_form(A1, frame));
}

namespace {

template <typename GapFn>
ConditionReport min_gap_report(const char* id, const MediumPair& pair, const std::vector<BoundaryFrame>& frames,
                               GapFn gap) {
  if (frames.empty()) throw std::invalid_argument(std::string(id) + " check needs at least one frame");
  ConditionReport r;
  r.id = id;
  const double threshold = 1.0 / pair.Lambda;
  for (const auto& f : frames) {
    const double g = gap(f);
    if (r.samples == 0 || g < r.min_value) {
      r.min_value = g;
      r.location = f.midpoint;
    }
    r.max_value = r.samples == 0 ? g : std::max(r.max_value, g);
    ++r.samples;
  }
  r.margin = r.min_value - threshold;
  r.pass = r.margin >= 0.0;
  return r;
}

}  // namespace

ConditionReport check_complementing(const MediumPair& pair, const std::vector<BoundaryFrame>& frames) {
  return min_gap_report("complementing", pair, frames, [&](const BoundaryFrame& f) {
    return complementing_gap(pair.A1(f.midpoint), pair.A2(f.midpoint), f);
  });
}

ConditionReport check_jump(const MediumPair& pair, const std::vector<BoundaryFrame>& frames) {
  return min_gap_report("jump", pair, frames, [&](const BoundaryFrame& f) {
    const Point2 x = f.midpoint;
    const double q2 = pair.A2(x).form(f.normal, f.normal) * pair.Sigma2(x);
    const double q1 = pair.A1(x).form(f.normal, f.normal) * pair.Sigma1(x);
    return std::abs(q2 - q1);
  });
}

std::vector<Point2> interior_samples(const TriMesh& mesh) {
  std::vector<Point2> s = mesh.vertices();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) s.push_back(mesh.centroid(t));
  return s;
}

}  // namespace tevlab
