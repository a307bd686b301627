// SPDX-License-Identifier: Apache-2.0
//
// Coefficient fields (A1, Sigma1, A2, Sigma2) and pointwise verification of
// the ellipticity, complementing and jump conditions.

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tevlab/geometry.hpp"

namespace tevlab {

struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  static SymMat2 diag(double d1, double d2) { return {d1, 0.0, d2}; }

  Point2 apply(Point2 v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
  /// <A u, v>
  double form(Point2 u, Point2 v) const { return dot(apply(u), v); }
  double det() const { return a11 * a22 - a12 * a12; }
  double trace() const { return a11 + a22; }
  /// Eigenvalues in increasing order.
  std::pair<double, double> eigenvalues() const;
};

inline SymMat2 operator*(double s, const SymMat2& m) { return {s * m.a11, s * m.a12, s * m.a22}; }
inline SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
  return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
}

/// Piecewise-linear nodal data on a mesh, evaluated by barycentric
/// interpolation in the containing (or nearest) triangle.
template <typename Value>
struct NodalTable {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<Value> values;  // one per mesh vertex
};

/// `coefficients[k]` multiplies |x|^(2k).
template <typename Value>
struct RadialPolynomial {
  std::vector<Value> coefficients;
};

template <typename Value>
class Field {
 public:
  using Constant = Value;
  using Radial = RadialPolynomial<Value>;
  using Table = NodalTable<Value>;

  Field() : repr_(Value{}) {}
  Field(Value constant) : repr_(constant) {}  // NOLINT(google-explicit-constructor)
  explicit Field(Radial radial) : repr_(std::move(radial)) {}
  explicit Field(Table table);

  Value operator()(Point2 x) const;

  /// "constant", "radial" or "table"
  std::string kind() const;
  bool is_constant() const { return std::holds_alternative<Value>(repr_); }

 private:
  std::variant<Value, Radial, Table> repr_;
};

using MatrixField = Field<SymMat2>;
using ScalarField = Field<double>;

extern template class Field<SymMat2>;
extern template class Field<double>;

struct MediumPair {
  MatrixField A1 = SymMat2::identity();
  ScalarField Sigma1 = 1.0;
  MatrixField A2 = SymMat2::identity();
  ScalarField Sigma2 = 1.0;
  double Lambda = 1.0;
};

/// Margins are signed: negative means the condition is violated at
/// `location`, and `pass` is `margin >= 0`.
struct ConditionReport {
  std::string id;
  double margin = 0.0;
  Point2 location;
  std::size_t samples = 0;
  bool pass = false;
  double min_value = 0.0;  // smallest sampled quantity (eigenvalue, sigma or gap)
  double max_value = 0.0;
};

/// Ellipticity of A_j and bounds on Sigma_j over `samples`, against the band
/// [1/Lambda, Lambda]. Returns {matrix report, scalar report}.
std::pair<ConditionReport, ConditionReport> check_ellipticity(const MediumPair& pair,
                                                              const std::vector<Point2>& samples);

/// Q(A) = <A nu, nu><A xi, xi> - <A nu, xi>^2 with xi the unit tangent.
double complementing_form(const SymMat2& A, const BoundaryFrame& frame);

/// |Q(A2) - Q(A1)| at one boundary frame.
double complementing_gap(const SymMat2& A1, const SymMat2& A2, const BoundaryFrame& frame);

ConditionReport check_complementing(const MediumPair& pair, const std::vector<BoundaryFrame>& frames);
ConditionReport check_jump(const MediumPair& pair, const std::vector<BoundaryFrame>& frames);

/// Default sample set for the interior checks: vertices and centroids.
std::vector<Point2> interior_samples(const TriMesh& mesh);

}  // namespace tevlab
