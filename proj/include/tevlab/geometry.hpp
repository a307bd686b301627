// SPDX-License-Identifier: Apache-2.0
//
// Triangular meshes of a planar, simply connected domain together with the
// oriented boundary data (outward normals, tangents) needed by the
// transmission problem.

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tevlab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);

/// Raised for invalid meshes and malformed mesh files. `line()` is the
/// 1-based source line for parse errors and 0 otherwise.
class MeshError : public std::runtime_error {
 public:
  explicit MeshError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

using Triangle = std::array<int, 3>;

struct BoundaryEdge {
  std::array<int, 2> vertices;  // oriented so the domain lies to the left
  int triangle = -1;            // the unique adjacent triangle
};

/// Conforming triangulation. Triangles are counter-clockwise; boundary edges
/// form a single closed loop.
class TriMesh {
 public:
  TriMesh() = default;
  /// Validates all invariants and throws MeshError on the first violation.
  TriMesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
          std::vector<BoundaryEdge> boundary);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }
  /// Max edge length.
  double characteristic_h() const { return h_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  /// true for vertices lying on the boundary loop
  const std::vector<bool>& on_boundary() const { return on_boundary_; }

  double signed_area(std::size_t t) const;
  Point2 centroid(std::size_t t) const;
  double area() const;

 private:
  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<bool> on_boundary_;
  std::size_t num_edges_ = 0;
  double h_ = 0.0;
};

struct BoundaryFrame {
  Point2 midpoint;
  Point2 normal;   // outward unit normal
  Point2 tangent;  // normal rotated by +90 degrees
  int edge = -1;
};

inline constexpr int kDefaultDiskLevelCap = 9;

/// Unit disk from concentric rings: level L has 2^L rings, ring i carries 6i
/// vertices on the circle of radius i / 2^L.
TriMesh mesh_unit_disk(int refinement_level, int level_cap = kDefaultDiskLevelCap);

/// Structured nx-by-ny grid on the axis-aligned box spanned by two corners,
/// each cell split along its lower-left to upper-right diagonal.
TriMesh mesh_rectangle(int nx, int ny, Point2 corner_a, Point2 corner_b);

/// ASCII `tmesh 1` format.
TriMesh load_mesh(std::istream& source);
void save_mesh(const TriMesh& mesh, std::ostream& sink);
TriMesh load_mesh_file(const std::string& path);

std::vector<BoundaryFrame> boundary_frames(const TriMesh& mesh);

}  // namespace tevlab
