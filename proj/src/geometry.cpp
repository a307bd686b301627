// SPDX-License-Identifier: Apache-2.0

#include "tevlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

namespace tevlab {

double norm(Point2 a) { return std::hypot(a.x, a.y); }

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey make_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::string tri_name(std::size_t t) { return "triangle " + std::to_string(t); }

}  // namespace

TriMesh::TriMesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
                 std::vector<BoundaryEdge> boundary)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_(std::move(boundary)) {
  const int nv = static_cast<int>(vertices_.size());
  if (nv < 3 || triangles_.empty()) throw MeshError("mesh needs at least one triangle");

  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw MeshError("non-finite vertex coordinate");
  }

  std::vector<bool> referenced(nv, false);
  // edge -> (triangle, local edge start vertex) for each incidence
  std::map<EdgeKey, std::vector<std::pair<int, int>>> incidence;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) throw MeshError(tri_name(t) + " references vertex out of range");
      referenced[v] = true;
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError(tri_name(t) + " has repeated vertices");
    }
    if (!(signed_area(t) > 0.0)) throw MeshError(tri_name(t) + " is inverted or degenerate (clockwise)");
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e];
      const int b = tri[(e + 1) % 3];
      incidence[make_key(a, b)].push_back({static_cast<int>(t), a});
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (!referenced[v]) throw MeshError("vertex " + std::to_string(v) + " is not referenced by any triangle");
  }

  // Derive the boundary from incidence and compare with the declared list.
  std::map<EdgeKey, std::pair<int, int>> open;  // edge -> (triangle, start vertex)
  for (const auto& [key, inc] : incidence) {
    if (inc.size() > 2) throw MeshError("edge shared by more than two triangles (non-manifold)");
    if (inc.size() == 2 && inc[0].second == inc[1].second) {
      throw MeshError("neighbouring triangles " + std::to_string(inc[0].first) + " and " +
                      std::to_string(inc[1].first) + " have inconsistent orientation");
    }
    if (inc.size() == 1) open.emplace(key, inc[0]);
    const double len = norm(vertices_[key.first] - vertices_[key.second]);
    h_ = std::max(h_, len);
  }
  num_edges_ = incidence.size();

  if (boundary_.size() != open.size()) {
    throw MeshError("declared " + std::to_string(boundary_.size()) + " boundary edges but the mesh has " +
                    std::to_string(open.size()));
  }
  std::map<EdgeKey, bool> seen;
  for (auto& be : boundary_) {
    const auto key = make_key(be.vertices[0], be.vertices[1]);
    auto it = open.find(key);
    if (it == open.end()) throw MeshError("declared boundary edge is interior or absent");
    if (seen[key]) throw MeshError("boundary edge declared twice");
    seen[key] = true;
    if (be.triangle != it->second.first) {
      throw MeshError("boundary edge adjacent triangle mismatch (declared " + std::to_string(be.triangle) +
                      ", actual " + std::to_string(it->second.first) + ")");
    }
    // orient along the adjacent triangle so the domain lies to the left
    const int start = it->second.second;
    const int end = start == key.first ? key.second : key.first;
    be.vertices = {start, end};
  }

  // single closed simple loop
  std::map<int, int> next;
  for (const auto& be : boundary_) {
    if (!next.emplace(be.vertices[0], be.vertices[1]).second) {
      throw MeshError("boundary is not a simple loop (vertex with several outgoing edges)");
    }
  }
  int v = boundary_.front().vertices[0];
  std::size_t steps = 0;
  do {
    auto it = next.find(v);
    if (it == next.end()) throw MeshError("boundary loop is open");
    v = it->second;
    ++steps;
  } while (v != boundary_.front().vertices[0] && steps <= boundary_.size());
  if (steps != boundary_.size()) throw MeshError("boundary consists of more than one loop");

  on_boundary_.assign(nv, false);
  for (const auto& be : boundary_) on_boundary_[be.vertices[0]] = true;

  const long euler = static_cast<long>(nv) - static_cast<long>(num_edges_) + static_cast<long>(triangles_.size());
  if (euler != 1) throw MeshError("Euler characteristic V - E + F = " + std::to_string(euler) + ", expected 1");
}

double TriMesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point2 a = vertices_[tri[0]];
  return 0.5 * cross(vertices_[tri[1]] - a, vertices_[tri[2]] - a);
}

Point2 TriMesh::centroid(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Point2 s = vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]];
  return (1.0 / 3.0) * s;
}

double TriMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) a += signed_area(t);
  return a;
}

TriMesh mesh_unit_disk(int refinement_level, int level_cap) {
  if (refinement_level < 0) throw MeshError("refinement level must be nonnegative");
  if (refinement_level > level_cap) {
    throw MeshError("refinement level " + std::to_string(refinement_level) + " exceeds the cap " +
                    std::to_string(level_cap));
  }
  const int rings = 1 << refinement_level;
  std::vector<Point2> verts;
  verts.reserve(1 + 3 * static_cast<std::size_t>(rings) * (rings + 1));
  verts.push_back({0.0, 0.0});

  // ring_start[i] = index of the first vertex of ring i (ring 0 is the centre)
  std::vector<int> ring_start(rings + 2, 0);
  ring_start[1] = 1;
  for (int i = 1; i <= rings; ++i) {
    const int count = 6 * i;
    const double r = static_cast<double>(i) / rings;
    for (int k = 0; k < count; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / count;
      if (i == rings) {
        verts.push_back({std::cos(phi), std::sin(phi)});
      } else {
        verts.push_back({r * std::cos(phi), r * std::sin(phi)});
      }
    }
    ring_start[i + 1] = ring_start[i] + count;
  }

  std::vector<Triangle> tris;
  tris.reserve(6 * static_cast<std::size_t>(rings) * rings);
  std::vector<BoundaryEdge> boundary;

  for (int i = 1; i <= rings; ++i) {
    const int q = 6 * i;
    const int ob = ring_start[i];
    if (i == 1) {
      for (int k = 0; k < q; ++k) {
        if (i == rings) boundary.push_back({{ob + k, ob + (k + 1) % q}, static_cast<int>(tris.size())});
        tris.push_back({0, ob + k, ob + (k + 1) % q});
      }
      continue;
    }
    // Merge the inner ring (p vertices) and outer ring (q vertices) by angle.
    const int p = 6 * (i - 1);
    const int ib = ring_start[i - 1];
    int a = 0;
    int b = 0;
    while (a < p || b < q) {
      const double next_inner = static_cast<double>(a + 1) / p;
      const double next_outer = static_cast<double>(b + 1) / q;
      const bool advance_outer = b < q && (a >= p || next_outer <= next_inner);
      if (advance_outer) {
        if (i == rings) boundary.push_back({{ob + b, ob + (b + 1) % q}, static_cast<int>(tris.size())});
        tris.push_back({ib + a % p, ob + b, ob + (b + 1) % q});
        ++b;
      } else {
        tris.push_back({ib + a, ob + b % q, ib + (a + 1) % p});
        ++a;
      }
    }
  }
  return TriMesh(std::move(verts), std::move(tris), std::move(boundary));
}

TriMesh mesh_rectangle(int nx, int ny, Point2 corner_a, Point2 corner_b) {
  if (nx < 1 || ny < 1) throw MeshError("rectangle needs nx, ny >= 1");
  const double x0 = std::min(corner_a.x, corner_b.x);
  const double x1 = std::max(corner_a.x, corner_b.x);
  const double y0 = std::min(corner_a.y, corner_b.y);
  const double y1 = std::max(corner_a.y, corner_b.y);
  if (!(x1 > x0) || !(y1 > y0)) throw MeshError("degenerate rectangle (zero width or height)");

  std::vector<Point2> verts;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      verts.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny});
    }
  }
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  // cell (i, j) owns triangles 2c (lower) and 2c + 1 (upper), c = j * nx + i
  std::vector<Triangle> tris;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  auto lower = [nx](int i, int j) { return 2 * (j * nx + i); };
  std::vector<BoundaryEdge> boundary;
  for (int i = 0; i < nx; ++i) boundary.push_back({{vid(i, 0), vid(i + 1, 0)}, lower(i, 0)});
  for (int j = 0; j < ny; ++j) boundary.push_back({{vid(nx, j), vid(nx, j + 1)}, lower(nx - 1, j)});
  for (int i = nx - 1; i >= 0; --i) boundary.push_back({{vid(i + 1, ny), vid(i, ny)}, lower(i, ny - 1) + 1});
  for (int j = ny - 1; j >= 0; --j) boundary.push_back({{vid(0, j + 1), vid(0, j)}, lower(0, j) + 1});
  return TriMesh(std::move(verts), std::move(tris), std::move(boundary));
}

namespace {

// Reads whitespace-separated tokens one logical line at a time, skipping
// blank lines and `#` comments while tracking physical line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      return std::istringstream(raw);
    }
    throw MeshError("unexpected end of file at line " + std::to_string(line_ + 1) + " while reading " + what,
                    line_ + 1);
  }

  std::size_t line() const { return line_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError("line " + std::to_string(line_) + ": " + msg, line_);
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

template <typename... T>
bool read_exact(std::istringstream& ss, T&... out) {
  ((ss >> out), ...);
  if (ss.fail()) return false;
  std::string extra;
  return !(ss >> extra);
}

}  // namespace

TriMesh load_mesh(std::istream& source) {
  LineReader reader(source);
  {
    auto ss = reader.next("header");
    std::string magic;
    int version = 0;
    if (!read_exact(ss, magic, version) || magic != "tmesh" || version != 1) {
      reader.fail("malformed header, expected `tmesh 1`");
    }
  }
  long nv = 0, nt = 0, nb = 0;
  {
    auto ss = reader.next("counts");
    if (!read_exact(ss, nv, nt, nb) || nv < 0 || nt < 0 || nb < 0) reader.fail("malformed counts, expected `V T B`");
  }
  std::vector<Point2> verts(nv);
  for (long i = 0; i < nv; ++i) {
    auto ss = reader.next("vertices");
    if (!read_exact(ss, verts[i].x, verts[i].y)) reader.fail("malformed vertex " + std::to_string(i));
  }
  std::vector<Triangle> tris(nt);
  for (long t = 0; t < nt; ++t) {
    auto ss = reader.next("triangles");
    auto& tri = tris[t];
    if (!read_exact(ss, tri[0], tri[1], tri[2])) reader.fail("malformed " + tri_name(t));
    for (int v : tri) {
      if (v < 0 || v >= nv) reader.fail(tri_name(t) + " references vertex out of range");
    }
    const Point2 a = verts[tri[0]];
    if (!(cross(verts[tri[1]] - a, verts[tri[2]] - a) > 0.0)) {
      reader.fail(tri_name(t) + " is clockwise or degenerate");
    }
  }
  std::vector<BoundaryEdge> boundary(nb);
  for (long e = 0; e < nb; ++e) {
    auto ss = reader.next("boundary edges");
    auto& be = boundary[e];
    if (!read_exact(ss, be.vertices[0], be.vertices[1], be.triangle)) {
      reader.fail("malformed boundary edge " + std::to_string(e));
    }
  }
  try {
    return TriMesh(std::move(verts), std::move(tris), std::move(boundary));
  } catch (const MeshError& err) {
    throw MeshError(std::string("invalid mesh: ") + err.what(), reader.line());
  }
}

void save_mesh(const TriMesh& mesh, std::ostream& sink) {
  sink << "tmesh 1\n";
  sink << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << mesh.boundary_edges().size() << '\n';
  sink << std::setprecision(17);
  for (const auto& p : mesh.vertices()) sink << p.x << ' ' << p.y << '\n';
  for (const auto& t : mesh.triangles()) sink << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& b : mesh.boundary_edges()) {
    sink << b.vertices[0] << ' ' << b.vertices[1] << ' ' << b.triangle << '\n';
  }
}

TriMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  return load_mesh(in);
}

std::vector<BoundaryFrame> boundary_frames(const TriMesh& mesh) {
  std::vector<BoundaryFrame> frames;
  frames.reserve(mesh.boundary_edges().size());
  const auto& v = mesh.vertices();
  for (std::size_t e = 0; e < mesh.boundary_edges().size(); ++e) {
    const auto& be = mesh.boundary_edges()[e];
    const Point2 a = v[be.vertices[0]];
    const Point2 b = v[be.vertices[1]];
    const Point2 d = b - a;
    const double len = norm(d);
    // the domain lies to the left of a -> b, so the outward normal is d turned clockwise
    const Point2 nu{d.y / len, -d.x / len};
    frames.push_back({0.5 * (a + b), nu, Point2{-nu.y, nu.x}, static_cast<int>(e)});
  }
  return frames;
}

}  // namespace tevlab
