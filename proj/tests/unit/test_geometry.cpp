// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tevlab/geometry.hpp"

using namespace tevlab;

namespace {

void check_invariants(const TriMesh& m) {
  for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);
  const long V = static_cast<long>(m.num_vertices());
  const long E = static_cast<long>(m.num_edges());
  const long F = static_cast<long>(m.num_triangles());
  CHECK(V - E + F == 1);
  // boundary loop: each edge ends where the next begins
  const auto& b = m.boundary_edges();
  REQUIRE(!b.empty());
  std::set<int> starts;
  for (const auto& e : b) starts.insert(e.vertices[0]);
  CHECK(starts.size() == b.size());
  int v = b.front().vertices[0];
  std::size_t steps = 0;
  do {
    auto it = std::find_if(b.begin(), b.end(), [&](const BoundaryEdge& e) { return e.vertices[0] == v; });
    REQUIRE(it != b.end());
    v = it->vertices[1];
    ++steps;
  } while (v != b.front().vertices[0] && steps <= b.size());
  CHECK(steps == b.size());
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("disk level 0 is a six-triangle fan") {
    const TriMesh m = mesh_unit_disk(0);
    CHECK(m.num_vertices() == 7);
    CHECK(m.num_triangles() == 6);
    CHECK(m.boundary_edges().size() == 6);
    check_invariants(m);
  }

  TEST_CASE("disk meshes satisfy the mesh invariants") {
    for (int level = 1; level <= 4; ++level) {
      CAPTURE(level);
      check_invariants(mesh_unit_disk(level));
    }
  }

  TEST_CASE("disk boundary vertices lie on the unit circle") {
    const TriMesh m = mesh_unit_disk(3);
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
      if (!m.on_boundary()[i]) continue;
      const Point2 p = m.vertices()[i];
      CHECK(std::abs(p.x * p.x + p.y * p.y - 1.0) <= 1e-14);
    }
  }

  TEST_CASE("disk refinement shrinks h and grows the vertex count about fourfold") {
    for (int level = 0; level < 5; ++level) {
      const TriMesh a = mesh_unit_disk(level), b = mesh_unit_disk(level + 1);
      CHECK(b.characteristic_h() < a.characteristic_h());
      if (level >= 1) CHECK(b.characteristic_h() <= 0.6 * a.characteristic_h());
      if (level >= 2) {
        const double ratio = static_cast<double>(b.num_vertices()) / static_cast<double>(a.num_vertices());
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
      }
    }
  }

  TEST_CASE("disk level cap is enforced") {
    CHECK_THROWS(mesh_unit_disk(4, 3));
    CHECK_THROWS(mesh_unit_disk(-1));
  }

  TEST_CASE("rectangle counts and equal areas") {
    const TriMesh one = mesh_rectangle(1, 1, {0, 0}, {1, 1});
    CHECK(one.num_vertices() == 4);
    CHECK(one.num_triangles() == 2);
    const TriMesh two = mesh_rectangle(2, 2, {0, 0}, {1, 1});
    CHECK(two.num_vertices() == 9);
    CHECK(two.num_triangles() == 8);
    const TriMesh m = mesh_rectangle(5, 3, {-1, 0}, {2, 1.5});
    const double expect = (3.0 / 5.0) * (1.5 / 3.0) / 2.0;
    for (std::size_t t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) == doctest::Approx(expect).epsilon(1e-13));
    check_invariants(m);
  }

  TEST_CASE("degenerate rectangle is refused") {
    CHECK_THROWS_AS(mesh_rectangle(2, 2, {0, 0}, {0, 1}), MeshError);
    CHECK_THROWS(mesh_rectangle(0, 2, {0, 0}, {1, 1}));
  }

  TEST_CASE("save and load round trip") {
    const TriMesh m = mesh_unit_disk(2);
    std::stringstream ss;
    save_mesh(m, ss);
    const TriMesh r = load_mesh(ss);
    REQUIRE(r.num_vertices() == m.num_vertices());
    REQUIRE(r.num_triangles() == m.num_triangles());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) {
      CHECK(r.vertices()[i].x == m.vertices()[i].x);
      CHECK(r.vertices()[i].y == m.vertices()[i].y);
    }
    CHECK(r.triangles() == m.triangles());
    for (std::size_t i = 0; i < m.boundary_edges().size(); ++i) {
      CHECK(r.boundary_edges()[i].vertices == m.boundary_edges()[i].vertices);
      CHECK(r.boundary_edges()[i].triangle == m.boundary_edges()[i].triangle);
    }
  }

  TEST_CASE("clockwise triangle is named in the parse error") {
    std::istringstream in("tmesh 1\n3 1 3\n0 0\n1 0\n0 1\n0 2 1\n0 1 0\n1 2 0\n2 0 0\n");
    try {
      load_mesh(in);
      FAIL("expected a parse error");
    } catch (const MeshError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("triangle 0") != std::string::npos);
      CHECK(msg.find("line 6") != std::string::npos);
    }
  }

  TEST_CASE("truncated file reports a line") {
    std::istringstream in("tmesh 1\n# comment\n3 1 3\n0 0\n1 0\n");
    try {
      load_mesh(in);
      FAIL("expected a parse error");
    } catch (const MeshError& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }

  TEST_CASE("malformed header is rejected") {
    std::istringstream in("mesh 2\n");
    CHECK_THROWS_AS(load_mesh(in), MeshError);
  }

  TEST_CASE("unreferenced vertex is rejected") {
    std::istringstream in("tmesh 1\n4 1 3\n0 0\n1 0\n0 1\n5 5\n0 1 2\n0 1 0\n1 2 0\n2 0 0\n");
    CHECK_THROWS_AS(load_mesh(in), MeshError);
  }

  TEST_CASE("frames on the bottom edge of the unit square") {
    const TriMesh m = mesh_rectangle(1, 1, {0, 0}, {1, 1});
    bool seen = false;
    for (const auto& f : boundary_frames(m)) {
      if (std::abs(f.midpoint.y) > 1e-15) continue;
      seen = true;
      CHECK(f.normal.x == doctest::Approx(0.0));
      CHECK(f.normal.y == doctest::Approx(-1.0));
      CHECK(f.tangent.x == doctest::Approx(1.0));
      CHECK(f.tangent.y == doctest::Approx(0.0));
    }
    CHECK(seen);
  }

  TEST_CASE("frames are orthonormal and outward") {
    for (const TriMesh& m : {mesh_unit_disk(4), mesh_rectangle(3, 4, {0, 0}, {2, 1})}) {
      for (const auto& f : boundary_frames(m)) {
        CHECK(std::abs(norm(f.normal) - 1.0) <= 1e-14);
        CHECK(std::abs(norm(f.tangent) - 1.0) <= 1e-14);
        CHECK(std::abs(dot(f.normal, f.tangent)) <= 1e-14);
        const Point2 c = m.centroid(static_cast<std::size_t>(m.boundary_edges()[f.edge].triangle));
        CHECK(dot(f.normal, f.midpoint - c) > 0.0);
      }
    }
    for (const auto& f : boundary_frames(mesh_unit_disk(4))) CHECK(dot(f.normal, f.midpoint) > 0.9);
  }
}
