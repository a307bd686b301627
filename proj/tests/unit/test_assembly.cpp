// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tevlab/assembly.hpp"
#include "tevlab/eigensolve.hpp"
#include "tevlab/oracles.hpp"

using namespace tevlab;

namespace {

const std::array<Point2, 3> kUnitRight = {Point2{0, 0}, Point2{1, 0}, Point2{0, 1}};

std::shared_ptr<const TriMesh> disk(int level) { return std::make_shared<const TriMesh>(mesh_unit_disk(level)); }

MediumPair fixture() {
  MediumPair p;
  p.Sigma2 = 4.0;
  p.Lambda = 4.0;
  return p;
}

}  // namespace

TEST_SUITE("assembly") {
  TEST_CASE("unit right triangle stiffness") {
    const Mat3 S = element_stiffness(kUnitRight, SymMat2::identity());
    Mat3 expect;
    expect << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
    CHECK((S - expect).cwiseAbs().maxCoeff() <= 1e-15);
  }

  TEST_CASE("stiffness row sums vanish and scale linearly in A") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      std::array<Point2, 3> tri = {Point2{u(rng), u(rng)}, Point2{u(rng), u(rng)}, Point2{u(rng), u(rng)}};
      if (cross(tri[1] - tri[0], tri[2] - tri[0]) < 0) std::swap(tri[1], tri[2]);
      if (std::abs(cross(tri[1] - tri[0], tri[2] - tri[0])) < 1e-3) continue;
      const SymMat2 A{1.5 + u(rng), 0.3 * u(rng), 1.5 + u(rng)};
      const Mat3 S = element_stiffness(tri, A);
      CHECK(S.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-13 * S.cwiseAbs().maxCoeff());
      CHECK((element_stiffness(tri, 2.0 * A) - 2.0 * S).cwiseAbs().maxCoeff() <= 1e-14 * S.cwiseAbs().maxCoeff());
      CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("unit right triangle mass") {
    Mat3 expect;
    expect << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    expect /= 24.0;
    CHECK((element_mass(kUnitRight, 1.0) - expect).cwiseAbs().maxCoeff() <= 1e-16);
    CHECK(element_mass(kUnitRight, 0.0).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("degenerate triangles are refused") {
    const std::array<Point2, 3> flat = {Point2{0, 0}, Point2{1, 1}, Point2{2, 2}};
    CHECK_THROWS(element_stiffness(flat, SymMat2::identity()));
    CHECK_THROWS(element_mass(flat, 1.0));
  }

  TEST_CASE("pencil is symmetric with the documented DOF layout") {
    const auto p = assemble_pencil(disk(2), fixture());
    const int V = p.num_vertices();
    const int B = static_cast<int>(p.dofs.shared().size());
    CHECK(p.size() == 2 * V - B);
    CHECK((SparseSym(p.K.transpose()) - p.K).norm() == 0.0);
    CHECK((SparseSym(p.M.transpose()) - p.M).norm() == 0.0);
    for (int v = 0; v < V; ++v) {
      if (p.mesh->on_boundary()[v]) CHECK(p.dofs.dof(1, v) == p.dofs.dof(2, v));
      else CHECK(p.dofs.dof(1, v) != p.dofs.dof(2, v));
    }
    CHECK(p.warnings.empty() == false);  // A1 = A2 fails complementing
  }

  TEST_CASE("identical media give a singular pencil") {
    // u1 = u2 = w with w solving the interior problem for any boundary data
    // spans a lambda-dependent kernel of K - lambda M
    MediumPair same;
    same.Lambda = 2.0;
    const auto p = assemble_pencil(disk(2), same);
    const int V = p.num_vertices();
    const auto& bnd = p.mesh->on_boundary();
    const MatR S = MatR(p.blocks.stiffness1), Mm = MatR(p.blocks.mass1);
    for (double lr : {-7.0, 3.0, 20.0}) {
      const cplx lambda(lr, 0.5 * lr);
      const MatC B = S.cast<cplx>() + lambda * Mm.cast<cplx>();
      std::vector<int> inner, outer;
      for (int v = 0; v < V; ++v) (bnd[v] ? outer : inner).push_back(v);
      MatC Bii(inner.size(), inner.size());
      VecC rhs = VecC::Zero(inner.size());
      VecC w = VecC::Zero(V);
      for (std::size_t b = 0; b < outer.size(); ++b) w[outer[b]] = std::cos(0.3 * b) + 1.0;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        for (std::size_t j = 0; j < inner.size(); ++j) Bii(i, j) = B(inner[i], inner[j]);
        for (int o : outer) rhs[i] -= B(inner[i], o) * w[o];
      }
      const VecC wi = Bii.partialPivLu().solve(rhs);
      for (std::size_t i = 0; i < inner.size(); ++i) w[inner[i]] = wi[i];
      VecC x = VecC::Zero(p.size());
      for (int v = 0; v < V; ++v) {
        x[p.dofs.dof(1, v)] = w[v];
        x[p.dofs.dof(2, v)] = w[v];
      }
      const VecC r = p.K.cast<cplx>() * x - lambda * (p.M.cast<cplx>() * x);
      CHECK(r.norm() <= 1e-10 * (p.K.cast<cplx>() * x).norm());
      CHECK(x.norm() > 0.0);
    }
    CHECK(!p.warnings.empty());
  }

  TEST_CASE("source rhs") {
    const auto p = assemble_pencil(disk(2), fixture());
    const int V = p.num_vertices();
    CHECK(assemble_source_rhs(p, NodalPair::Zero(2 * V)).norm() == 0.0);
    NodalPair f = NodalPair::Zero(2 * V);
    f.head(V).setOnes();
    const VecC F = assemble_source_rhs(p, f);
    const VecR row = p.blocks.mass1 * VecR::Ones(V);
    for (int v = 0; v < V; ++v) {
      if (p.mesh->on_boundary()[v]) continue;
      CHECK(std::abs(F[p.dofs.dof(1, v)] - row[v]) <= 1e-15);
    }
  }

  TEST_CASE("resolvent solves the weak source problem") {
    const auto p = assemble_pencil(disk(3), fixture());
    const cplx lambda(0.0, 30.0);
    const DiscreteResolvent R(p, lambda);
    const int V = p.num_vertices();
    NodalPair f(2 * V);
    for (int v = 0; v < V; ++v) {
      const Point2 q = p.mesh->vertices()[v];
      f[v] = cplx(q.x, 1.0);
      f[V + v] = cplx(q.y * q.y, -0.5);
    }
    const NodalPair u = R.apply(f);
    const SparseC P = p.dofs.prolongation().cast<cplx>();
    // recover DOF vector from the stacked field and test against the pencil
    const VecC x = R.solve(assemble_source_rhs(p, f));
    CHECK((P * x - u).norm() <= 1e-12 * u.norm());
    const VecC r = p.K.cast<cplx>() * x - lambda * (p.M.cast<cplx>() * x) - assemble_source_rhs(p, f);
    CHECK(r.norm() <= 1e-10 * assemble_source_rhs(p, f).norm());
  }

  TEST_CASE("resolvent at an eigenvalue is refused") {
    const auto p = assemble_pencil(disk(1), fixture());
    const Spectrum s = dense_spectrum(p.K, p.M);
    cplx target;
    for (const auto& e : s.entries) {
      if (std::abs(e.lambda) > 1.0) {
        target = e.lambda;
        break;
      }
    }
    CHECK_THROWS_AS(DiscreteResolvent(p, target), SingularShiftError);
  }

  TEST_CASE("Dirichlet medium-1 eigenvalue within 1% of the Bessel zero") {
    const TriMesh m = mesh_unit_disk(4);
    const auto [K, M] = assemble_dirichlet_medium1(m, fixture());
    ArnoldiOptions o;
    o.nev = 2;
    const ShiftResult r = shift_invert_arnoldi(K, M, cplx(-5.0, 0.01), o);
    REQUIRE(!r.pairs.empty());
    const double j01 = bessel_zero(0, 1);
    CHECK(std::abs(r.pairs.front().lambda + j01 * j01) <= 0.01 * j01 * j01);
  }

  TEST_CASE("coordinate dump lists every stored entry") {
    const auto p = assemble_pencil(disk(0), fixture());
    std::ostringstream out;
    write_coordinate(p.K, out);
    std::istringstream in(out.str());
    std::string line;
    long lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == p.K.nonZeros());
  }
}
