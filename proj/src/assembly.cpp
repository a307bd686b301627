// SPDX-License-Identifier: Apache-2.0

#include "tevlab/assembly.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace tevlab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double checked_area(const std::array<Point2, 3>& t) {
  const double area = 0.5 * cross(t[1] - t[0], t[2] - t[0]);
  const double scale = std::max({norm(t[1] - t[0]), norm(t[2] - t[1]), norm(t[0] - t[2])});
  if (!(area > 1e-14 * scale * scale)) throw MeshError("degenerate or clockwise triangle in element routine");
  return area;
}

SparseSym from_triplets(int n, const Triplets& trip) {
  SparseSym A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

std::array<Point2, 3> corners(const TriMesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  return {v[tri[0]], v[tri[1]], v[tri[2]]};
}

}  // namespace

Mat3 element_stiffness(const std::array<Point2, 3>& tri, const SymMat2& A) {
  const double area = checked_area(tri);
  // grad(phi_i) = rot90(opposite edge) / (2 area)
  std::array<Point2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point2 a = tri[(i + 1) % 3];
    const Point2 b = tri[(i + 2) % 3];
    g[i] = {(a.y - b.y) / (2.0 * area), (b.x - a.x) / (2.0 * area)};
  }
  Mat3 K;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) K(i, j) = K(j, i) = area * A.form(g[j], g[i]);
  }
  return K;
}

Mat3 element_mass(const std::array<Point2, 3>& tri, double sigma) {
  const double area = checked_area(tri);
  Mat3 m = Mat3::Constant(1.0);
  m.diagonal().setConstant(2.0);
  return (sigma * area / 12.0) * m;
}

DofMap::DofMap(const TriMesh& mesh) {
  const int nv = static_cast<int>(mesh.num_vertices());
  const auto& bnd = mesh.on_boundary();
  dof1_.assign(nv, -1);
  dof2_.assign(nv, -1);
  int next = 0;
  for (int v = 0; v < nv; ++v) {
    if (!bnd[v]) dof1_[v] = next++;
  }
  for (int v = 0; v < nv; ++v) {
    if (bnd[v]) {
      dof1_[v] = dof2_[v] = next++;
      shared_.push_back(dof1_[v]);
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (!bnd[v]) dof2_[v] = next++;
  }
  size_ = next;

  Triplets trip;
  trip.reserve(2 * nv);
  for (int v = 0; v < nv; ++v) {
    trip.emplace_back(v, dof1_[v], 1.0);
    trip.emplace_back(nv + v, dof2_[v], 1.0);
  }
  P_.resize(2 * nv, size_);
  P_.setFromTriplets(trip.begin(), trip.end());
  P_.makeCompressed();
}

TransmissionPencil assemble_pencil(std::shared_ptr<const TriMesh> mesh, const MediumPair& pair) {
  if (!mesh) throw std::invalid_argument("assemble_pencil: null mesh");
  if (!(pair.Lambda >= 1.0)) throw std::invalid_argument("assemble_pencil: Lambda must be >= 1");

  TransmissionPencil p;
  p.mesh = mesh;
  p.media = pair;
  p.dofs = DofMap(*mesh);

  const auto frames = boundary_frames(*mesh);
  const auto comp = check_complementing(pair, frames);
  const auto jump = check_jump(pair, frames);
  if (!comp.pass) p.warnings.push_back("complementing condition fails on the boundary (margin " +
                                       std::to_string(comp.margin) + ")");
  if (!jump.pass) p.warnings.push_back("jump condition fails on the boundary (margin " + std::to_string(jump.margin) + ")");

  const int nv = static_cast<int>(mesh->num_vertices());
  Triplets s1, s2, m1, m2, m0, k, m;
  const std::size_t nt = mesh->num_triangles();
  for (auto* tr : {&s1, &s2, &m1, &m2, &m0}) tr->reserve(9 * nt);
  k.reserve(18 * nt);
  m.reserve(18 * nt);

  for (std::size_t t = 0; t < nt; ++t) {
    const auto c = corners(*mesh, t);
    const Point2 x = mesh->centroid(t);
    const SymMat2 A1 = pair.A1(x), A2 = pair.A2(x);
    const double sig1 = pair.Sigma1(x), sig2 = pair.Sigma2(x);
    if (!std::isfinite(A1.a11 + A1.a12 + A1.a22 + A2.a11 + A2.a12 + A2.a22 + sig1 + sig2)) {
      throw std::invalid_argument("assemble_pencil: non-finite coefficient at triangle " + std::to_string(t));
    }
    const Mat3 ks1 = element_stiffness(c, A1);
    const Mat3 ks2 = element_stiffness(c, A2);
    const Mat3 km1 = element_mass(c, sig1);
    const Mat3 km2 = element_mass(c, sig2);
    const Mat3 km0 = element_mass(c, 1.0);
    const auto& tri = mesh->triangles()[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int vi = tri[i], vj = tri[j];
        s1.emplace_back(vi, vj, ks1(i, j));
        s2.emplace_back(vi, vj, ks2(i, j));
        m1.emplace_back(vi, vj, km1(i, j));
        m2.emplace_back(vi, vj, km2(i, j));
        m0.emplace_back(vi, vj, km0(i, j));
        const int d1i = p.dofs.dof(1, vi), d1j = p.dofs.dof(1, vj);
        const int d2i = p.dofs.dof(2, vi), d2j = p.dofs.dof(2, vj);
        k.emplace_back(d1i, d1j, -ks1(i, j));
        k.emplace_back(d2i, d2j, ks2(i, j));
        m.emplace_back(d1i, d1j, km1(i, j));
        m.emplace_back(d2i, d2j, -km2(i, j));
      }
    }
  }
  p.blocks.stiffness1 = from_triplets(nv, s1);
  p.blocks.stiffness2 = from_triplets(nv, s2);
  p.blocks.mass1 = from_triplets(nv, m1);
  p.blocks.mass2 = from_triplets(nv, m2);
  p.blocks.plain_mass = from_triplets(nv, m0);
  p.K = from_triplets(p.dofs.size(), k);
  p.M = from_triplets(p.dofs.size(), m);
  return p;
}

std::pair<SparseSym, SparseSym> assemble_dirichlet_medium1(const TriMesh& mesh, const MediumPair& pair) {
  const int nv = static_cast<int>(mesh.num_vertices());
  std::vector<int> id(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v) {
    if (!mesh.on_boundary()[v]) id[v] = n++;
  }
  Triplets k, m;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = corners(mesh, t);
    const Point2 x = mesh.centroid(t);
    const Mat3 ks = element_stiffness(c, pair.A1(x));
    const Mat3 km = element_mass(c, pair.Sigma1(x));
    const auto& tri = mesh.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int a = id[tri[i]], b = id[tri[j]];
        if (a < 0 || b < 0) continue;
        k.emplace_back(a, b, -ks(i, j));
        m.emplace_back(a, b, km(i, j));
      }
    }
  }
  return {from_triplets(n, k), from_triplets(n, m)};
}

VecC signed_mass_apply(const TransmissionPencil& pencil, const NodalPair& f) {
  const int nv = pencil.num_vertices();
  if (f.size() != 2 * nv) throw std::invalid_argument("nodal pair has wrong length");
  VecC out(2 * nv);
  out.head(nv) = pencil.blocks.mass1 * f.head(nv);
  out.tail(nv) = -(pencil.blocks.mass2 * f.tail(nv));
  return out;
}

VecC weight_apply(const TransmissionPencil& pencil, const NodalPair& f) {
  const int nv = pencil.num_vertices();
  if (f.size() != 2 * nv) throw std::invalid_argument("nodal pair has wrong length");
  VecC out(2 * nv);
  out.head(nv) = pencil.blocks.mass1 * f.head(nv);
  out.tail(nv) = pencil.blocks.mass2 * f.tail(nv);
  return out;
}

VecC gradient_form_apply(const TransmissionPencil& pencil, const NodalPair& f) {
  const int nv = pencil.num_vertices();
  if (f.size() != 2 * nv) throw std::invalid_argument("nodal pair has wrong length");
  VecC out(2 * nv);
  out.head(nv) = pencil.blocks.stiffness1 * f.head(nv);
  out.tail(nv) = pencil.blocks.stiffness2 * f.tail(nv);
  return out;
}

VecC assemble_source_rhs(const TransmissionPencil& pencil, const NodalPair& f) {
  return pencil.dofs.prolongation().transpose() * signed_mass_apply(pencil, f);
}

DiscreteResolvent::DiscreteResolvent(const TransmissionPencil& pencil, cplx lambda, const LuOptions& opts)
    : pencil_(&pencil), lu_(pencil.K, pencil.M, lambda, opts) {}

NodalPair DiscreteResolvent::apply(const NodalPair& f) const {
  return pencil_->dofs.prolongation() * lu_.solve(assemble_source_rhs(*pencil_, f));
}

void write_coordinate(const SparseSym& A, std::ostream& out) {
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
    for (SparseSym::InnerIterator it(A, j); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

}  // namespace tevlab
