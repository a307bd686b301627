// SPDX-License-Identifier: Apache-2.0
//
// Piecewise-linear discretization of the transmission eigenproblem on the
// trace-coupled space {(u1, u2) in P1 x P1 : u1 = u2 on the boundary}.
//
// With a_j(u, v) = int A_j grad u . grad v and m_j(u, v) = int Sigma_j u v the
// pencil is
//
//   K = -a_1 + a_2,   M = m_1 - m_2,
//
// so that K x = lambda M x is the discrete form of
// div(A_j grad u_j) = lambda Sigma_j u_j with matching Cauchy data. The flux
// condition is natural because trial and test traces coincide.

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "tevlab/geometry.hpp"
#include "tevlab/linalg.hpp"
#include "tevlab/media.hpp"

namespace tevlab {

using Mat3 = Eigen::Matrix3d;

/// Exact P1 stiffness for constant A on the triangle. Throws MeshError for a
/// degenerate or clockwise triangle.
Mat3 element_stiffness(const std::array<Point2, 3>& tri, const SymMat2& A);

/// sigma * area / 12 * [[2,1,1],[1,2,1],[1,1,2]].
Mat3 element_mass(const std::array<Point2, 3>& tri, double sigma);

/// Maps each medium's mesh vertices to degrees of freedom. Boundary vertices
/// of both media share one DOF; interior DOFs are disjoint. Ordering: medium-1
/// interior, shared boundary, medium-2 interior.
class DofMap {
 public:
  DofMap() = default;
  explicit DofMap(const TriMesh& mesh);

  int dof(int medium, int vertex) const { return medium == 1 ? dof1_[vertex] : dof2_[vertex]; }
  const std::vector<int>& dofs(int medium) const { return medium == 1 ? dof1_ : dof2_; }
  const std::vector<int>& shared() const { return shared_; }
  int size() const { return size_; }
  int num_vertices() const { return static_cast<int>(dof1_.size()); }

  /// (2V x ndof) 0/1 matrix copying DOFs into stacked nodal fields [u1; u2].
  const SparseSym& prolongation() const { return P_; }

 private:
  std::vector<int> dof1_, dof2_, shared_;
  int size_ = 0;
  SparseSym P_;
};

/// Per-medium nodal matrices on the full vertex set (V x V).
struct NodalBlocks {
  SparseSym stiffness1, stiffness2;  // A_j-weighted
  SparseSym mass1, mass2;            // Sigma_j-weighted
  SparseSym plain_mass;              // unweighted L2 mass
};

struct TransmissionPencil {
  SparseSym K;
  SparseSym M;
  DofMap dofs;
  NodalBlocks blocks;
  std::shared_ptr<const TriMesh> mesh;
  MediumPair media;
  std::vector<std::string> warnings;  // failed boundary conditions, if any

  int size() const { return dofs.size(); }
  int num_vertices() const { return dofs.num_vertices(); }
};

/// Coefficients are frozen at triangle centroids. Proceeds with a warning if
/// the complementing or jump condition fails on the boundary.
TransmissionPencil assemble_pencil(std::shared_ptr<const TriMesh> mesh, const MediumPair& pair);

/// Pencil restricted to medium 1 with homogeneous Dirichlet data: returns
/// {-stiffness, mass} on the interior vertices (eigenvalues approximate minus
/// the Dirichlet eigenvalues of -div(A grad) / Sigma).
std::pair<SparseSym, SparseSym> assemble_dirichlet_medium1(const TriMesh& mesh, const MediumPair& pair);

/// Stacked nodal field [f1; f2] of length 2V.
using NodalPair = VecC;

/// Load vector F with F_v = int Sigma_1 f_1 v_1 - int Sigma_2 f_2 v_2.
VecC assemble_source_rhs(const TransmissionPencil& pencil, const NodalPair& f);

/// Diagonal signed mass application diag(M1, -M2) on stacked nodal fields.
VecC signed_mass_apply(const TransmissionPencil& pencil, const NodalPair& f);
/// diag(M1, M2) (Sigma-weighted, unsigned): the discrete L2 inner product.
VecC weight_apply(const TransmissionPencil& pencil, const NodalPair& f);
/// diag(S1, S2): the gradient quadratic form.
VecC gradient_form_apply(const TransmissionPencil& pencil, const NodalPair& f);

/// Discrete resolvent T_lambda: f -> (u1, u2) solving the source problem
/// div(A_j grad u_j) - lambda Sigma_j u_j = Sigma_j f_j with transmission data.
class DiscreteResolvent {
 public:
  DiscreteResolvent(const TransmissionPencil& pencil, cplx lambda, const LuOptions& opts = {});

  NodalPair apply(const NodalPair& f) const;
  /// DOF-space solve of (K - lambda M) x = F.
  VecC solve(const VecC& F) const { return lu_.solve(F); }

  cplx lambda() const { return lu_.shift(); }
  const ComplexLU& lu() const { return lu_; }
  const TransmissionPencil& pencil() const { return *pencil_; }

 private:
  const TransmissionPencil* pencil_;
  ComplexLU lu_;
};

/// Coordinate (i j value) ASCII dump of a sparse matrix, one entry per line.
void write_coordinate(const SparseSym& A, std::ostream& out);

}  // namespace tevlab
