// SPDX-License-Identifier: Apache-2.0
//
// Sparse/dense linear-algebra vocabulary shared by the assembly, eigensolver
// and analysis modules, plus the complex sparse LU used for every shifted
// solve with (K - sigma M).

#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace tevlab {

using cplx = std::complex<double>;
using SparseSym = Eigen::SparseMatrix<double>;  // symmetric; CSC and CSR coincide
using SparseC = Eigen::SparseMatrix<cplx>;
using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;

/// (K - sigma M) is numerically singular at the requested shift, i.e. sigma
/// is (close to) an eigenvalue of the pencil.
class SingularShiftError : public std::runtime_error {
 public:
  SingularShiftError(cplx shift, double condition_estimate);
  cplx shift() const noexcept { return shift_; }
  double condition_estimate() const noexcept { return cond_; }

 private:
  cplx shift_;
  double cond_;
};

struct LuOptions {
  /// Shifts whose estimated 2-norm condition number exceeds this are refused.
  double max_condition = 1e13;
  int condition_iterations = 4;
};

/// Sparse LU of K - sigma M for a complex shift (COLAMD ordering).
class ComplexLU {
 public:
  ComplexLU(const SparseSym& K, const SparseSym& M, cplx sigma, const LuOptions& opts = {});

  VecC solve(const VecC& b) const;
  /// Solves (K - sigma M)^H x = b.
  VecC solve_adjoint(const VecC& b) const;

  cplx shift() const { return sigma_; }
  Eigen::Index size() const { return n_; }
  Eigen::Index nonzeros_factor() const { return fill_; }
  Eigen::Index nonzeros_matrix() const { return nnz_; }
  double condition_estimate() const { return cond_; }
  const SparseC& matrix() const { return A_; }

 private:
  using Solver = Eigen::SparseLU<SparseC, Eigen::COLAMDOrdering<int>>;
  SparseC A_;
  std::shared_ptr<Solver> lu_;
  cplx sigma_;
  Eigen::Index n_ = 0;
  Eigen::Index nnz_ = 0;
  Eigen::Index fill_ = 0;
  double cond_ = 0.0;
};

}  // namespace tevlab
