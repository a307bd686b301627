// SPDX-License-Identifier: Apache-2.0
//
// Eigenvalues of the pencil K x = lambda M x near a complex shift sigma by
// Krylov-Schur iteration on Op = (K - sigma M)^{-1} M, and a windowed driver
// that places shifts until the disc {|lambda| <= t_max} is covered.
//
// Multiple eigenvalues are recovered by deflation rounds: after a converged
// round the Schur vectors are locked and a fresh start vector, orthogonal to
// them, is iterated with the same operator. Rounds stop once a round turns up
// nothing inside the radius of the first round.
//
// Ritz values with |lambda| below null_tol (1 + |sigma|) are purged. With
// A1 = A2 near the boundary the pencil has a large cluster at lambda = 0
// (u1 = u2 = a discrete harmonic function), which would otherwise swamp every
// shift close to the origin.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tevlab/assembly.hpp"
#include "tevlab/linalg.hpp"

namespace tevlab {

struct ArnoldiOptions {
  int nev = 30;       // wanted eigenvalues per round
  int subspace = 0;   // Krylov dimension m; 0 picks max(2 nev + 10, nev + 30)
  double tol = 1e-12;  // |beta e_m^T y| <= tol |theta|
  int max_restarts = 300;
  int max_rounds = 6;
  double null_tol = 1e-6;
  /// Pairs with ||K x - lambda M x|| / ||M x|| above this are dropped and cap
  /// the trust radius.
  double accept_residual = 1e-6;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// Check ||Op V - V H - v b^T|| at every restart (m extra solves each).
  bool verify_relation = false;
};

struct EigenPair {
  cplx lambda;
  double residual = 0.0;  // ||K x - lambda M x|| / ||M x||
  cplx shift;
  VecC vector;
};

struct ShiftResult {
  cplx shift;
  std::vector<EigenPair> pairs;  // sorted by distance to the shift
  double trust_radius = 0.0;     // every eigenvalue with |lambda - shift| < radius was found
  bool converged = false;
  int rounds = 0;
  int restarts = 0;
  long solves = 0;
  int purged = 0;                // Ritz values discarded as part of the lambda = 0 cluster
  int rejected = 0;              // Ritz pairs dropped for a large residual
  double relation_residual = 0.0;     // max relative Arnoldi relation residual (if verified)
  double orthogonality_error = 0.0;   // max |V^H V - I| at restarts
  Eigen::Index factor_nonzeros = 0;
};

/// Shift-invert Krylov-Schur on Op = (K - sigma M)^{-1} M. Throws
/// SingularShiftError if K - sigma M cannot be factored.
ShiftResult shift_invert_arnoldi(const SparseSym& K, const SparseSym& M, cplx sigma, const ArnoldiOptions& opts = {},
                                 const LuOptions& lu_opts = {});

struct SpectrumEntry {
  cplx lambda;
  int multiplicity = 1;
  double residual = 0.0;
  cplx shift;
};

/// Eigenvalues ordered by modulus (then argument), one entry per cluster.
struct Spectrum {
  std::vector<SpectrumEntry> entries;
  double t_max = std::numeric_limits<double>::infinity();  // counting is valid up to here
  std::vector<ShiftResult> shifts;  // eigenvectors dropped
  std::vector<std::string> warnings;

  int total_multiplicity() const;
  /// Moduli |lambda_k|, each repeated per multiplicity, ascending.
  std::vector<double> moduli() const;
};

class CoverageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowOptions {
  ArnoldiOptions arnoldi;
  LuOptions lu;
  double ladder_ratio = 1.5;
  double imag_offset = 1e-3;  // relative imaginary part of ladder shifts
  std::vector<cplx> extra_shifts;
  /// Region to cover: |lambda| <= t_max and |arg(-lambda)| <= sector_half_angle.
  /// Any value >= pi covers the whole disc.
  double sector_half_angle = 0.7853981633974483;
  /// A point is covered if it is within coverage_factor * trust_radius of a shift.
  double coverage_factor = 0.75;
  int grid = 200;  // coverage grid points across the diameter
  int sparse_nev = 10;  // nev for coverage shifts placed away from known eigenvalues
  int max_shifts = 400;
  double cluster_tol = 1e-6;
};

/// All eigenvalues in the coverage region except the purged lambda = 0
/// cluster. Throws CoverageError if the shift cap is hit first.
Spectrum spectrum_window(const SparseSym& K, const SparseSym& M, double t_max, const WindowOptions& opts = {});
inline Spectrum spectrum_window(const TransmissionPencil& p, double t_max, const WindowOptions& opts = {}) {
  return spectrum_window(p.K, p.M, t_max, opts);
}

/// Groups eigenpairs whose eigenvalues agree to rel_tol; the multiplicity is
/// the cluster size.
std::vector<SpectrumEntry> cluster_pairs(const std::vector<EigenPair>& pairs, double rel_tol);

/// Merges cluster lists from different shifts; duplicates within rel_tol keep
/// the larger multiplicity, ties keep the smaller residual.
std::vector<SpectrumEntry> merge_entries(const std::vector<SpectrumEntry>& a, const std::vector<SpectrumEntry>& b,
                                         double rel_tol);

void sort_entries(std::vector<SpectrumEntry>& entries);

/// N(t) = #{k : |lambda_k| <= t} with multiplicity. Throws
/// std::domain_error for t > spectrum.t_max.
int counting_function(const Spectrum& spectrum, double t);

/// Every finite eigenvalue of the dense pencil by real QZ, multiplicity 1 per
/// entry. Refuses pencils larger than max_dofs.
Spectrum dense_spectrum(const SparseSym& K, const SparseSym& M, int max_dofs = 2000);
std::vector<cplx> dense_eigenvalues(const MatR& K, const MatR& M);

/// CSV: re,im,multiplicity,residual,shift_re,shift_im
void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out);

}  // namespace tevlab
