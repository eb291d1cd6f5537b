#pragma once

// Small dense semidefinite programming engine.
//
// Standard form over block-diagonal complex Hermitian variables:
//
//   primal   minimize   sum_j tr(C_j X_j)
//            subject to sum_j tr(A_ij X_j) = b_i,   X_j >= 0
//   dual     maximize   b^T y
//            subject to Z_j = C_j - sum_i y_i A_ij >= 0
//
// Each complex block is embedded as the real symmetric matrix
// [[Re M, -Im M], [Im M, Re M]], which doubles every eigenvalue's
// multiplicity; the solver works on the embedded problem and maps the
// iterates back (the two diagonal copies are summed when recovering X).

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qchan/matcore.hpp"

namespace qchan::sdp {

struct Constraint {
  /// One coefficient per block; an empty (0x0) matrix means zero.
  std::vector<ComplexMatrix> a;
  double b = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<ComplexMatrix> objective;
  std::vector<Constraint> constraints;

  /// Throws Error(DimensionMismatch) or Error(NotHermitian) on malformed data.
  void validate() const;
};

enum class SdpStatus { Optimal, MaxIter, Infeasible };

std::string_view to_string(SdpStatus s) noexcept;

struct SdpSolution {
  std::vector<ComplexMatrix> x;
  std::vector<ComplexMatrix> z;
  RealVector y;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // |primal - dual|
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  SdpStatus status = SdpStatus::MaxIter;
};

struct SdpOptions {
  double tol = 1e-8;
  int max_iter = 100;
};

/// Primal-dual path following with Nesterov-Todd scaling and a Mehrotra
/// predictor-corrector. Throws Error(DegenerateConstraints) when the A_i are
/// linearly dependent and Error(NumericalFailure) on factorization breakdown.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

/// Linear matrix inequality front end, the form most callers think in:
///
///   maximize c^T y  subject to  F0_j + sum_i y_i F_ij >= 0  for every block j.
///
/// It maps onto the dual side of the standard form (C = F0, A_i = -F_i,
/// b = c); the standard-form primal variables are the Lagrange multipliers
/// of the blocks.
class LmiProblem {
 public:
  int add_variable(double objective_coefficient);
  int add_block(ComplexMatrix constant);
  /// Adds coefficient * y_var to block `block` (accumulates).
  void add_term(int block, int var, const ComplexMatrix& coefficient);

  int num_variables() const noexcept { return static_cast<int>(objective_.size()); }
  int num_blocks() const noexcept { return static_cast<int>(constants_.size()); }

  SdpProblem to_standard() const;

 private:
  std::vector<double> objective_;
  std::vector<ComplexMatrix> constants_;
  std::map<std::pair<int, int>, ComplexMatrix> terms_;  // (block, var)
};

struct LmiSolution {
  RealVector y;
  double value = 0.0;                      // c^T y at the returned point
  std::vector<ComplexMatrix> multipliers;  // one per block
  SdpSolution raw;
};

LmiSolution solve(const LmiProblem& problem, const SdpOptions& options = {});

/// Orthonormal (Hilbert-Schmidt) basis of the n x n Hermitian matrices:
/// diagonal units, then (E_kl + E_lk)/sqrt2 and i(E_kl - E_lk)/sqrt2 for k < l.
std::vector<ComplexMatrix> hermitian_basis(int n);

}  // namespace qchan::sdp
