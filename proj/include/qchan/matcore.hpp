#pragma once

// Dense complex linear algebra kernel shared by every other module.
//
// Index convention for tensor products is left-factor-major: the composite
// index of |i>_A (x) |j>_B is i * dim_B + j.

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "qchan/error.hpp"

namespace qchan {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kValidationTol = 1e-9;
inline constexpr double kReconstructionTol = 1e-10;

// ---------------------------------------------------------------------------
// predicates

bool is_square(const ComplexMatrix& m);
bool is_hermitian(const ComplexMatrix& m, double tol = kValidationTol);
bool is_unitary(const ComplexMatrix& m, double tol = kValidationTol);
/// V^* V = 1 (columns orthonormal).
bool is_isometry(const ComplexMatrix& m, double tol = kValidationTol);
/// Hermitian within tol and smallest eigenvalue >= -tol.
bool is_psd(const ComplexMatrix& m, double tol = kValidationTol);

// ---------------------------------------------------------------------------
// domain types

class DensityMatrix {
 public:
  /// Throws Error(InvalidState) unless m is Hermitian, psd and unit trace within tol.
  explicit DensityMatrix(ComplexMatrix m, double tol = kValidationTol);

  static DensityMatrix maximally_mixed(int dim);
  static DensityMatrix pure(const ComplexVector& psi);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  int dim() const noexcept { return static_cast<int>(mat_.rows()); }

 private:
  ComplexMatrix mat_;
};

class PureState {
 public:
  /// Throws Error(InvalidState) unless ||psi|| = 1 within tol.
  explicit PureState(ComplexVector psi, double tol = kValidationTol);

  /// Rescales a nonzero vector to unit norm.
  static PureState normalized(const ComplexVector& v);

  const ComplexVector& vector() const noexcept { return vec_; }
  int dim() const noexcept { return static_cast<int>(vec_.size()); }
  ComplexMatrix projector() const { return vec_ * vec_.adjoint(); }

 private:
  ComplexVector vec_;
};

/// Deterministic random source. Identical (seed, stream) pairs reproduce
/// identical draws bit for bit within one build.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Independent child stream; the parent is not advanced.
  RngStream derive(std::uint64_t index) const;

  double normal();
  double uniform();
  /// Complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// decompositions

struct EigResult {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns, unitary
};

struct SvdResult {
  ComplexMatrix u;  // rows x k, isometry
  RealVector s;     // k = min(rows, cols), descending
  ComplexMatrix w;  // cols x k, isometry;  M = u diag(s) w^*
};

struct PolarResult {
  ComplexMatrix unitary;
  ComplexMatrix positive;  // M = unitary * positive
};

/// Throws Error(NotHermitian) when the symmetry check fails at tol.
EigResult eig_hermitian(const ComplexMatrix& m, double tol = kValidationTol);
SvdResult svd(const ComplexMatrix& m);
/// Right polar decomposition of a square matrix. For singular input the
/// unitary is completed by pairing orthonormal bases of the two null spaces,
/// each built from the standard basis in index order.
PolarResult polar(const ComplexMatrix& m);

// ---------------------------------------------------------------------------
// tensor calculus

enum class Keep { First, Second };

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);
ComplexMatrix partial_trace(const ComplexMatrix& m, int d1, int d2, Keep keep);
/// Exchange the factors of an operator on C^d1 (x) C^d2.
ComplexMatrix swap_factors(const ComplexMatrix& m, int d1, int d2);

// ---------------------------------------------------------------------------
// norms, fidelity, purification

enum class Schatten { Trace, Operator };

double schatten_norm(const ComplexMatrix& m, Schatten p);
inline double trace_norm(const ComplexMatrix& m) { return schatten_norm(m, Schatten::Trace); }
inline double operator_norm(const ComplexMatrix& m) { return schatten_norm(m, Schatten::Operator); }

/// f(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)), evaluated as the trace
/// norm of sqrt(rho) sqrt(sigma).
double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// sum_k sqrt(p_k) |e_k> (x) |k> with eigenvalues in descending order and each
/// eigenvector phase-normalized.
PureState purify(const DensityMatrix& rho);

/// Haar-distributed unitary: complex Gaussian matrix, QR, phase-fixed diagonal.
ComplexMatrix haar_unitary(int d, RngStream& rng);

// ---------------------------------------------------------------------------
// small helpers

ComplexMatrix identity(int d);
ComplexVector basis_vector(int d, int i);
ComplexMatrix matrix_unit(int rows, int cols, int i, int j);
ComplexMatrix hermitian_part(const ComplexMatrix& m);
/// Square root of a psd matrix; tiny negative eigenvalues are clipped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);
/// Multiply by a phase so that the first entry with modulus above tol is real positive.
ComplexVector phase_normalized(const ComplexVector& v, double tol = 1e-12);
/// Orthonormal basis of the orthogonal complement of span(columns of q),
/// built by Gram-Schmidt over the standard basis in index order.
ComplexMatrix orthogonal_complement(const ComplexMatrix& q, int ambient_dim);

}  // namespace qchan
