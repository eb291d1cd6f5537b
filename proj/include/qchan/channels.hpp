#pragma once

// Linear maps between full matrix algebras and the CPTP refinement.
//
// Storage is the unnormalized Choi matrix with factor order input (x) output:
//   J = sum_ij |i><j| (x) Phi_*(|i><j|)
// where Phi_* is the Schroedinger-picture action. The Heisenberg action Phi is
// fixed by the bilinear duality tr(Phi_*(rho) b) = tr(rho Phi(b)).

#include <utility>
#include <vector>

#include "qchan/matcore.hpp"

namespace qchan {

enum class Picture { Schrodinger, Heisenberg };

class LinearMap {
 public:
  LinearMap(int d_in, int d_out, ComplexMatrix choi);

  /// Builds the Choi matrix by evaluating a Schroedinger action on matrix units.
  template <class F>
  static LinearMap from_action(int d_in, int d_out, F&& action) {
    ComplexMatrix j = ComplexMatrix::Zero(d_in * d_out, d_in * d_out);
    for (int r = 0; r < d_in; ++r)
      for (int c = 0; c < d_in; ++c)
        j.block(r * d_out, c * d_out, d_out, d_out) = action(matrix_unit(d_in, d_in, r, c));
    return LinearMap(d_in, d_out, std::move(j));
  }

  int d_in() const noexcept { return d_in_; }
  int d_out() const noexcept { return d_out_; }
  const ComplexMatrix& choi() const noexcept { return choi_; }

  bool is_hermiticity_preserving(double tol = kValidationTol) const;
  /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
  double min_choi_eigenvalue() const;

  ComplexMatrix apply(const ComplexMatrix& x, Picture picture = Picture::Schrodinger) const;
  /// Hilbert-Schmidt adjoint of the Schroedinger action:
  /// tr(s^* Phi_*(x)) = tr(adjoint(s)^* x).
  ComplexMatrix adjoint(const ComplexMatrix& s) const;
  /// (id_ref (x) Phi_*)(x) for x on C^d_ref (x) C^d_in.
  ComplexMatrix apply_stabilized(const ComplexMatrix& x, int d_ref) const;
  /// Hilbert-Schmidt adjoint of apply_stabilized.
  ComplexMatrix adjoint_stabilized(const ComplexMatrix& s, int d_ref) const;

  /// Schroedinger composition: first *this, then next.
  LinearMap then(const LinearMap& next) const;

  LinearMap operator+(const LinearMap& other) const;
  LinearMap operator-(const LinearMap& other) const;
  LinearMap operator*(double scale) const;

 private:
  int d_in_;
  int d_out_;
  ComplexMatrix choi_;
};

/// A LinearMap certified completely positive and trace preserving.
class Channel {
 public:
  /// Validates CPTP; throws Error(NotCPTP) naming the failing invariant.
  static Channel from_kraus(std::vector<ComplexMatrix> kraus, double tol = kValidationTol);
  static Channel from_map(const LinearMap& map, double tol = kValidationTol);

  const LinearMap& map() const noexcept { return map_; }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  int d_in() const noexcept { return map_.d_in(); }
  int d_out() const noexcept { return map_.d_out(); }
  const ComplexMatrix& choi() const noexcept { return map_.choi(); }

  ComplexMatrix apply(const ComplexMatrix& x, Picture picture = Picture::Schrodinger) const;

  /// Schroedinger composition: first *this, then next.
  Channel then(const Channel& next) const;

  operator const LinearMap&() const noexcept { return map_; }  // NOLINT(google-explicit-constructor)

 private:
  Channel(LinearMap map, std::vector<ComplexMatrix> kraus);

  LinearMap map_;
  std::vector<ComplexMatrix> kraus_;
};

/// Isometry V: H_A -> H_B (x) H_E, output factor order B (x) E.
struct StinespringDilation {
  ComplexMatrix v;
  int d_a;
  int d_b;
  int d_e;

  /// Throws Error(DimensionMismatch) on shape errors and Error(NotCPTP) when V is not an isometry.
  void validate(double tol = kValidationTol) const;
  /// The channel rho -> tr_E V rho V^*.
  Channel induced_channel() const;
  /// Same isometry with the roles of B and E exchanged (a dilation of the complementary channel).
  StinespringDilation swap_roles() const;
  /// (1_B (x) u) V for an isometry u: E -> E'.
  StinespringDilation rotate_environment(const ComplexMatrix& u) const;
};

struct Ensemble {
  std::vector<double> weights;
  std::vector<DensityMatrix> states;

  /// Throws Error(InvalidState) on negative weights, weights not summing to 1,
  /// or mixed dimensions.
  Ensemble(std::vector<double> weights, std::vector<DensityMatrix> states, double tol = kValidationTol);
  int dim() const { return states.front().dim(); }
};

// ---------------------------------------------------------------------------
// representation conversions

/// Throws Error(NotCP) when the Choi matrix has an eigenvalue below -tol.
/// The number of operators equals the Choi rank (eigenvalues > 1e-10 * max).
std::vector<ComplexMatrix> choi_to_kraus(const LinearMap& map, double tol = kValidationTol);
/// Minimal dilation from the Choi eigendecomposition; environment basis ordered
/// by descending eigenvalue, ties broken lexicographically on the
/// phase-normalized eigenvectors.
StinespringDilation to_stinespring(const Channel& t);
/// Embeds the environment into the first d_e coordinates of C^new_d_e.
StinespringDilation pad_dilation(const StinespringDilation& d, int new_d_e);
/// rho -> tr_B V rho V^*, a channel H_A -> H_E.
Channel complementary(const StinespringDilation& d);
/// Isometry u: E1 -> E2 with (1_B (x) u) V1 = V2. Requires d1.d_e <= d2.d_e.
/// Throws Error(NotSameChannel) if the dilations induce different channels.
ComplexMatrix connecting_isometry(const StinespringDilation& d1, const StinespringDilation& d2,
                                  double tol = 1e-8);

ComplexMatrix apply(const LinearMap& map, const ComplexMatrix& x, Picture picture);

// ---------------------------------------------------------------------------
// named families

Channel identity_channel(int d);
/// Completely depolarizing channel rho -> tr(rho) sigma; in the Heisenberg
/// picture S(e) = tr(sigma e) 1.
Channel depolarizing(int d_in, const DensityMatrix& sigma);
/// depolarizing(d, 1/d).
Channel completely_depolarizing(int d);
Channel unitary_channel(const ComplexMatrix& u);
Channel amplitude_damping(double gamma);
/// Mixture rho -> (1/mu) sum_i U_i rho U_i^*.
Channel random_unitary_mix(const std::vector<ComplexMatrix>& unitaries);
Channel random_unitary_mix(int nu, int mu, RngStream& rng);
/// Channel with Haar-random Stinespring isometry of environment dimension `rank`.
Channel random_channel(int d_in, int d_out, int rank, RngStream& rng);

/// Matrix transpose on nu x nu matrices. Not completely positive; Choi = flip.
LinearMap transpose_map(int nu);
/// (1 - p) S + p Theta as a plain linear map, for any p.
LinearMap t_family_map(int nu, double p);
/// Same, certified: throws Error(NotCPTP) for p > 1/(nu + 1).
Channel t_family(int nu, double p);

/// Generalized Pauli (clock and shift) basis X^a Z^b, a,b < nu; nu^2 unitaries.
std::vector<ComplexMatrix> weyl_unitaries(int nu);

ComplexMatrix flip(int nu);
ComplexMatrix sym_projector(int nu);
ComplexMatrix antisym_projector(int nu);

struct WernerSpectrum {
  double sym_value;
  int sym_multiplicity;
  double antisym_value;
  int antisym_multiplicity;
  bool positive;
};

/// Spectrum of alpha 1 + beta F on C^nu (x) C^nu.
WernerSpectrum werner_eigenvalues(double alpha, double beta, int nu);

/// (Phi_* (x) id)(|Omega><Omega|) with Omega = nu^{-1/2} sum_i |ii>;
/// equals the factor-swapped Choi matrix divided by nu.
ComplexMatrix jamiolkowski_state(const LinearMap& map);

/// nu^{-1/2} sum_i |ii>.
ComplexVector maximally_entangled(int nu);

}  // namespace qchan
