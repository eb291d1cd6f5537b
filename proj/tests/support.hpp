#pragma once

// Shared fixtures and independent reference computations for the test suites.

#include <cmath>
#include <numbers>
#include <vector>

#include "qchan/channels.hpp"
#include "qchan/matcore.hpp"

namespace qchan::testing {

inline constexpr double kPi = std::numbers::pi;

inline ComplexMatrix random_matrix(int rows, int cols, RngStream& rng) {
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.complex_normal();
  return m;
}

inline ComplexMatrix random_hermitian(int d, RngStream& rng) { return hermitian_part(random_matrix(d, d, rng)); }

inline ComplexVector random_unit(int d, RngStream& rng) {
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

/// Ginibre-induced mixed state of full rank (almost surely).
inline DensityMatrix random_state(int d, RngStream& rng) {
  const ComplexMatrix g = random_matrix(d, d, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(hermitian_part(rho));
}

inline ComplexMatrix diag_phase(double theta) {
  ComplexMatrix u = ComplexMatrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::polar(1.0, theta);
  return u;
}

/// Qubit pure state from Bloch angles.
inline ComplexVector bloch_vector(double theta, double phi) {
  ComplexVector v(2);
  v(0) = std::cos(theta / 2);
  v(1) = std::polar(std::sin(theta / 2), phi);
  return v;
}

/// Grid search over two-qubit pure inputs sum_k sqrt(lambda_k) |e_k>|k>:
/// Schmidt weight times a Bloch-sphere grid for e_0 (e_1 its orthogonal
/// partner). Covers every input up to a unitary on the reference factor,
/// which stabilized trace norms and fidelities do not see.
template <class F>
double qubit_schmidt_grid_min(F&& objective, int steps) {
  double best = 1e300;
  for (int i = 0; i <= steps; ++i) {
    const double lam = 0.5 * i / steps;
    for (int a = 0; a <= steps; ++a) {
      const double theta = kPi * a / steps;
      for (int b = 0; b < 2 * steps; ++b) {
        const double phi = kPi * b / steps;
        const ComplexVector e0 = bloch_vector(theta, phi);
        ComplexVector e1(2);
        e1(0) = -std::conj(e0(1));
        e1(1) = std::conj(e0(0));
        const ComplexVector psi =
            std::sqrt(1.0 - lam) * tensor(e0, basis_vector(2, 0)) + std::sqrt(lam) * tensor(e1, basis_vector(2, 1));
        best = std::min(best, objective(psi));
      }
    }
  }
  return best;
}

template <class F>
double qubit_schmidt_grid_max(F&& objective, int steps) {
  return -qubit_schmidt_grid_min([&](const ComplexVector& psi) { return -objective(psi); }, steps);
}

/// (Phi_* (x) id) applied to |psi><psi| for psi in C^d_in (x) C^d_in (system first).
inline ComplexMatrix stabilized_output(const LinearMap& map, const ComplexVector& psi) {
  const int d = map.d_in();
  const ComplexMatrix p = psi * psi.adjoint();
  // move the reference to the front, apply, move it back
  const ComplexMatrix ref_first = swap_factors(p, d, d);
  const ComplexMatrix out = map.apply_stabilized(ref_first, d);
  return swap_factors(out, d, map.d_out());
}

}  // namespace qchan::testing
