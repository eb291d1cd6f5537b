#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace qchan;
using namespace qchan::testing;

namespace {

ComplexMatrix pauli_x() {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<int>(values.size()), static_cast<int>(values.size()));
  int i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

// row-major reshape of a vector on C^d (x) C^d into a d x d matrix
ComplexMatrix reshape(const ComplexVector& v, int d) {
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) m(i, k) = v(i * d + k);
  return m;
}

}  // namespace

TEST_SUITE("matcore") {

TEST_CASE("eigendecomposition of small fixed matrices") {
  const EigResult x = eig_hermitian(pauli_x());
  CHECK(x.values(0) == doctest::Approx(-1.0));
  CHECK(x.values(1) == doctest::Approx(1.0));

  const EigResult id = eig_hermitian(identity(3));
  CHECK((id.values - RealVector::Ones(3)).norm() < 1e-14);
  CHECK((id.vectors - identity(3)).norm() < 1e-14);
}

TEST_CASE("flip spectrum agrees with the projector action") {
  const EigResult e = eig_hermitian(flip(2));
  CHECK(e.values(0) == doctest::Approx(-1.0));
  for (int i = 1; i < 4; ++i) CHECK(e.values(i) == doctest::Approx(1.0));

  // oracle: F P_+ psi = P_+ psi and F P_- psi = -P_- psi on random vectors
  RngStream rng(11);
  const ComplexMatrix f = flip(2);
  for (int t = 0; t < 5; ++t) {
    const ComplexVector psi = random_unit(4, rng);
    const ComplexVector plus = sym_projector(2) * psi;
    const ComplexVector minus = antisym_projector(2) * psi;
    CHECK((f * plus - plus).norm() < 1e-14);
    CHECK((f * minus + minus).norm() < 1e-14);
  }
  // eigenvectors returned for -1 lie in the antisymmetric subspace
  const ComplexVector v = e.vectors.col(0);
  CHECK((antisym_projector(2) * v - v).norm() < 1e-12);
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  RngStream rng(3);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 9;
    const ComplexMatrix m = random_hermitian(d, rng);
    const EigResult e = eig_hermitian(m);
    const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK(operator_norm(m - back) <= 1e-10 * operator_norm(m));
    CHECK(is_unitary(e.vectors, 1e-12));
    for (int i = 1; i < d; ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("eigendecomposition rejects non-Hermitian input") {
  ComplexMatrix m = pauli_x();
  m(0, 1) = 2.0;
  CHECK_THROWS_AS(eig_hermitian(m), Error);
  try {
    eig_hermitian(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHermitian);
  }
}

TEST_CASE("singular values") {
  const SvdResult a = svd(diag({3.0, -4.0}));
  CHECK(a.s(0) == doctest::Approx(4.0));
  CHECK(a.s(1) == doctest::Approx(3.0));

  const SvdResult z = svd(ComplexMatrix::Zero(3, 3));
  CHECK(z.s.norm() == 0.0);

  RngStream rng(5);
  const ComplexVector psi = random_unit(3, rng);
  const ComplexVector phi = random_unit(3, rng);
  const SvdResult r = svd(psi * phi.adjoint());
  CHECK(r.s(0) == doctest::Approx(1.0));
  CHECK(std::abs(r.s(1)) < 1e-14);
  CHECK(std::abs(r.s(2)) < 1e-14);

  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix m = random_matrix(2 + t % 4, 1 + t % 5, rng);
    const SvdResult s = svd(m);
    const ComplexMatrix back = s.u * s.s.cast<Complex>().asDiagonal() * s.w.adjoint();
    CHECK((m - back).norm() <= 1e-10 * m.norm());
    CHECK(is_isometry(s.u, 1e-12));
    CHECK(is_isometry(s.w, 1e-12));
  }
}

TEST_CASE("polar decomposition and completion rule") {
  const PolarResult a = polar(ComplexMatrix(2.0 * identity(2)));
  CHECK((a.unitary - identity(2)).norm() < 1e-14);
  CHECK((a.positive - 2.0 * identity(2)).norm() < 1e-14);

  RngStream rng(8);
  const ComplexMatrix u = haar_unitary(3, rng);
  const PolarResult b = polar(u);
  CHECK((b.unitary - u).norm() < 1e-12);
  CHECK((b.positive - identity(3)).norm() < 1e-12);

  const PolarResult c = polar(diag({1.0, 0.0}));
  CHECK((c.unitary - identity(2)).norm() < 1e-14);
  CHECK((c.positive - diag({1.0, 0.0})).norm() < 1e-14);

  for (int t = 0; t < 20; ++t) {
    // rank-deficient inputs
    const ComplexMatrix m = random_matrix(4, 2, rng) * random_matrix(2, 4, rng);
    const PolarResult p = polar(m);
    CHECK(is_unitary(p.unitary, 1e-10));
    CHECK(is_psd(p.positive, 1e-10));
    CHECK((p.unitary * p.positive - m).norm() <= 1e-10 * (1.0 + m.norm()));
  }
}

TEST_CASE("tensor convention") {
  CHECK((tensor(identity(2), identity(3)) - identity(6)).norm() == 0.0);
  CHECK((tensor(diag({1.0, 2.0}), diag({1.0, 1.0})) - diag({1.0, 1.0, 2.0, 2.0})).norm() == 0.0);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = pauli_x();
  CHECK((tensor(diag({1.0, 0.0}), pauli_x()) - expected).norm() == 0.0);
}

TEST_CASE("partial trace") {
  RngStream rng(21);
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);
  CHECK((partial_trace(tensor(a, b), 2, 3, Keep::First) - b.trace() * a).norm() < 1e-12);
  CHECK((partial_trace(tensor(a, b), 2, 3, Keep::Second) - a.trace() * b).norm() < 1e-12);

  const ComplexVector omega = maximally_entangled(2);
  CHECK((partial_trace(omega * omega.adjoint(), 2, 2, Keep::Second) - 0.5 * identity(2)).norm() < 1e-15);

  const ComplexMatrix g = random_matrix(6, 6, rng);
  const ComplexMatrix rho = g * g.adjoint();
  CHECK(std::abs(partial_trace(rho, 2, 3, Keep::First).trace() - rho.trace()) < 1e-12);
  CHECK(std::abs(partial_trace(rho, 2, 3, Keep::Second).trace() - rho.trace()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(rho, 2, 2, Keep::First), Error);
}

TEST_CASE("Schatten norms") {
  CHECK(trace_norm(diag({1.0, -2.0})) == doctest::Approx(3.0));
  RngStream rng(4);
  CHECK(operator_norm(haar_unitary(4, rng)) == doctest::Approx(1.0).epsilon(1e-12));

  const ComplexVector psi = random_unit(2, rng);
  const ComplexMatrix m = psi * psi.adjoint() - 0.5 * identity(2);
  // oracle: eigenvalues are +-1/2
  const EigResult e = eig_hermitian(m);
  CHECK(e.values.cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK(trace_norm(m) == doctest::Approx(1.0).epsilon(1e-12));

  for (int t = 0; t < 100; ++t) {
    const ComplexMatrix r = random_matrix(1 + t % 5, 1 + (t / 5) % 5, rng);
    CHECK(trace_norm(r) >= operator_norm(r) - 1e-14);
  }
}

TEST_CASE("state fidelity fixed values") {
  RngStream rng(13);
  const DensityMatrix rho = random_state(3, rng);
  CHECK(state_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-7));

  const DensityMatrix zero = DensityMatrix::pure(basis_vector(2, 0));
  const DensityMatrix one = DensityMatrix::pure(basis_vector(2, 1));
  CHECK(state_fidelity(zero, one) == doctest::Approx(0.0));

  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  // oracle: sqrt(<psi|sigma|psi>) for pure rho
  const double oracle = std::sqrt((basis_vector(2, 0).adjoint() * mixed.matrix() * basis_vector(2, 0))(0, 0).real());
  CHECK(state_fidelity(zero, mixed) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(state_fidelity(zero, mixed) == doctest::Approx(0.70711).epsilon(1e-5));
}

TEST_CASE("state fidelity is symmetric and obeys Fuchs-van de Graaf") {
  RngStream rng(17);
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + t % 2;
    const DensityMatrix rho = random_state(d, rng);
    const DensityMatrix sigma = t % 3 == 0 ? DensityMatrix::pure(random_unit(d, rng)) : random_state(d, rng);
    const double f = state_fidelity(rho, sigma);
    CHECK(std::abs(f - state_fidelity(sigma, rho)) < 1e-10);
    const double half_trace = 0.5 * trace_norm(rho.matrix() - sigma.matrix());
    CHECK(1.0 - f <= half_trace + 1e-9);
    CHECK(half_trace <= std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9);
  }
}

TEST_CASE("Uhlmann: fidelity is the best purification overlap") {
  RngStream rng(19);
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 2;
    const DensityMatrix rho = random_state(d, rng);
    const DensityMatrix sigma = random_state(d, rng);
    const ComplexVector pr = purify(rho).vector();
    const ComplexVector ps = purify(sigma).vector();
    // <pr|(1 (x) W)|ps> = tr(O W^T) with O = M_r^* M_s; the polar factor of O gives the optimum
    const ComplexMatrix o = reshape(pr, d).adjoint() * reshape(ps, d);
    const ComplexMatrix w = polar(o).unitary.adjoint().transpose();
    const double overlap = std::abs(pr.dot(tensor(identity(d), w) * ps));
    CHECK(std::abs(overlap - state_fidelity(rho, sigma)) < 1e-8);
    // and no random unitary beats it
    const ComplexMatrix v = haar_unitary(d, rng);
    CHECK(std::abs(pr.dot(tensor(identity(d), v) * ps)) <= overlap + 1e-12);
  }
}

TEST_CASE("purification") {
  const PureState a = purify(DensityMatrix::maximally_mixed(2));
  CHECK((a.vector() - maximally_entangled(2)).norm() < 1e-12);

  const PureState b = purify(DensityMatrix::pure(basis_vector(2, 0)));
  CHECK((b.vector() - tensor(basis_vector(2, 0), basis_vector(2, 0))).norm() < 1e-12);

  const ComplexMatrix rho = diag({0.9, 0.1});
  const PureState c = purify(DensityMatrix(rho));
  CHECK((partial_trace(c.projector(), 2, 2, Keep::First) - rho).norm() < 1e-12);

  RngStream rng(23);
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix r = random_state(2 + t % 3, rng);
    const PureState p = purify(r);
    CHECK((partial_trace(p.projector(), r.dim(), r.dim(), Keep::First) - r.matrix()).norm() < 1e-10);
  }
}

TEST_CASE("Haar unitaries and stream determinism") {
  RngStream r1(42, 7);
  const ComplexMatrix u1 = haar_unitary(1, r1);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-14);

  RngStream a(99, 3);
  RngStream b(99, 3);
  for (int d = 2; d <= 6; ++d) {
    const ComplexMatrix ua = haar_unitary(d, a);
    const ComplexMatrix ub = haar_unitary(d, b);
    CHECK((ua.adjoint() * ua - identity(d)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ua == ub);
  }
  RngStream c(99, 4);
  CHECK(!(haar_unitary(3, c) == haar_unitary(3, b)));

  RngStream parent(5);
  RngStream d1 = parent.derive(2);
  RngStream d2 = parent.derive(2);
  CHECK(d1.normal() == d2.normal());
}

TEST_CASE("Haar unitaries have the uniform first moment") {
  // E|U_00|^2 = 1/d for Haar measure
  RngStream rng(31);
  const int d = 3;
  const int n = 4000;
  double sum = 0.0;
  for (int t = 0; t < n; ++t) sum += std::norm(haar_unitary(d, rng)(0, 0));
  CHECK(std::abs(sum / n - 1.0 / d) < 0.02);
}

TEST_CASE("state validation") {
  CHECK_THROWS_AS(DensityMatrix(diag({0.5, 0.6})), Error);
  CHECK_THROWS_AS(DensityMatrix(diag({1.5, -0.5})), Error);
  ComplexVector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{v}, Error);
  CHECK(PureState::normalized(v).vector().norm() == doctest::Approx(1.0));
}

}  // TEST_SUITE
