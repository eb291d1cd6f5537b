#include <algorithm>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "support.hpp"

using namespace qchan;
using namespace qchan::testing;

namespace {

std::vector<ComplexMatrix> paulis() {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2), y = ComplexMatrix::Zero(2, 2), z = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  y(0, 1) = Complex(0, -1);
  y(1, 0) = Complex(0, 1);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return {identity(2), x, y, z};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::NumericalFailure;
}

double choi_distance(const LinearMap& a, const LinearMap& b) { return operator_norm(a.choi() - b.choi()); }

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("Kraus construction and validation") {
  const Channel id = Channel::from_kraus({identity(2)});
  CHECK(choi_distance(id, identity_channel(2)) < 1e-15);

  std::vector<ComplexMatrix> half;
  for (const auto& p : paulis()) half.push_back(0.5 * p);
  const Channel dep = Channel::from_kraus(half);
  // oracle: basis and superposition inputs all map to 1/2
  RngStream rng(1);
  for (int t = 0; t < 4; ++t) {
    const ComplexVector psi = t < 2 ? basis_vector(2, t) : random_unit(2, rng);
    CHECK((dep.apply(psi * psi.adjoint()) - 0.5 * identity(2)).norm() < 1e-14);
  }

  const Channel ad = amplitude_damping(0.3);
  CHECK(ad.kraus().size() == 2);
  CHECK(code_of([] { Channel::from_kraus({2.0 * identity(2)}); }) == ErrorCode::NotCPTP);
  CHECK(code_of([] { Channel::from_kraus({identity(2), identity(3)}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("Choi to Kraus") {
  const auto k1 = choi_to_kraus(identity_channel(2));
  REQUIRE(k1.size() == 1);
  // I up to a phase
  CHECK(std::abs(std::abs(k1[0](0, 0)) - 1.0) < 1e-12);
  CHECK((k1[0] - k1[0](0, 0) * identity(2)).norm() < 1e-12);

  const Channel dep = completely_depolarizing(2);
  // oracle: rank of the Choi matrix 1 (x) 1/2 by eigendecomposition
  const EigResult e = eig_hermitian(dep.choi());
  int rank = 0;
  for (int i = 0; i < e.values.size(); ++i) rank += e.values(i) > 1e-10;
  CHECK(choi_to_kraus(dep).size() == static_cast<std::size_t>(rank));
  CHECK(rank == 4);

  CHECK(code_of([] { choi_to_kraus(transpose_map(2)); }) == ErrorCode::NotCP);
}

TEST_CASE("Kraus -> Choi -> Kraus round trip on random channels") {
  RngStream rng(2);
  for (int t = 0; t < 100; ++t) {
    const int da = 1 + t % 4, db = 1 + (t / 4) % 4, r = std::max(1 + (t / 16) % 4, (da + db - 1) / db);
    const Channel ch = random_channel(da, db, r, rng);
    const auto kraus = choi_to_kraus(ch);
    CHECK(kraus.size() <= static_cast<std::size_t>(r));
    const Channel back = Channel::from_kraus(kraus);
    CHECK(choi_distance(ch, back) < 1e-9);
  }
}

TEST_CASE("Stinespring dilations") {
  const StinespringDilation id = to_stinespring(identity_channel(2));
  CHECK(id.d_e == 1);
  CHECK((id.v - identity(2)).norm() < 1e-12);

  CHECK(to_stinespring(completely_depolarizing(2)).d_e == static_cast<int>(choi_to_kraus(completely_depolarizing(2)).size()));

  RngStream rng(3);
  const ComplexMatrix u = haar_unitary(3, rng);
  const StinespringDilation du = to_stinespring(unitary_channel(u));
  CHECK(du.d_e == 1);
  // V = U up to a global phase
  const Complex phase = (u.adjoint() * du.v).trace() / 3.0;
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-10);
  CHECK((du.v - phase * u).norm() < 1e-10);

  for (int t = 0; t < 50; ++t) {
    const int da = 1 + t % 3, db = 1 + (t / 3) % 3;
    const Channel ch = random_channel(da, db, std::max(1 + t % 9, (da + db - 1) / db), rng);
    const StinespringDilation d = to_stinespring(ch);
    CHECK(d.d_e <= da * db);
    CHECK(is_isometry(d.v, 1e-10));
    CHECK(choi_distance(d.induced_channel(), ch) < 1e-9);
  }
}

TEST_CASE("padding") {
  const StinespringDilation id = to_stinespring(identity_channel(2));
  const StinespringDilation p = pad_dilation(id, 4);
  CHECK(p.d_e == 4);
  CHECK(is_isometry(p.v, 1e-12));
  CHECK(choi_distance(p.induced_channel(), identity_channel(2)) < 1e-12);
  CHECK(to_stinespring(p.induced_channel()).d_e == id.d_e);
  CHECK(code_of([&] { pad_dilation(p, 2); }) == ErrorCode::ShrinkNotAllowed);
}

TEST_CASE("complementary channels") {
  // noiseless channel: environment receives nothing
  const Channel c = complementary(to_stinespring(identity_channel(3)));
  CHECK(c.d_out() == 1);
  RngStream rng(4);
  const DensityMatrix rho = random_state(3, rng);
  CHECK(std::abs(c.apply(rho.matrix())(0, 0) - 1.0) < 1e-12);

  // completely depolarizing qubit channel: the joint output of B and E is pure
  // and B is maximally mixed, so E's output spectrum is input independent
  const Channel e = complementary(to_stinespring(completely_depolarizing(2)));
  for (int t = 0; t < 6; ++t) {
    const ComplexVector psi = t < 2 ? basis_vector(2, t) : random_unit(2, rng);
    const EigResult s = eig_hermitian(e.apply(psi * psi.adjoint()));
    CHECK(std::abs(s.values(0)) < 1e-10);
    CHECK(std::abs(s.values(1)) < 1e-10);
    CHECK(std::abs(s.values(2) - 0.5) < 1e-10);
    CHECK(std::abs(s.values(3) - 0.5) < 1e-10);
  }

  // unitary channel, d_E = 1: double complement is the channel itself
  const StinespringDilation du = to_stinespring(unitary_channel(haar_unitary(2, rng)));
  const StinespringDilation back = du.swap_roles().swap_roles();
  CHECK((back.v - du.v).norm() == 0.0);
  CHECK(choi_distance(back.induced_channel(), unitary_channel(du.v)) < 1e-10);
}

TEST_CASE("complement of the complement recovers the channel up to an isometry") {
  RngStream rng(5);
  for (int t = 0; t < 30; ++t) {
    const int da = 2 + t % 2, db = 2 + (t / 2) % 2;
    const Channel ch = random_channel(da, db, std::max(1 + t % 4, (da + db - 1) / db), rng);
    const StinespringDilation d = to_stinespring(ch);
    const Channel env = complementary(d);
    const StinespringDilation de = to_stinespring(env);  // dilation of T_E with environment E'
    StinespringDilation swapped = d.swap_roles();         // also a dilation of T_E, environment B
    REQUIRE(de.d_e <= swapped.d_e);
    const ComplexMatrix u = connecting_isometry(de, swapped);
    CHECK(is_isometry(u, 1e-8));
    // (T_E)_E conjugated into B reproduces T
    const Channel twice = complementary(de);
    const ComplexMatrix lift = tensor(identity(da), u);
    CHECK(operator_norm(lift * twice.choi() * lift.adjoint() - ch.choi()) < 1e-8);
  }
}

TEST_CASE("Schroedinger / Heisenberg duality") {
  RngStream rng(6);
  for (int t = 0; t < 20; ++t) {
    const int da = 2 + t % 2, db = 1 + t % 3;
    const Channel ch = random_channel(da, db, 3, rng);
    const ComplexMatrix rho = random_state(da, rng).matrix();
    const ComplexMatrix b = random_hermitian(db, rng);
    const Complex lhs = (ch.apply(rho) * b).trace();
    const Complex rhs = (rho * ch.apply(b, Picture::Heisenberg)).trace();
    CHECK(std::abs(lhs - rhs) < 1e-10);
    CHECK((ch.apply(identity(db), Picture::Heisenberg) - identity(da)).norm() < 1e-10);

    // Hilbert-Schmidt adjoint on a non-Hermitian map
    const LinearMap m(da, db, random_matrix(da * db, da * db, rng));
    const ComplexMatrix x = random_matrix(da, da, rng);
    const ComplexMatrix s = random_matrix(db, db, rng);
    CHECK(std::abs((s.adjoint() * m.apply(x)).trace() - (m.adjoint(s).adjoint() * x).trace()) < 1e-10);
  }
  const ComplexMatrix rho = random_state(2, rng).matrix();
  CHECK((identity_channel(2).apply(rho) - rho).norm() < 1e-15);
  CHECK((completely_depolarizing(2).apply(rho) - 0.5 * identity(2)).norm() < 1e-14);
  CHECK_THROWS_AS(identity_channel(2).apply(identity(3)), Error);
}

TEST_CASE("connecting isometry") {
  RngStream rng(7);
  const Channel ch = random_channel(2, 2, 3, rng);
  const StinespringDilation d = to_stinespring(ch);

  const ComplexMatrix self = connecting_isometry(d, d);
  CHECK(operator_norm(tensor(identity(d.d_b), self) * d.v - d.v) <= 1e-8);

  // plant a rotation on the padded environment and recover it
  const ComplexMatrix w = haar_unitary(5, rng);
  const StinespringDilation rotated = pad_dilation(d, 5).rotate_environment(w);
  const ComplexMatrix u = connecting_isometry(d, rotated);
  CHECK(is_isometry(u, 1e-10));
  CHECK((u - w.leftCols(d.d_e)).norm() < 1e-8);
  CHECK(operator_norm(tensor(identity(d.d_b), u) * d.v - rotated.v) <= 1e-8);

  const StinespringDilation other = to_stinespring(random_channel(2, 2, 3, rng));
  CHECK(code_of([&] { connecting_isometry(d, other); }) == ErrorCode::NotSameChannel);
}

TEST_CASE("transpose family") {
  const Channel a = t_family(2, 1.0 / 3.0);
  CHECK(std::abs(a.map().min_choi_eigenvalue()) < 1e-10);
  CHECK(code_of([] { t_family(2, 0.35); }) == ErrorCode::NotCPTP);
  CHECK(code_of([] { t_family(2, 1.5); }) == ErrorCode::BadParameters);

  for (int nu = 2; nu <= 6; ++nu) {
    const double p = 1.0 / (nu + 1);
    CHECK(std::abs(t_family_map(nu, p).min_choi_eigenvalue()) <= 1e-10);
    CHECK(t_family_map(nu, p - 1e-3).min_choi_eigenvalue() > 0.0);
    CHECK(t_family_map(nu, p + 1e-3).min_choi_eigenvalue() < -1e-5);
    // closed form (1 - p)/nu - p from the antisymmetric eigenvalue
    const double q = 0.2;
    CHECK(std::abs(t_family_map(nu, q).min_choi_eigenvalue() - ((1 - q) / nu - q)) < 1e-12);
  }
}

TEST_CASE("flip and projectors") {
  for (int nu = 2; nu <= 4; ++nu) {
    const ComplexMatrix f = flip(nu);
    CHECK((f * f - identity(nu * nu)).norm() < 1e-15);
    CHECK((f.adjoint() - f).norm() == 0.0);
    CHECK((sym_projector(nu) + antisym_projector(nu) - identity(nu * nu)).norm() < 1e-15);
    CHECK((sym_projector(nu) - antisym_projector(nu) - f).norm() < 1e-15);
    RngStream rng(nu);
    const ComplexVector a = random_unit(nu, rng), b = random_unit(nu, rng);
    CHECK((f * tensor(a, b) - tensor(b, a)).norm() < 1e-14);
  }
}

TEST_CASE("Werner spectrum") {
  const WernerSpectrum a = werner_eigenvalues(1.0 / 6, 1.0 / 6, 2);
  CHECK(a.sym_value == doctest::Approx(1.0 / 3));
  CHECK(a.sym_multiplicity == 3);
  CHECK(a.antisym_value == doctest::Approx(0.0));
  CHECK(a.antisym_multiplicity == 1);
  CHECK(a.positive);

  const WernerSpectrum b = werner_eigenvalues(1.0, 0.0, 3);
  CHECK(b.sym_value == 1.0);
  CHECK(b.antisym_value == 1.0);

  const WernerSpectrum c = werner_eigenvalues(0.0, 1.0, 2);
  CHECK(c.sym_value == 1.0);
  CHECK(c.antisym_value == -1.0);
  CHECK(!c.positive);

  RngStream rng(9);
  for (int nu = 2; nu <= 5; ++nu) {
    const double alpha = rng.normal(), beta = rng.normal();
    const WernerSpectrum w = werner_eigenvalues(alpha, beta, nu);
    const EigResult e = eig_hermitian(alpha * identity(nu * nu) + beta * flip(nu));
    const int lo_mult = std::min(w.sym_value, w.antisym_value) == w.sym_value ? w.sym_multiplicity : w.antisym_multiplicity;
    const double lo = std::min(w.sym_value, w.antisym_value), hi = std::max(w.sym_value, w.antisym_value);
    for (int i = 0; i < nu * nu; ++i) CHECK(std::abs(e.values(i) - (i < lo_mult ? lo : hi)) < 1e-12);
  }
}

TEST_CASE("Jamiolkowski state") {
  const ComplexVector omega = maximally_entangled(2);
  CHECK((jamiolkowski_state(identity_channel(2)) - omega * omega.adjoint()).norm() < 1e-15);
  CHECK((jamiolkowski_state(completely_depolarizing(2)) - 0.25 * identity(4)).norm() < 1e-15);
  for (double p : {0.0, 0.1, 1.0 / 3}) {
    const ComplexMatrix expected = (1 - p) / 4 * identity(4) + p / 2 * flip(2);
    CHECK((jamiolkowski_state(t_family_map(2, p)) - expected).norm() < 1e-14);
  }
  // defining formula on an asymmetric channel
  RngStream rng(10);
  const Channel ch = random_channel(2, 2, 2, rng);
  CHECK((jamiolkowski_state(ch) - stabilized_output(ch, omega)).norm() < 1e-14);
  CHECK_THROWS_AS(jamiolkowski_state(random_channel(2, 3, 1, rng)), Error);
}

TEST_CASE("random unitary mixtures") {
  RngStream rng(12);
  for (int mu = 1; mu <= 5; ++mu) {
    const Channel r = random_unitary_mix(3, mu, rng);
    CHECK(choi_to_kraus(r).size() <= static_cast<std::size_t>(mu));
  }
  // the full Weyl basis randomizes exactly
  const Channel w = random_unitary_mix(weyl_unitaries(4));
  CHECK((w.apply(random_state(4, rng).matrix()) - 0.25 * identity(4)).norm() < 1e-12);
}

TEST_CASE("depolarizing with a general target") {
  RngStream rng(13);
  const DensityMatrix sigma = random_state(3, rng);
  const Channel s = depolarizing(2, sigma);
  CHECK((s.apply(random_state(2, rng).matrix()) - sigma.matrix()).norm() < 1e-13);
  const ComplexMatrix e = random_hermitian(3, rng);
  CHECK((s.apply(e, Picture::Heisenberg) - (sigma.matrix() * e).trace() * identity(2)).norm() < 1e-13);
}

}  // TEST_SUITE
