#include <cmath>

#include "doctest.h"
#include "qchan/sdp.hpp"
#include "support.hpp"

using namespace qchan;
using namespace qchan::testing;
using namespace qchan::sdp;

namespace {

// Feasible and bounded random problem: b = A(X0) for X0 > 0 and C = Z0 + A^*(y0) for Z0 > 0.
SdpProblem random_problem(int n, int m, RngStream& rng) {
  SdpProblem p;
  p.block_dims = {n, n};
  std::vector<ComplexMatrix> x0, z0;
  for (int j = 0; j < 2; ++j) {
    const ComplexMatrix g = random_matrix(n, n, rng);
    x0.push_back(g * g.adjoint() + identity(n));
    const ComplexMatrix h = random_matrix(n, n, rng);
    z0.push_back(h * h.adjoint() + identity(n));
    p.objective.push_back(z0.back());
  }
  for (int i = 0; i < m; ++i) {
    Constraint c;
    for (int j = 0; j < 2; ++j) c.a.push_back(random_hermitian(n, rng));
    c.b = (c.a[0] * x0[0]).trace().real() + (c.a[1] * x0[1]).trace().real();
    const double y0 = rng.normal();
    for (int j = 0; j < 2; ++j) p.objective[j] += y0 * c.a[j];
    p.constraints.push_back(std::move(c));
  }
  return p;
}

SdpProblem trace_norm_problem(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  SdpProblem p;
  p.block_dims = {n, n};
  p.objective = {identity(n), identity(n)};
  for (const ComplexMatrix& h : hermitian_basis(n)) p.constraints.push_back({{h, -h}, (h * m).trace().real()});
  return p;
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("2x2 lmi forces x >= 1") {
  LmiProblem lmi;
  const int x = lmi.add_variable(-1.0);  // maximize -x
  ComplexMatrix f0 = ComplexMatrix::Zero(2, 2);
  f0(0, 1) = f0(1, 0) = 1.0;
  const int b = lmi.add_block(f0);
  lmi.add_term(b, x, identity(2));
  const LmiSolution s = solve(lmi);
  CHECK(s.raw.status == SdpStatus::Optimal);
  CHECK(s.y(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.raw.gap <= 1e-8 * (1 + std::abs(s.raw.primal_value)));
}

TEST_CASE("diagonal constraints give trace = dim") {
  for (int n = 1; n <= 5; ++n) {
    SdpProblem p;
    p.block_dims = {n};
    p.objective = {identity(n)};
    for (int k = 0; k < n; ++k) p.constraints.push_back({{matrix_unit(n, n, k, k)}, 1.0});
    const SdpSolution s = solve(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(s.primal_value == doctest::Approx(n).epsilon(1e-8));
    CHECK(is_psd(s.x[0], 1e-8));
    for (int k = 0; k < n; ++k) CHECK(std::abs(s.x[0](k, k).real() - 1.0) < 1e-8);
  }
}

TEST_CASE("trace norm as an SDP") {
  RngStream rng(4);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix m = random_hermitian(4, rng);
    const SdpSolution s = solve(trace_norm_problem(m));
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.primal_value - trace_norm(m)) < 1e-7);
    CHECK(std::abs(s.dual_value - trace_norm(m)) < 1e-7);
    // the recovered primal splits M into positive and negative parts
    CHECK((s.x[0] - s.x[1] - m).norm() < 1e-7);
  }
}

TEST_CASE("optimal status certifies gap and residuals") {
  RngStream rng(5);
  for (int t = 0; t < 10; ++t) {
    const SdpProblem p = random_problem(3, 4 + t % 5, rng);
    const SdpOptions opt{1e-9, 100};
    const SdpSolution s = solve(p, opt);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.primal_value - s.dual_value) <= opt.tol * (1 + std::abs(s.primal_value)));
    for (const auto& x : s.x) CHECK(is_psd(x, opt.tol));
    for (const auto& z : s.z) CHECK(is_psd(z, opt.tol));
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      double lhs = 0.0;
      for (int j = 0; j < 2; ++j) lhs += (p.constraints[i].a[j] * s.x[j]).trace().real();
      CHECK(std::abs(lhs - p.constraints[i].b) <= opt.tol * 10);
    }
  }
}

TEST_CASE("weak duality on feasible iterates") {
  RngStream rng(6);
  const SdpProblem p = random_problem(3, 5, rng);
  const double tol = 1e-8;
  for (int k = 1; k <= 40; ++k) {
    const SdpSolution s = solve(p, {tol, k});
    for (const auto& x : s.x) CHECK(is_psd(x, 1e-10));
    if (s.primal_infeasibility <= tol && s.dual_infeasibility <= tol)
      CHECK(s.primal_value >= s.dual_value - 10 * tol);
    if (s.status == SdpStatus::Optimal) break;
  }
}

TEST_CASE("invariance under unitary conjugation") {
  RngStream rng(7);
  for (int t = 0; t < 5; ++t) {
    const SdpProblem p = random_problem(3, 6, rng);
    SdpProblem q = p;
    for (int j = 0; j < 2; ++j) {
      const ComplexMatrix u = haar_unitary(3, rng);
      q.objective[j] = u * p.objective[j] * u.adjoint();
      for (std::size_t i = 0; i < p.constraints.size(); ++i)
        q.constraints[i].a[j] = u * p.constraints[i].a[j] * u.adjoint();
    }
    const SdpOptions opt{1e-9, 100};
    const SdpSolution a = solve(p, opt), b = solve(q, opt);
    CHECK(std::abs(a.primal_value - b.primal_value) <= 10 * opt.tol * (1 + std::abs(a.primal_value)));
  }
}

TEST_CASE("dependent constraints are rejected") {
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {identity(2)};
  p.constraints.push_back({{matrix_unit(2, 2, 0, 0)}, 1.0});
  p.constraints.push_back({{2.0 * matrix_unit(2, 2, 0, 0)}, 2.0});
  try {
    solve(p);
    FAIL("expected DegenerateConstraints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateConstraints);
  }
}

TEST_CASE("primal infeasibility shows as a diverging dual") {
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {ComplexMatrix::Zero(2, 2)};
  p.constraints.push_back({{identity(2)}, -1.0});  // tr X = -1 with X >= 0
  const SdpSolution s = solve(p, {1e-6, 100});
  CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("malformed data") {
  SdpProblem p;
  p.block_dims = {2};
  ComplexMatrix c = ComplexMatrix::Zero(2, 2);
  c(0, 1) = 1.0;
  p.objective = {c};
  CHECK_THROWS_AS(solve(p), Error);
  p.objective = {identity(3)};
  CHECK_THROWS_AS(solve(p), Error);
}

TEST_CASE("Hermitian basis is orthonormal") {
  const auto basis = hermitian_basis(3);
  REQUIRE(basis.size() == 9);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    CHECK(is_hermitian(basis[i], 0.0));
    for (std::size_t k = 0; k < basis.size(); ++k)
      CHECK(std::abs((basis[i] * basis[k]).trace() - (i == k ? 1.0 : 0.0)) < 1e-15);
  }
}

}  // TEST_SUITE
