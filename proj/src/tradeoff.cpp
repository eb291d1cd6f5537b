#include "qchan/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qchan {

namespace {

// Orthonormal traceless Hermitian basis of dimension n^2 - 1.
std::vector<ComplexMatrix> traceless_basis(int n) {
  std::vector<ComplexMatrix> out;
  for (const ComplexMatrix& h : sdp::hermitian_basis(n))
    if (std::abs(h.trace()) == 0.0) out.push_back(h);
  for (int k = 1; k < n; ++k) {
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < k; ++j) d(j, j) = 1.0;
    d(k, k) = -static_cast<double>(k);
    out.push_back(d / std::sqrt(k * (k + 1.0)));
  }
  return out;
}

struct AffineMinimum {
  double value = 0.0;
  std::vector<double> x;
  SdpCertificate certificate;
};

// min over x of ||Delta(x)||_cb, Choi(Delta(x)) = j0 + sum_k x_k j[k], subject to
// g0 + sum_k x_k g[k] >= 0. Every Delta(x) must preserve Hermiticity.
AffineMinimum minimize_diamond(int d_in, int d_out, const ComplexMatrix& j0, const std::vector<ComplexMatrix>& j,
                               const ComplexMatrix& g0, const std::vector<ComplexMatrix>& g, double tol) {
  const int n = d_in * d_out;
  sdp::LmiProblem lmi;
  const int t = lmi.add_variable(-1.0);
  const int upper = lmi.add_block(-hermitian_part(j0));
  const int lower = lmi.add_block(hermitian_part(j0));
  const int reduced = lmi.add_block(ComplexMatrix::Zero(d_in, d_in));
  const int cone = lmi.add_block(g0);
  lmi.add_term(reduced, t, identity(d_in));
  std::vector<int> xs;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const int x = lmi.add_variable(0.0);
    lmi.add_term(upper, x, -hermitian_part(j[k]));
    lmi.add_term(lower, x, hermitian_part(j[k]));
    lmi.add_term(cone, x, g[k]);
    xs.push_back(x);
  }
  for (const ComplexMatrix& h : sdp::hermitian_basis(n)) {
    const int y = lmi.add_variable(0.0);
    lmi.add_term(upper, y, h);
    lmi.add_term(lower, y, h);
    const ComplexMatrix r = partial_trace(h, d_in, d_out, Keep::First);
    if (r.norm() > 0.0) lmi.add_term(reduced, y, -r);
  }
  const sdp::LmiSolution s = sdp::solve(lmi, {tol, 100});
  AffineMinimum out;
  out.value = std::max(0.0, -0.5 * (s.raw.primal_value + s.raw.dual_value));
  out.certificate = {s.raw.primal_value, s.raw.dual_value, s.raw.gap, s.raw.iterations, s.raw.status};
  for (int x : xs) out.x.push_back(s.y(x));
  return out;
}

ComplexMatrix affine_value(const ComplexMatrix& g0, const std::vector<ComplexMatrix>& g, const std::vector<double>& x) {
  ComplexMatrix m = g0;
  for (std::size_t k = 0; k < g.size(); ++k) m += x[k] * g[k];
  return hermitian_part(m);
}

double cb(const LinearMap& m, double tol) { return diamond_norm(m, DiamondMethod::Sdp, {}, tol).value; }

// Matrix P with psi_sigma = sum_{k,e} P(k, e) |k>_E' |e>_E a purification of sigma.
ComplexMatrix purification_matrix(const ComplexMatrix& sigma) {
  const int d = static_cast<int>(sigma.rows());
  const ComplexVector p = purify(DensityMatrix(hermitian_part(sigma), 1e-6)).vector();
  ComplexMatrix out(d, d);
  for (int e = 0; e < d; ++e)
    for (int k = 0; k < d; ++k) out(k, e) = p(e * d + k);
  return out;
}

// phi -> phi (x) psi as a dilation with output A and environment E' (x) E,
// rows a * (d_e' d_e) + e' d_e + e.
StinespringDilation embedding_dilation(int d_a, const ComplexMatrix& p) {
  const int ep = static_cast<int>(p.rows()), e = static_cast<int>(p.cols());
  ComplexMatrix v = ComplexMatrix::Zero(d_a * ep * e, d_a);
  for (int a = 0; a < d_a; ++a)
    for (int k = 0; k < ep; ++k)
      for (int l = 0; l < e; ++l) v(a * ep * e + k * e + l, a) = p(k, l);
  return {v, d_a, d_a, ep * e};
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

Channel replacement_channel(int d_in, const DensityMatrix& sigma) {
  return Channel::from_map(LinearMap(d_in, sigma.dim(), tensor(identity(d_in), sigma.matrix())));
}

DepolarizingFit best_depolarizing(const LinearMap& map, double sdp_tol) {
  const int da = map.d_in(), de = map.d_out();
  const std::vector<ComplexMatrix> g = traceless_basis(de);
  const ComplexMatrix g0 = identity(de) / static_cast<double>(de);
  std::vector<ComplexMatrix> j;
  for (const ComplexMatrix& h : g) j.push_back(-tensor(identity(da), h));
  const AffineMinimum m = minimize_diamond(da, de, map.choi() - tensor(identity(da), g0), j, g0, g, sdp_tol);
  ComplexMatrix sigma = affine_value(g0, g, m.x);
  return {sigma, m.value, m.certificate};
}

DecoderFit best_decoder(const Channel& t, double sdp_tol) {
  const int da = t.d_in(), db = t.d_out();
  const LinearMap& tm = t.map();
  std::vector<ComplexMatrix> g;
  for (const ComplexMatrix& hb : sdp::hermitian_basis(db))
    for (const ComplexMatrix& ha : traceless_basis(da)) g.push_back(tensor(hb, ha));
  const ComplexMatrix g0 = identity(db * da) / static_cast<double>(da);
  std::vector<ComplexMatrix> j;
  for (const ComplexMatrix& h : g) j.push_back(tm.then(LinearMap(db, da, h)).choi());
  const ComplexMatrix j0 = tm.then(LinearMap(db, da, g0)).choi() - identity_channel(da).choi();
  const AffineMinimum m = minimize_diamond(da, da, j0, j, g0, g, sdp_tol);
  const Channel d = Channel::from_map(LinearMap(db, da, affine_value(g0, g, m.x)), 1e-7);
  return {d, cb(tm.then(d.map()) - identity_channel(da).map(), sdp_tol), m.certificate};
}

ConstructedDecoder construct_decoder(const Channel& t, const std::optional<DensityMatrix>& sigma, double sdp_tol) {
  const StinespringDilation vt = to_stinespring(t);
  const int da = vt.d_a, db = vt.d_b, de = vt.d_e;
  const Channel te = complementary(vt);
  const ComplexMatrix s = sigma ? sigma->matrix() : best_depolarizing(te.map(), sdp_tol).sigma;
  if (s.rows() != de)
    throw Error(ErrorCode::DimensionMismatch, "construct_decoder: sigma must live on the environment (dimension " +
                                                  std::to_string(de) + ")");

  // both dilations of T_E: output E, environments B and A (x) E'
  const StinespringDilation vs = embedding_dilation(da, purification_matrix(s));
  StinespringDilation vs_e{ComplexMatrix::Zero(de * da * de, da), da, de, da * de};
  for (int a = 0; a < da; ++a)
    for (int k = 0; k < de; ++k)
      for (int e = 0; e < de; ++e) vs_e.v.row(e * da * de + a * de + k) = vs.v.row(a * de * de + k * de + e);
  const IsometryGap g = isometry_gap(vt.swap_roles(), vs_e, sdp_tol);

  // C^n -> A (x) E'': coordinate a d_e + k goes to a d_e'' + k, the rest fill the free slots in order
  const int n = g.env_dim, dpp = ceil_div(std::max(n, da * de), da);
  ComplexMatrix emb = ComplexMatrix::Zero(da * dpp, n);
  std::vector<bool> used(static_cast<std::size_t>(da * dpp), false);
  for (int a = 0; a < da; ++a)
    for (int k = 0; k < de; ++k) {
      emb(a * dpp + k, a * de + k) = 1.0;
      used[static_cast<std::size_t>(a * dpp + k)] = true;
    }
  int free = 0;
  for (int c = da * de; c < n; ++c) {
    while (used[static_cast<std::size_t>(free)]) ++free;
    emb(free, c) = 1.0;
    used[static_cast<std::size_t>(free)] = true;
  }
  const StinespringDilation vd{emb * g.u.leftCols(db), db, da, dpp};
  const Channel d = vd.induced_channel();

  ConstructedDecoder out{d, cb(t.map().then(d.map()) - identity_channel(da).map(), sdp_tol),
                         cb(te.map() - replacement_channel(da, DensityMatrix(hermitian_part(s), 1e-6)).map(), sdp_tol),
                         s, g.gap, da * dpp};
  return out;
}

TradeoffReport verify_tradeoff(const Channel& t, const std::optional<DensityMatrix>& sigma, double sdp_tol) {
  const StinespringDilation vt = to_stinespring(t);
  const int da = vt.d_a, de = vt.d_e;
  const Channel te = complementary(vt);
  if (sigma && sigma->dim() != de)
    throw Error(ErrorCode::DimensionMismatch, "verify_tradeoff: sigma must live on the environment (dimension " +
                                                  std::to_string(de) + ")");
  const ComplexMatrix s = sigma ? sigma->matrix() : best_depolarizing(te.map(), sdp_tol).sigma;
  const ConstructedDecoder c = construct_decoder(t, DensityMatrix(hermitian_part(s), 1e-6), sdp_tol);
  const DecoderFit best = best_decoder(t, sdp_tol);
  const bool constructive_wins = c.achieved < best.cb;
  const Channel& d = constructive_wins ? c.decoder : best.decoder;

  // right half: connect (V_D (x) 1_E) V_T to phi -> phi (x) psi_sigma on E' (x) E
  StinespringDilation vd = to_stinespring(d);
  if (vd.d_e < de) vd = pad_dilation(vd, de);
  const int ep = vd.d_e;
  ComplexMatrix p = ComplexMatrix::Zero(ep, de);
  p.topRows(de) = purification_matrix(s);
  const StinespringDilation w{tensor(vd.v, identity(de)) * vt.v, da, da, ep * de};
  const IsometryGap g = isometry_gap(w, embedding_dilation(da, p), sdp_tol);
  // the common environment C^n sits inside E''' (x) E as its first n coordinates
  const int n = g.env_dim, e3 = ceil_div(n, de);
  ComplexMatrix u = identity(e3 * de);
  u.topLeftCorner(n, n) = g.u;
  ComplexVector psi = ComplexVector::Zero(e3 * de);
  for (int k = 0; k < ep; ++k)
    for (int e = 0; e < de; ++e) psi(k * de + e) = p(k, e);
  const ComplexVector pulled = u.adjoint() * psi;
  const ComplexMatrix sigma_tilde = hermitian_part(partial_trace(pulled * pulled.adjoint(), e3, de, Keep::Second));

  const double cb_env = cb(te.map() - replacement_channel(da, DensityMatrix(hermitian_part(s), 1e-6)).map(), sdp_tol);
  const double cb_tilde =
      cb(te.map() - replacement_channel(da, DensityMatrix(sigma_tilde, 1e-6)).map(), sdp_tol);
  const double bd = std::min(best.cb, c.achieved);

  const double root = std::sqrt(bd);
  return {.decoder = d,
          .constructive_decoder = c.decoder,
          .sigma = s,
          .sigma_optimized = !sigma,
          .cb_env = cb_env,
          .best_decode = bd,
          .constructive_decode = c.achieved,
          .sigma_tilde = sigma_tilde,
          .cb_env_tilde = cb_tilde,
          .padded_dim = c.padded_dim,
          .left_residual = cb_env - 0.25 * bd * bd,
          .right_residual = 2.0 * root - cb_tilde,
          .sigma_right_residual = 2.0 * root - cb_env,
          .constructive_residual = 2.0 * std::sqrt(cb_env) - c.achieved};
}

BroadcastReport no_broadcast_check(const Channel& t, double sdp_tol) {
  const int d = t.d_in();
  if (t.d_out() != d * d)
    throw Error(ErrorCode::NotAFactorization, "no_broadcast_check: output dimension " + std::to_string(t.d_out()) +
                                                  " is not the square of the input dimension " + std::to_string(d));
  const auto restrict = [&](Keep keep) {
    return t.map().then(
        LinearMap::from_action(d * d, d, [&](const ComplexMatrix& x) { return partial_trace(x, d, d, keep); }));
  };
  const LinearMap t1 = restrict(Keep::First), t2 = restrict(Keep::Second);
  const LinearMap id = identity_channel(d).map();
  const DepolarizingFit f1 = best_depolarizing(t1, sdp_tol), f2 = best_depolarizing(t2, sdp_tol);

  BroadcastReport r;
  r.d = d;
  r.t1_vs_id = cb(t1 - id, sdp_tol);
  r.t2_vs_id = cb(t2 - id, sdp_tol);
  r.t1_vs_depolarizing = f1.cb;
  r.t2_vs_depolarizing = f2.cb;
  r.sigma1 = f1.sigma;
  r.sigma2 = f2.sigma;
  r.residual = 2.0 * std::sqrt(r.t1_vs_id) - r.t2_vs_depolarizing;
  r.swapped_residual = 2.0 * std::sqrt(r.t2_vs_id) - r.t1_vs_depolarizing;
  return r;
}

}  // namespace qchan
