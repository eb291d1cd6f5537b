#include "qchan/continuity.hpp"

#include <algorithm>
#include <cmath>

namespace qchan {

namespace {

StinespringDilation pad_to(const StinespringDilation& d, int n) {
  return d.d_e == n ? d : pad_dilation(d, n);
}

double evaluate_gap(const StinespringDilation& d1, const StinespringDilation& d2, const ComplexMatrix& u) {
  return operator_norm(d1.rotate_environment(u).v - d2.v);
}

}  // namespace

IsometryGap isometry_gap(const StinespringDilation& d1, const StinespringDilation& d2, double sdp_tol) {
  if (d1.d_a != d2.d_a || d1.d_b != d2.d_b)
    throw Error(ErrorCode::DimensionMismatch, "isometry_gap: dilations act between different spaces");
  const FidelityResult f = dilation_fidelity(d1, d2, sdp_tol);
  IsometryGap out;
  out.u = f.u;
  out.dilation1 = f.dilation1;
  out.dilation2 = f.dilation2;
  out.env_dim = f.dilation1.d_e;
  out.fidelity = f.value;
  out.certificate = f.certificate;
  out.gap = evaluate_gap(f.dilation1, f.dilation2, f.u);

  // polar step at the optimal input: exact whenever the saddle point is attained
  // by a unitary on the unenlarged environment
  const int n = std::max(d1.d_e, d2.d_e);
  const StinespringDilation p1 = pad_to(d1, n), p2 = pad_to(d2, n);
  const ComplexMatrix m = p1.v * f.input_state * p2.v.adjoint();
  ComplexMatrix overlap = ComplexMatrix::Zero(n, n);
  for (int b = 0; b < d1.d_b; ++b) overlap += m.block(b * n, b * n, n, n);
  const ComplexMatrix u = polar(overlap).unitary.adjoint();
  const double gap = evaluate_gap(p1, p2, u);
  if (gap < out.gap) {
    out.gap = gap;
    out.u = u;
    out.dilation1 = p1;
    out.dilation2 = p2;
    out.env_dim = n;
  }
  return out;
}

ContinuityReport verify_continuity(const Channel& t1, const Channel& t2, const OptimizerOptions& opt,
                                   double sdp_tol) {
  if (t1.d_in() != t2.d_in() || t1.d_out() != t2.d_out())
    throw Error(ErrorCode::DimensionMismatch, "verify_continuity: channels have different dimensions");
  const IsometryGap g = isometry_gap(to_stinespring(t1), to_stinespring(t2), sdp_tol);
  const DistanceResult cb = diamond_norm(t1.map() - t2.map(), DiamondMethod::Both, opt, sdp_tol);

  ContinuityReport r;
  r.gap = g.gap;
  r.cb = cb.value;
  r.fidelity = g.fidelity;
  r.optimal_u = g.u;
  r.env_dim = g.env_dim;
  r.left_residual = r.cb - r.gap * r.gap;
  r.right_residual = 2.0 * r.gap - r.cb;
  r.identity_residual = std::abs(r.gap * r.gap - 2.0 * (1.0 - r.fidelity));
  r.cb_variational = cb.variational_value.value_or(0.0);
  r.cb_flagged = cb.flagged;
  r.fidelity_certificate = g.certificate;
  if (cb.sdp) r.cb_certificate = *cb.sdp;
  return r;
}

}  // namespace qchan
