#pragma once

// Dilation gap between two channels and the two-sided cb-norm estimate
//   gap^2 <= ||T1 - T2||_cb <= 2 gap,  gap = inf_U ||(1 (x) U) V1 - V2||.

#include "qchan/metrics.hpp"

namespace qchan {

struct IsometryGap {
  /// ||(1 (x) u) V1 - V2|| re-evaluated with the returned unitary.
  double gap = 0.0;
  ComplexMatrix u;
  /// Inputs padded to the common environment dimension of u.
  StinespringDilation dilation1;
  StinespringDilation dilation2;
  int env_dim = 0;
  /// Operational fidelity of the two induced channels.
  double fidelity = 0.0;
  SdpCertificate certificate;
};

/// Both dilations must share d_A and d_B. The smaller environment is padded,
/// never truncated; the common dimension may grow when the optimal
/// contraction has singular values below one.
IsometryGap isometry_gap(const StinespringDilation& d1, const StinespringDilation& d2, double sdp_tol = 1e-10);

struct ContinuityReport {
  double gap = 0.0;
  double cb = 0.0;
  double fidelity = 0.0;
  ComplexMatrix optimal_u;
  int env_dim = 0;
  /// cb - gap^2
  double left_residual = 0.0;
  /// 2 gap - cb
  double right_residual = 0.0;
  /// |gap^2 - 2 (1 - F)|
  double identity_residual = 0.0;
  /// Variational lower bound for cb and its agreement flag.
  double cb_variational = 0.0;
  bool cb_flagged = false;
  SdpCertificate fidelity_certificate;
  SdpCertificate cb_certificate;

  bool holds(double slack = 1e-6) const {
    return left_residual >= -slack && right_residual >= -slack && identity_residual <= slack;
  }
};

ContinuityReport verify_continuity(const Channel& t1, const Channel& t2, const OptimizerOptions& opt = {},
                                   double sdp_tol = 1e-10);

}  // namespace qchan
