#pragma once

// Information-disturbance tradeoff for a channel T: A -> B with complementary
// channel T_E: A -> E,
//   1/4 inf_D ||T D - id||_cb^2 <= ||T_E - S_sigma||_cb <= 2 inf_D ||T D - id||_cb^(1/2),
// where D: B -> A is a decoder (applied after T) and S_sigma(rho) = tr(rho) sigma.

#include <optional>

#include "qchan/continuity.hpp"

namespace qchan {

/// rho -> tr(rho) sigma from C^d_in.
Channel replacement_channel(int d_in, const DensityMatrix& sigma);

struct DepolarizingFit {
  ComplexMatrix sigma;
  double cb = 0.0;
  SdpCertificate certificate;
};

/// min over states sigma of ||map - S_sigma||_cb, solved as one SDP.
DepolarizingFit best_depolarizing(const LinearMap& map, double sdp_tol = 1e-10);

struct DecoderFit {
  Channel decoder;
  double cb = 0.0;
  SdpCertificate certificate;
};

/// min over channels D: B -> A of ||T D - id_A||_cb, solved as one SDP.
DecoderFit best_decoder(const Channel& t, double sdp_tol = 1e-10);

struct ConstructedDecoder {
  Channel decoder;
  /// ||T D - id||_cb.
  double achieved = 0.0;
  /// ||T_E - S_sigma||_cb for the sigma used.
  double cb_env = 0.0;
  ComplexMatrix sigma;
  /// ||(V_D (x) 1_E) V_T - V_S|| for the decoder isometry.
  double gap = 0.0;
  /// Dimension of the space A (x) E' that B was padded into.
  int padded_dim = 0;
};

/// Decoder from the optimal connecting isometry between a dilation of T_E and
/// the dilation phi -> phi (x) psi_sigma of S_sigma. Without sigma the
/// cb-optimal depolarizing channel is used.
ConstructedDecoder construct_decoder(const Channel& t, const std::optional<DensityMatrix>& sigma = std::nullopt,
                                     double sdp_tol = 1e-10);

struct TradeoffReport {
  Channel decoder;               // attains best_decode
  Channel constructive_decoder;  // from construct_decoder
  ComplexMatrix sigma;
  bool sigma_optimized = false;
  double cb_env = 0.0;
  /// min(best_decoder, constructive) value of ||T D - id||_cb.
  double best_decode = 0.0;
  double constructive_decode = 0.0;
  /// sigma~ = tr_E'(U^* |psi_sigma><psi_sigma| U) built from the best decoder.
  ComplexMatrix sigma_tilde;
  double cb_env_tilde = 0.0;
  int padded_dim = 0;
  /// cb_env - best_decode^2 / 4
  double left_residual = 0.0;
  /// 2 sqrt(best_decode) - cb_env_tilde
  double right_residual = 0.0;
  /// 2 sqrt(best_decode) - cb_env; only meaningful for the optimized sigma.
  double sigma_right_residual = 0.0;
  /// 2 sqrt(cb_env) - constructive_decode
  double constructive_residual = 0.0;

  bool holds(double slack = 1e-5) const {
    return left_residual >= -slack && right_residual >= -slack && constructive_residual >= -slack &&
           (!sigma_optimized || sigma_right_residual >= -slack);
  }
};

TradeoffReport verify_tradeoff(const Channel& t, const std::optional<DensityMatrix>& sigma = std::nullopt,
                               double sdp_tol = 1e-10);

struct BroadcastReport {
  int d = 0;
  /// ||T_k - id||_cb and min_sigma ||T_k - S_sigma||_cb for the two branches.
  double t1_vs_id = 0.0;
  double t2_vs_id = 0.0;
  double t1_vs_depolarizing = 0.0;
  double t2_vs_depolarizing = 0.0;
  ComplexMatrix sigma1;
  ComplexMatrix sigma2;
  /// 2 sqrt(||T1 - id||) - ||T2 - S||, and the same with the branches exchanged.
  double residual = 0.0;
  double swapped_residual = 0.0;

  bool holds(double slack = 1e-5) const { return residual >= -slack && swapped_residual >= -slack; }
};

/// T: C^d -> C^d (x) C^d. Throws Error(NotAFactorization) unless d_out = d_in^2.
BroadcastReport no_broadcast_check(const Channel& t, double sdp_tol = 1e-10);

}  // namespace qchan
