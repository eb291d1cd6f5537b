#pragma once

// Distances and information quantities for linear maps and channels.
//
// Stabilized inputs live on C^d_ref (x) C^d_in with the reference factor
// first; the stabilization dimension is always d_in.

#include <cstdint>
#include <optional>
#include <string>

#include "qchan/channels.hpp"
#include "qchan/sdp.hpp"

namespace qchan {

enum class DistanceMode { States, Full };
enum class DiamondMethod { Sdp, Variational, Both };

struct OptimizerOptions {
  int starts = 32;
  int max_iter = 500;
  double step_tol = 1e-12;
  std::uint64_t seed = 0;
};

struct MultistartStats {
  int starts = 0;
  int converged = 0;  // starts whose last step improved by less than step_tol
  int total_iterations = 0;
  int best_start = -1;
  double best = 0.0;
  double worst = 0.0;
  /// Starts finishing within 1e-8 of the best value.
  int hits = 0;
};

struct SdpCertificate {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  sdp::SdpStatus status = sdp::SdpStatus::MaxIter;
};

struct DistanceResult {
  double value = 0.0;
  std::optional<SdpCertificate> sdp;
  std::optional<MultistartStats> multistart;
  /// Both-mode only: the variational lower bound and whether it disagreed
  /// with the SDP value by more than 1e-6.
  std::optional<double> variational_value;
  bool flagged = false;
  /// Optimizing pure input (stabilized for diamond_norm); phi is the second
  /// vector of a |psi><phi| witness in Full mode.
  ComplexVector witness;
  ComplexVector witness_phi;
  /// SDP-side optimizing reference state, when available.
  ComplexMatrix witness_state;
};

/// sup ||Phi1_*(x) - Phi2_*(x)||_1 over pure states (States) or over rank-one
/// |psi><phi| of unit trace norm (Full). A certified lower bound.
DistanceResult induced_distance(const LinearMap& a, const LinearMap& b, DistanceMode mode,
                                const OptimizerOptions& opt = {});

/// ||(id_d (x) Delta)_*||_{1->1} with d = d_in. Variational mode requires a
/// Hermiticity-preserving map (throws Error(NotHermiticityPreserving)).
DistanceResult diamond_norm(const LinearMap& delta, DiamondMethod method = DiamondMethod::Sdp,
                            const OptimizerOptions& opt = {}, double sdp_tol = 1e-10);

/// ||(id (x) Delta)_*(|psi><psi|)||_1 for a stabilized input psi.
double stabilized_trace_norm(const LinearMap& delta, const ComplexVector& psi);

struct FidelityResult {
  double value = 0.0;
  /// Minimizing input on C^d_in (x) C^d_in, system factor first.
  ComplexVector witness;
  /// Reduced input state of the witness.
  ComplexMatrix input_state;
  /// Unitary on the common environment, (1 (x) U) V1 ~ V2.
  ComplexMatrix u;
  /// Contraction E1 -> E2 attaining the maximum before unitary completion.
  ComplexMatrix contraction;
  StinespringDilation dilation1;  // padded to u's dimension
  StinespringDilation dilation2;
  SdpCertificate certificate;
};

/// Operational fidelity min_psi f((T1 (x) id)(psi), (T2 (x) id)(psi)), solved
/// as the convex minimax max_{||C|| <= 1} lambda_min Re(V2^* (1 (x) C) V1).
FidelityResult channel_fidelity(const Channel& t1, const Channel& t2, double sdp_tol = 1e-10);
/// Same, for two given dilations of (possibly different) channels A -> B.
FidelityResult dilation_fidelity(const StinespringDilation& d1, const StinespringDilation& d2,
                                 double sdp_tol = 1e-10);
/// ||tr_B (V2 rho V1^*)||_1: the output fidelity for input state rho.
double dilation_overlap(const StinespringDilation& d1, const StinespringDilation& d2, const ComplexMatrix& rho);

/// Base-2 entropy; eigenvalues below 1e-12 count as zero.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const ComplexMatrix& rho);
double holevo_chi(const Ensemble& e, const Channel& t);
double coherent_info(const Channel& t, const DensityMatrix& rho);
/// <Omega| (R_* (x) id)(|Omega><Omega|) |Omega>.
double channel_fidelity_fc(const Channel& r);

}  // namespace qchan
