#pragma once

// Experiment drivers behind the command-line front end. Every report carries
// its parameters, seed, tolerances and the library version so that a run can
// be replayed; rows are assembled in parameter order regardless of threading.

#include <cstdint>
#include <string>
#include <vector>

#include "qchan/channel_io.hpp"
#include "qchan/metrics.hpp"

namespace qchan {

inline constexpr const char* kVersion = "1.0.0";

struct ExperimentReport {
  std::string name;
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  Json tolerances = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Named pass/fail outcomes of the inequality checks.
  Json verdicts = Json::object();
  /// Aggregates and logged observations that are not verdicts.
  Json summary = Json::object();
  double wall_seconds = 0.0;

  bool all_passed() const;
  Json to_json() const;
  /// Header row followed by one row per parameter point.
  std::string to_csv() const;
  /// Fixed-width table for terminals.
  std::string to_table() const;
};

struct SeparationOptions {
  int nu_min = 2;
  int nu_max = 8;
  /// SDP diamond norm up to this nu, variational lower bound above it.
  int sdp_max_nu = 3;
  OptimizerOptions optimizer{};
  double sdp_tol = 1e-10;
};

/// T = nu/(nu+1) S + 1/(nu+1) Theta against S. Columns:
/// nu, induced_states, bound_upper = 2/(nu+1), diamond, bound_lower = (nu-1)/(nu+1), diamond_is_sdp.
ExperimentReport experiment_separation(const SeparationOptions& opt);

struct RandomizingOptions {
  int nu = 16;
  int mu = 32;
  int trials = 20;
  std::uint64_t seed = 0;
  /// Use the nu^2 clock-and-shift unitaries instead of Haar draws (needs mu = nu^2).
  bool weyl = false;
  /// Ascent starts for the epsilon estimate.
  int starts = 64;
  int max_iter = 300;
};

/// Per trial: the witness ||(R - S) (x) id (|Omega><Omega|)||_1 against
/// 2 (1 - mu/nu^2) and the estimate nu max_rho ||R(rho) - 1/nu||_op. Columns:
/// trial, witness, witness_bound, epsilon_estimate.
ExperimentReport experiment_randomizing(const RandomizingOptions& opt);

struct SweepOptions {
  int pairs = 100;
  int dim = 2;
  int max_rank = 4;
  std::uint64_t seed = 0;
  OptimizerOptions optimizer{8, 200, 1e-12, 0};
  double sdp_tol = 1e-10;
  /// Also run the tradeoff check on the first channel of every pair.
  bool tradeoff = true;
};

/// Random channel pairs; per pair the residuals of the fidelity sandwich, the
/// dilation-gap sandwich, the Bures identity and (optionally) both tradeoff halves.
ExperimentReport experiment_sweep(const SweepOptions& opt);

/// Epsilon estimate nu max_psi ||R(|psi><psi|) - 1/nu||_op by multistart ascent.
double randomizing_epsilon(const Channel& r, int starts, int max_iter, RngStream& rng);

}  // namespace qchan
