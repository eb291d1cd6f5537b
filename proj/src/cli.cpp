#include "qchan/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qchan/channel_io.hpp"
#include "qchan/continuity.hpp"
#include "qchan/experiments.hpp"
#include "qchan/tradeoff.hpp"

namespace qchan {

namespace {

struct Globals {
  std::uint64_t seed = 0;
  double tol = 1e-10;
  int multistart = 32;
  std::string out;
  std::string format = "json";
};

std::string fixed(double v, int digits = 6) {
  if (std::abs(v) < 0.5 * std::pow(10.0, -digits)) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Json certificate_json(const SdpCertificate& c) {
  return {{"primal", c.primal}, {"dual", c.dual}, {"gap", c.gap}, {"iterations", c.iterations},
          {"status", std::string(sdp::to_string(c.status))}};
}

// Key/value pairs of a flat report in CSV form; nested values are dumped as JSON strings.
std::string flat_csv(const Json& j) {
  std::ostringstream os;
  os << "quantity,value\n";
  for (const auto& [key, value] : j.items()) {
    if (value.is_number() || value.is_boolean())
      os << key << ',' << value.dump() << '\n';
    else if (value.is_string())
      os << key << ',' << value.get<std::string>() << '\n';
  }
  return os.str();
}

void emit(const Globals& g, const Json& report, const std::string& csv) {
  if (g.out.empty()) return;
  std::ofstream f(g.out);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write '" + g.out + "'");
  if (g.format == "csv")
    f << csv;
  else
    f << report.dump(2) << '\n';
}

Json base_report(const std::string& command, const Globals& g) {
  return {{"command", command}, {"version", kVersion}, {"seed", g.seed}, {"sdp_tol", g.tol},
          {"multistart", g.multistart}};
}

OptimizerOptions optimizer(const Globals& g) {
  OptimizerOptions o;
  o.starts = g.multistart;
  o.seed = g.seed;
  return o;
}

int validate(const Globals& g, const std::string& source, std::ostream& out) {
  const LinearMap m = load_map(source);
  const double lmin = m.min_choi_eigenvalue();
  const ComplexMatrix reduced = partial_trace(m.choi(), m.d_in(), m.d_out(), Keep::First);
  const double tp = (reduced - identity(m.d_in())).cwiseAbs().maxCoeff();
  const bool hermitian = is_hermitian(m.choi());
  const bool valid = hermitian && lmin >= -kValidationTol && tp <= kValidationTol;
  out << "d_in " << m.d_in() << ", d_out " << m.d_out() << '\n';
  out << "min Choi eigenvalue " << fixed(lmin) << '\n';
  out << "trace preservation deviation " << fixed(tp, 12) << '\n';
  if (!hermitian) out << "Choi matrix is not Hermitian\n";
  out << (valid ? "valid channel" : "NOT a channel") << '\n';
  Json r = base_report("validate", g);
  r["source"] = source;
  r["d_in"] = m.d_in();
  r["d_out"] = m.d_out();
  r["min_choi_eigenvalue"] = lmin;
  r["trace_preservation_deviation"] = tp;
  r["hermitian"] = hermitian;
  r["valid"] = valid;
  emit(g, r, flat_csv(r));
  return valid ? kExitOk : kExitValidation;
}

int diamond(const Globals& g, const std::string& a, const std::string& b, const std::string& method,
            std::ostream& out) {
  LinearMap delta = load_map(a);
  if (!b.empty()) delta = delta - load_map(b);
  const DiamondMethod m =
      method == "variational" ? DiamondMethod::Variational : method == "both" ? DiamondMethod::Both : DiamondMethod::Sdp;
  const DistanceResult d = diamond_norm(delta, m, optimizer(g), g.tol);
  out << "diamond norm " << fixed(d.value, 10) << '\n';
  Json r = base_report("diamond", g);
  r["method"] = method;
  r["value"] = d.value;
  if (d.sdp) {
    out << "sdp primal " << d.sdp->primal << ", dual " << d.sdp->dual << ", status " << sdp::to_string(d.sdp->status)
        << '\n';
    r["sdp"] = certificate_json(*d.sdp);
  }
  if (d.variational_value) {
    out << "variational lower bound " << fixed(*d.variational_value, 10) << (d.flagged ? " (DISAGREES)" : "") << '\n';
    r["variational_value"] = *d.variational_value;
    r["flagged"] = d.flagged;
  }
  if (d.multistart) {
    r["multistart"] = {{"starts", d.multistart->starts}, {"converged", d.multistart->converged},
                       {"best_start", d.multistart->best_start}, {"hits", d.multistart->hits}};
  }
  if (d.witness.size()) r["witness"] = matrix_to_json(d.witness);
  emit(g, r, flat_csv(r));
  return kExitOk;
}

int fidelity(const Globals& g, const std::string& a, const std::string& b, std::ostream& out) {
  const Channel t1 = load_channel(a), t2 = load_channel(b);
  const IsometryGap gap = isometry_gap(to_stinespring(t1), to_stinespring(t2), g.tol);
  out << "operational fidelity " << fixed(gap.fidelity, 10) << '\n';
  out << "dilation gap " << fixed(gap.gap, 10) << " (environment dimension " << gap.env_dim << ")\n";
  Json r = base_report("fidelity", g);
  r["fidelity"] = gap.fidelity;
  r["gap"] = gap.gap;
  r["env_dim"] = gap.env_dim;
  r["unitary"] = matrix_to_json(gap.u);
  r["sdp"] = certificate_json(gap.certificate);
  emit(g, r, flat_csv(r));
  return kExitOk;
}

int continuity(const Globals& g, const std::string& a, const std::string& b, std::ostream& out) {
  const ContinuityReport c = verify_continuity(load_channel(a), load_channel(b), optimizer(g), g.tol);
  out << "gap " << fixed(c.gap, 10) << ", cb " << fixed(c.cb, 10) << ", fidelity " << fixed(c.fidelity, 10) << '\n';
  out << (c.left_residual >= -1e-6 ? "PASS" : "FAIL") << " gap^2 <= cb       residual " << c.left_residual << '\n';
  out << (c.right_residual >= -1e-6 ? "PASS" : "FAIL") << " cb <= 2 gap       residual " << c.right_residual << '\n';
  out << (c.identity_residual <= 1e-6 ? "PASS" : "FAIL") << " gap^2 = 2(1 - F)  residual " << c.identity_residual
      << '\n';
  Json r = base_report("continuity", g);
  r["gap"] = c.gap;
  r["cb"] = c.cb;
  r["fidelity"] = c.fidelity;
  r["env_dim"] = c.env_dim;
  r["left_residual"] = c.left_residual;
  r["right_residual"] = c.right_residual;
  r["identity_residual"] = c.identity_residual;
  r["cb_variational"] = c.cb_variational;
  r["cb_flagged"] = c.cb_flagged;
  r["holds"] = c.holds();
  r["optimal_u"] = matrix_to_json(c.optimal_u);
  r["fidelity_sdp"] = certificate_json(c.fidelity_certificate);
  r["cb_sdp"] = certificate_json(c.cb_certificate);
  emit(g, r, flat_csv(r));
  return kExitOk;
}

int tradeoff(const Globals& g, const std::string& source, const std::string& sigma_file, bool broadcast,
             std::ostream& out) {
  const Channel t = load_channel(source);
  Json r = base_report(broadcast ? "broadcast" : "tradeoff", g);
  if (broadcast) {
    const BroadcastReport b = no_broadcast_check(t, g.tol);
    out << "||T1 - id||_cb " << fixed(b.t1_vs_id, 10) << ", min ||T2 - S||_cb " << fixed(b.t2_vs_depolarizing, 10)
        << '\n';
    out << (b.residual >= -1e-5 ? "PASS" : "FAIL") << " ||T2 - S|| <= 2 ||T1 - id||^(1/2)  residual " << b.residual
        << '\n';
    out << (b.swapped_residual >= -1e-5 ? "PASS" : "FAIL") << " ||T1 - S|| <= 2 ||T2 - id||^(1/2)  residual "
        << b.swapped_residual << '\n';
    r["t1_vs_id"] = b.t1_vs_id;
    r["t2_vs_id"] = b.t2_vs_id;
    r["t1_vs_depolarizing"] = b.t1_vs_depolarizing;
    r["t2_vs_depolarizing"] = b.t2_vs_depolarizing;
    r["sigma1"] = matrix_to_json(b.sigma1);
    r["sigma2"] = matrix_to_json(b.sigma2);
    r["residual"] = b.residual;
    r["swapped_residual"] = b.swapped_residual;
    r["holds"] = b.holds();
    emit(g, r, flat_csv(r));
    return kExitOk;
  }
  std::optional<DensityMatrix> sigma;
  if (!sigma_file.empty()) {
    std::ifstream in(sigma_file);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + sigma_file + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, "'" + sigma_file + "': " + e.what());
    }
    sigma.emplace(matrix_from_json(j.is_object() && j.contains("sigma") ? j["sigma"] : j));
  }
  const TradeoffReport t_r = verify_tradeoff(t, sigma, g.tol);
  out << "||T_E - S_sigma||_cb " << fixed(t_r.cb_env, 10) << (t_r.sigma_optimized ? " (optimized sigma)" : "") << '\n';
  out << "best ||T D - id||_cb " << fixed(t_r.best_decode, 10) << ", constructive " << fixed(t_r.constructive_decode, 10)
      << '\n';
  out << "||T_E - S_sigma~||_cb " << fixed(t_r.cb_env_tilde, 10) << '\n';
  out << (t_r.left_residual >= -1e-5 ? "PASS" : "FAIL") << " left half   residual " << t_r.left_residual << '\n';
  out << (t_r.right_residual >= -1e-5 ? "PASS" : "FAIL") << " right half  residual " << t_r.right_residual << '\n';
  r["cb_env"] = t_r.cb_env;
  r["sigma"] = matrix_to_json(t_r.sigma);
  r["sigma_optimized"] = t_r.sigma_optimized;
  r["best_decode"] = t_r.best_decode;
  r["constructive_decode"] = t_r.constructive_decode;
  r["sigma_tilde"] = matrix_to_json(t_r.sigma_tilde);
  r["cb_env_tilde"] = t_r.cb_env_tilde;
  r["padded_dim"] = t_r.padded_dim;
  r["left_residual"] = t_r.left_residual;
  r["right_residual"] = t_r.right_residual;
  r["sigma_right_residual"] = t_r.sigma_right_residual;
  r["constructive_residual"] = t_r.constructive_residual;
  r["holds"] = t_r.holds();
  r["decoder"] = channel_to_json(t_r.decoder);
  emit(g, r, flat_csv(r));
  return kExitOk;
}

int experiment(const Globals& g, const ExperimentReport& rep, std::ostream& out) {
  out << rep.to_table();
  emit(g, rep.to_json(), rep.to_csv());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum channel distances, dilation continuity and information-disturbance checks", "qchan"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--tol", g.tol, "SDP tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--multistart", g.multistart, "starts for variational optimizers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "write the machine-readable report to this file");
  app.add_option("--format", g.format, "report format")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));

  std::string a, b, method = "sdp", sigma_file;
  bool broadcast = false;

  auto* validate_cmd = app.add_subcommand("validate", "check that a file or named spec is a channel");
  validate_cmd->add_option("channel", a, "channel file or named:... spec")->required();

  auto* diamond_cmd = app.add_subcommand("diamond", "diamond norm of a map or of the difference of two maps");
  diamond_cmd->add_option("map", a)->required();
  diamond_cmd->add_option("other", b);
  diamond_cmd->add_option("--method", method)->capture_default_str()->check(CLI::IsMember({"sdp", "variational", "both"}));

  auto* fidelity_cmd = app.add_subcommand("fidelity", "operational fidelity and dilation gap of two channels");
  fidelity_cmd->add_option("first", a)->required();
  fidelity_cmd->add_option("second", b)->required();

  auto* continuity_cmd = app.add_subcommand("continuity", "check gap^2 <= cb <= 2 gap for two channels");
  continuity_cmd->add_option("first", a)->required();
  continuity_cmd->add_option("second", b)->required();

  auto* tradeoff_cmd = app.add_subcommand("tradeoff", "information-disturbance tradeoff of a channel");
  tradeoff_cmd->add_option("channel", a)->required();
  tradeoff_cmd->add_option("--sigma", sigma_file, "JSON matrix for the depolarizing output state");
  tradeoff_cmd->add_flag("--broadcast", broadcast, "treat the output as two copies of the input and check broadcasting");

  auto* experiment_cmd = app.add_subcommand("experiment", "run an experiment preset");
  experiment_cmd->require_subcommand(1);
  SeparationOptions sep;
  auto* sep_cmd = experiment_cmd->add_subcommand("separation", "operator norm vs cb-norm near the depolarizing channel");
  sep_cmd->add_option("--nu-min", sep.nu_min)->capture_default_str();
  sep_cmd->add_option("--nu-max", sep.nu_max)->capture_default_str();
  sep_cmd->add_option("--sdp-max-nu", sep.sdp_max_nu)->capture_default_str();
  RandomizingOptions rnd;
  auto* rnd_cmd = experiment_cmd->add_subcommand("randomizing", "random unitary channels against the depolarizing one");
  rnd_cmd->add_option("--nu", rnd.nu)->capture_default_str();
  rnd_cmd->add_option("--mu", rnd.mu)->capture_default_str();
  rnd_cmd->add_option("--trials", rnd.trials)->capture_default_str();
  rnd_cmd->add_option("--starts", rnd.starts, "ascent starts for the epsilon estimate")->capture_default_str();
  rnd_cmd->add_flag("--weyl", rnd.weyl, "use the nu^2 clock-and-shift unitaries");
  SweepOptions sw;
  bool no_tradeoff = false;
  auto* sweep_cmd = experiment_cmd->add_subcommand("sweep", "property sweep over random channel pairs");
  sweep_cmd->add_option("--pairs", sw.pairs)->capture_default_str();
  sweep_cmd->add_option("--dim", sw.dim)->capture_default_str();
  sweep_cmd->add_option("--max-rank", sw.max_rank)->capture_default_str();
  sweep_cmd->add_flag("--no-tradeoff", no_tradeoff, "skip the tradeoff check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*validate_cmd) return validate(g, a, out);
    if (*diamond_cmd) return diamond(g, a, b, method, out);
    if (*fidelity_cmd) return fidelity(g, a, b, out);
    if (*continuity_cmd) return continuity(g, a, b, out);
    if (*tradeoff_cmd) return tradeoff(g, a, sigma_file, broadcast, out);
    if (*sep_cmd) {
      sep.optimizer = optimizer(g);
      sep.sdp_tol = g.tol;
      return experiment(g, experiment_separation(sep), out);
    }
    if (*rnd_cmd) {
      rnd.seed = g.seed;
      return experiment(g, experiment_randomizing(rnd), out);
    }
    if (*sweep_cmd) {
      sw.seed = g.seed;
      sw.optimizer.starts = std::min(g.multistart, sw.optimizer.starts);
      sw.sdp_tol = g.tol;
      sw.tradeoff = !no_tradeoff;
      return experiment(g, experiment_sweep(sw), out);
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::NumericalFailure: return kExitNumerical;
      case ErrorCode::BadParameters: return kExitUsage;
      default: return kExitValidation;
    }
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace qchan
