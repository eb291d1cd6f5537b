#include "qchan/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "qchan/continuity.hpp"
#include "qchan/tradeoff.hpp"

namespace qchan {

namespace {

// Runs body(0..n-1) on a small thread pool; the first exception is rethrown.
template <class Body>
void parallel_for(int n, Body&& body) {
  const int workers = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex guard;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void bad_parameters(const std::string& what) { throw Error(ErrorCode::BadParameters, what); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

bool ExperimentReport::all_passed() const {
  for (const auto& [key, value] : verdicts.items())
    if (!value.get<bool>()) return false;
  return true;
}

Json ExperimentReport::to_json() const {
  Json out;
  out["experiment"] = name;
  out["version"] = kVersion;
  out["parameters"] = parameters;
  out["seed"] = seed;
  out["tolerances"] = tolerances;
  out["columns"] = columns;
  out["rows"] = rows;
  out["verdicts"] = verdicts;
  out["summary"] = summary;
  out["wall_seconds"] = wall_seconds;
  return out;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format(row[c], "%.17g");
    os << '\n';
  }
  return os.str();
}

std::string ExperimentReport::to_table() const {
  std::ostringstream os;
  os << name << " (seed " << seed << ", " << format(wall_seconds, "%.2f") << " s)\n";
  for (const auto& c : columns) {
    const std::string head = c.substr(0, 15);
    os << head << std::string(16 - head.size(), ' ');
  }
  os << '\n';
  for (const auto& row : rows) {
    for (double v : row) os << format(v, "%-15.8g") << ' ';
    os << '\n';
  }
  for (const auto& [key, value] : verdicts.items()) os << (value.get<bool>() ? "PASS " : "FAIL ") << key << '\n';
  for (const auto& [key, value] : summary.items()) os << key << ": " << value.dump() << '\n';
  return os.str();
}

ExperimentReport experiment_separation(const SeparationOptions& opt) {
  if (opt.nu_min < 2 || opt.nu_max < opt.nu_min) bad_parameters("separation needs 2 <= nu_min <= nu_max");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "separation";
  r.seed = opt.optimizer.seed;
  r.parameters = {{"nu_min", opt.nu_min}, {"nu_max", opt.nu_max}, {"sdp_max_nu", opt.sdp_max_nu},
                  {"starts", opt.optimizer.starts}, {"max_iter", opt.optimizer.max_iter}};
  r.tolerances = {{"sdp", opt.sdp_tol}, {"upper_slack", 1e-7}, {"lower_slack", 1e-6},
                  {"step", opt.optimizer.step_tol}};
  r.columns = {"nu", "induced_states", "bound_upper", "diamond", "bound_lower", "diamond_is_sdp"};
  const int n = opt.nu_max - opt.nu_min + 1;
  r.rows.resize(static_cast<std::size_t>(n));
  parallel_for(n, [&](int i) {
    const int nu = opt.nu_min + i;
    const double p = 1.0 / (nu + 1);
    const Channel t = t_family(nu, p);
    const Channel s = completely_depolarizing(nu);
    OptimizerOptions o = opt.optimizer;
    o.seed = opt.optimizer.seed + static_cast<std::uint64_t>(nu);
    const double induced = induced_distance(t.map(), s.map(), DistanceMode::States, o).value;
    const bool sdp = nu <= opt.sdp_max_nu;
    const double diamond =
        diamond_norm(t.map() - s.map(), sdp ? DiamondMethod::Sdp : DiamondMethod::Variational, o, opt.sdp_tol).value;
    r.rows[static_cast<std::size_t>(i)] = {static_cast<double>(nu), induced, 2.0 / (nu + 1), diamond,
                                           (nu - 1.0) / (nu + 1), sdp ? 1.0 : 0.0};
  });
  bool upper = true, lower = true;
  for (const auto& row : r.rows) {
    upper = upper && row[1] <= row[2] + 1e-7;
    lower = lower && row[3] >= row[4] - 1e-6;
  }
  r.verdicts = {{"induced <= 2/(nu+1)", upper}, {"diamond >= (nu-1)/(nu+1)", lower}};
  r.wall_seconds = seconds_since(start);
  return r;
}

double randomizing_epsilon(const Channel& r, int starts, int max_iter, RngStream& rng) {
  const int nu = r.d_in();
  double best = 0.0;
  for (int s = 0; s < starts; ++s) {
    RngStream local = rng.derive(static_cast<std::uint64_t>(s));
    ComplexVector psi(nu);
    for (int i = 0; i < nu; ++i) psi(i) = local.complex_normal();
    psi.normalize();
    double value = -1.0;
    for (int it = 0; it < max_iter; ++it) {
      const EigResult out = eig_hermitian(hermitian_part(r.apply(psi * psi.adjoint())), 1e-8);
      const double top = out.values(nu - 1);
      if (top - value < 1e-10) break;
      value = top;
      const ComplexVector v = out.vectors.col(nu - 1);
      const EigResult back =
          eig_hermitian(hermitian_part(r.apply(v * v.adjoint(), Picture::Heisenberg)), 1e-8);
      psi = back.vectors.col(nu - 1);
    }
    const RealVector ev = eig_hermitian(hermitian_part(r.apply(psi * psi.adjoint())), 1e-8).values;
    best = std::max(best, std::max(ev(nu - 1) - 1.0 / nu, 1.0 / nu - ev(0)));
  }
  return nu * best;
}

ExperimentReport experiment_randomizing(const RandomizingOptions& opt) {
  if (opt.nu < 2 || opt.mu < 1 || opt.mu > opt.nu * opt.nu) bad_parameters("randomizing needs nu >= 2 and 1 <= mu <= nu^2");
  if (opt.trials < 1) bad_parameters("randomizing needs at least one trial");
  if (opt.weyl && opt.mu != opt.nu * opt.nu) bad_parameters("the clock-and-shift basis needs mu = nu^2");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "randomizing";
  r.seed = opt.seed;
  r.parameters = {{"nu", opt.nu}, {"mu", opt.mu}, {"trials", opt.trials}, {"weyl", opt.weyl},
                  {"starts", opt.starts}, {"max_iter", opt.max_iter}};
  r.tolerances = {{"witness_slack", 1e-9}};
  r.columns = {"trial", "witness", "witness_bound", "epsilon_estimate"};
  const double bound = 2.0 * (1.0 - static_cast<double>(opt.mu) / (opt.nu * opt.nu));
  const RngStream root(opt.seed);
  r.rows.resize(static_cast<std::size_t>(opt.trials));
  parallel_for(opt.trials, [&](int k) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(k));
    const Channel ch = opt.weyl ? random_unitary_mix(weyl_unitaries(opt.nu)) : random_unitary_mix(opt.nu, opt.mu, rng);
    const ComplexMatrix omega = jamiolkowski_state(ch.map());
    const double witness = trace_norm(omega - identity(opt.nu * opt.nu) / static_cast<double>(opt.nu * opt.nu));
    RngStream ascent = rng.derive(0x657073);
    const double eps = randomizing_epsilon(ch, opt.starts, opt.max_iter, ascent);
    r.rows[static_cast<std::size_t>(k)] = {static_cast<double>(k), witness, bound, eps};
  });
  bool witnesses = true;
  int small_eps = 0;
  double min_witness = 2.0, max_eps = 0.0;
  for (const auto& row : r.rows) {
    witnesses = witnesses && row[1] >= row[2] - 1e-9;
    if (row[3] <= 1.0) ++small_eps;
    min_witness = std::min(min_witness, row[1]);
    max_eps = std::max(max_eps, row[3]);
  }
  r.verdicts = {{"witness >= 2(1 - mu/nu^2)", witnesses}};
  r.summary = {{"min_witness", min_witness},
               {"max_epsilon_estimate", max_eps},
               {"trials_with_epsilon_estimate_le_1", small_eps},
               {"epsilon_note", "ascent estimate over pure inputs, not a certificate"}};
  r.wall_seconds = seconds_since(start);
  return r;
}

ExperimentReport experiment_sweep(const SweepOptions& opt) {
  if (opt.pairs < 0) bad_parameters("sweep needs a non-negative pair count");
  if (opt.dim < 2 || opt.dim > 3) bad_parameters("sweep dimension must be 2 or 3");
  if (opt.max_rank < 1 || opt.max_rank > 9) bad_parameters("sweep Kraus rank must be between 1 and 9");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.name = "sweep";
  r.seed = opt.seed;
  r.parameters = {{"pairs", opt.pairs}, {"dim", opt.dim}, {"max_rank", opt.max_rank}, {"tradeoff", opt.tradeoff},
                  {"starts", opt.optimizer.starts}, {"max_iter", opt.optimizer.max_iter}};
  r.tolerances = {{"sdp", opt.sdp_tol}, {"continuity_slack", 1e-6}, {"tradeoff_slack", 1e-5}};
  r.columns = {"pair",           "fidelity",       "cb",           "gap",           "fidelity_left",
               "fidelity_right", "continuity_left", "continuity_right", "bures_identity", "tradeoff_left",
               "tradeoff_right", "tradeoff_constructive"};
  const RngStream root(opt.seed);
  r.rows.resize(static_cast<std::size_t>(opt.pairs));
  const int d = opt.dim;
  const int min_rank = (d + d - 1) / d;
  parallel_for(opt.pairs, [&](int k) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(k));
    const int r1 = min_rank + static_cast<int>(rng.uniform() * (opt.max_rank - min_rank + 1));
    const int r2 = min_rank + static_cast<int>(rng.uniform() * (opt.max_rank - min_rank + 1));
    const Channel a = random_channel(d, d, std::min(r1, opt.max_rank), rng);
    const Channel b = random_channel(d, d, std::min(r2, opt.max_rank), rng);
    OptimizerOptions o = opt.optimizer;
    o.seed = opt.seed * 1000003u + static_cast<std::uint64_t>(k);
    const ContinuityReport c = verify_continuity(a, b, o, opt.sdp_tol);
    const double f = c.fidelity, half = 0.5 * c.cb;
    std::vector<double> row = {static_cast<double>(k),
                               f,
                               c.cb,
                               c.gap,
                               half - (1.0 - f),
                               std::sqrt(std::max(0.0, 1.0 - f * f)) - half,
                               c.left_residual,
                               c.right_residual,
                               c.identity_residual,
                               0.0,
                               0.0,
                               0.0};
    if (opt.tradeoff) {
      const TradeoffReport t = verify_tradeoff(a, std::nullopt, opt.sdp_tol);
      row[9] = t.left_residual;
      row[10] = std::min(t.right_residual, t.sigma_right_residual);
      row[11] = t.constructive_residual;
    }
    r.rows[static_cast<std::size_t>(k)] = std::move(row);
  });

  int lemma = 0, theorem = 0, bures = 0, tradeoff = 0;
  double worst_lemma = 0.0, worst_theorem = 0.0, worst_bures = 0.0, worst_tradeoff = 0.0;
  for (const auto& row : r.rows) {
    const double l = std::min(row[4], row[5]), t = std::min(row[6], row[7]);
    const double tr = std::min({row[9], row[10], row[11]});
    lemma += l < -1e-6;
    theorem += t < -1e-6;
    bures += row[8] > 1e-6;
    tradeoff += tr < -1e-5;
    worst_lemma = std::min(worst_lemma, l);
    worst_theorem = std::min(worst_theorem, t);
    worst_bures = std::max(worst_bures, row[8]);
    worst_tradeoff = std::min(worst_tradeoff, tr);
  }
  r.verdicts = {{"fidelity sandwich", lemma == 0},
                {"dilation gap sandwich", theorem == 0},
                {"Bures identity", bures == 0},
                {"tradeoff", tradeoff == 0}};
  r.summary = {{"violations", {{"fidelity_sandwich", lemma}, {"gap_sandwich", theorem}, {"bures_identity", bures},
                               {"tradeoff", tradeoff}}},
               {"worst_residual", {{"fidelity_sandwich", worst_lemma}, {"gap_sandwich", worst_theorem},
                                   {"bures_identity", worst_bures}, {"tradeoff", worst_tradeoff}}}};
  r.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace qchan
