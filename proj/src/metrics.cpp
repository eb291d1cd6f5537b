#include "qchan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qchan {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

// Trace norm and a norm-attaining contraction S (||S|| <= 1, Re tr(S^* m) = ||m||_1).
struct Dual {
  double norm;
  ComplexMatrix s;
};

Dual trace_dual(const ComplexMatrix& m, bool hermitian) {
  if (hermitian) {
    const EigResult e = eig_hermitian(hermitian_part(m), 1e300);
    RealVector sign(e.values.size());
    for (int i = 0; i < e.values.size(); ++i) sign(i) = e.values(i) < 0.0 ? -1.0 : 1.0;
    return {e.values.cwiseAbs().sum(), e.vectors * sign.cast<Complex>().asDiagonal() * e.vectors.adjoint()};
  }
  const SvdResult s = svd(m);
  return {s.s.sum(), s.u * s.w.adjoint()};
}

ComplexVector top_eigenvector(const ComplexMatrix& m) {
  const EigResult e = eig_hermitian(hermitian_part(m), 1e300);
  return e.vectors.col(e.values.size() - 1);
}

ComplexVector random_unit_vector(int n, RngStream& rng) {
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

struct Ascent {
  double value = 0.0;
  ComplexVector psi;
  ComplexVector phi;
  int iterations = 0;
  bool converged = false;
};

// Alternating maximization of ||forward(psi phi^*)||_1. With `rank_one_states`
// phi = psi and the update is the top eigenvector of Re backward(S); otherwise
// (psi, phi) is the top singular pair of backward(S). Each step cannot decrease
// the objective.
using Forward = std::function<ComplexMatrix(const ComplexMatrix&)>;

Ascent ascend(const Forward& forward, const Forward& backward, int n, bool rank_one_states, bool hermitian_out,
              const OptimizerOptions& opt, RngStream& rng) {
  Ascent a;
  a.psi = random_unit_vector(n, rng);
  a.phi = rank_one_states ? a.psi : random_unit_vector(n, rng);
  Dual d = trace_dual(forward(a.psi * a.phi.adjoint()), hermitian_out && rank_one_states);
  a.value = d.norm;
  for (a.iterations = 0; a.iterations < opt.max_iter;) {
    ++a.iterations;
    const ComplexMatrix m = backward(d.s);
    ComplexVector psi, phi;
    if (rank_one_states) {
      psi = top_eigenvector(m);
      phi = psi;
    } else {
      const SvdResult s = svd(m);
      psi = s.u.col(0);
      phi = s.w.col(0);
    }
    const Dual next = trace_dual(forward(psi * phi.adjoint()), hermitian_out && rank_one_states);
    const double gain = next.norm - a.value;
    if (gain > 0.0) {
      a.psi = psi;
      a.phi = phi;
      a.value = next.norm;
      d = next;
    }
    if (gain < opt.step_tol) {
      a.converged = true;
      break;
    }
  }
  return a;
}

struct MultistartOutcome {
  Ascent best;
  MultistartStats stats;
};

MultistartOutcome multistart(const Forward& forward, const Forward& backward, int n, bool rank_one_states,
                             bool hermitian_out, const OptimizerOptions& opt) {
  require(opt.starts >= 1, ErrorCode::BadParameters, "multistart needs at least one start");
  const RngStream master(opt.seed, 0x6d756c7469ULL);
  std::vector<Ascent> runs;
  runs.reserve(static_cast<std::size_t>(opt.starts));
  for (int k = 0; k < opt.starts; ++k) {
    RngStream rng = master.derive(static_cast<std::uint64_t>(k));
    runs.push_back(ascend(forward, backward, n, rank_one_states, hermitian_out, opt, rng));
  }
  MultistartOutcome out;
  out.stats.starts = opt.starts;
  out.stats.worst = runs.front().value;
  for (int k = 0; k < opt.starts; ++k) {
    const Ascent& r = runs[k];
    out.stats.total_iterations += r.iterations;
    out.stats.converged += r.converged ? 1 : 0;
    out.stats.worst = std::min(out.stats.worst, r.value);
    if (out.stats.best_start < 0 || r.value > out.stats.best) {
      out.stats.best = r.value;
      out.stats.best_start = k;
    }
  }
  for (const Ascent& r : runs) out.stats.hits += r.value >= out.stats.best - 1e-8 ? 1 : 0;
  out.best = runs[static_cast<std::size_t>(out.stats.best_start)];
  return out;
}

SdpCertificate certificate_of(const sdp::SdpSolution& s) {
  return {s.primal_value, s.dual_value, s.gap, s.iterations, s.status};
}

// ||Delta||_cb = min ||tr_B Y|| s.t. Y >= J, Y >= -J (Hermiticity preserving).
DistanceResult diamond_sdp_hp(const LinearMap& delta, double tol) {
  const int da = delta.d_in(), db = delta.d_out(), n = da * db;
  const ComplexMatrix j = hermitian_part(delta.choi());
  sdp::LmiProblem lmi;
  const int t = lmi.add_variable(-1.0);
  const int upper = lmi.add_block(-j);
  const int lower = lmi.add_block(j);
  const int reduced = lmi.add_block(ComplexMatrix::Zero(da, da));
  lmi.add_term(reduced, t, identity(da));
  for (const ComplexMatrix& h : sdp::hermitian_basis(n)) {
    const int y = lmi.add_variable(0.0);
    lmi.add_term(upper, y, h);
    lmi.add_term(lower, y, h);
    const ComplexMatrix r = partial_trace(h, da, db, Keep::First);
    if (r.norm() > 0.0) lmi.add_term(reduced, y, -r);
  }
  const sdp::LmiSolution s = sdp::solve(lmi, {tol, 100});
  DistanceResult out;
  out.value = std::max(0.0, -0.5 * (s.raw.primal_value + s.raw.dual_value));
  out.sdp = certificate_of(s.raw);
  const ComplexMatrix rho = s.multipliers[reduced] / s.multipliers[reduced].trace().real();
  out.witness_state = rho;
  const ComplexMatrix root = psd_sqrt(rho);
  ComplexVector psi = ComplexVector::Zero(da * da);
  for (int i = 0; i < da; ++i) psi += tensor(ComplexVector(root.col(i)), basis_vector(da, i));
  out.witness = psi / psi.norm();
  return out;
}

// General maps: min (||tr_B Y0|| + ||tr_B Y1||)/2 s.t. [[Y0, -J], [-J^*, Y1]] >= 0.
DistanceResult diamond_sdp_general(const LinearMap& delta, double tol) {
  const int da = delta.d_in(), db = delta.d_out(), n = da * db;
  const ComplexMatrix& j = delta.choi();
  sdp::LmiProblem lmi;
  const int t0 = lmi.add_variable(-0.5);
  const int t1 = lmi.add_variable(-0.5);
  ComplexMatrix coupling = ComplexMatrix::Zero(2 * n, 2 * n);
  coupling.topRightCorner(n, n) = -j;
  coupling.bottomLeftCorner(n, n) = -j.adjoint();
  const int big = lmi.add_block(coupling);
  const int r0 = lmi.add_block(ComplexMatrix::Zero(da, da));
  const int r1 = lmi.add_block(ComplexMatrix::Zero(da, da));
  lmi.add_term(r0, t0, identity(da));
  lmi.add_term(r1, t1, identity(da));
  for (int side = 0; side < 2; ++side)
    for (const ComplexMatrix& h : sdp::hermitian_basis(n)) {
      const int y = lmi.add_variable(0.0);
      ComplexMatrix placed = ComplexMatrix::Zero(2 * n, 2 * n);
      placed.block(side * n, side * n, n, n) = h;
      lmi.add_term(big, y, placed);
      const ComplexMatrix r = partial_trace(h, da, db, Keep::First);
      if (r.norm() > 0.0) lmi.add_term(side == 0 ? r0 : r1, y, -r);
    }
  const sdp::LmiSolution s = sdp::solve(lmi, {tol, 100});
  DistanceResult out;
  out.value = std::max(0.0, -0.5 * (s.raw.primal_value + s.raw.dual_value));
  out.sdp = certificate_of(s.raw);
  out.witness_state = s.multipliers[r0] / s.multipliers[r0].trace().real();
  return out;
}

DistanceResult diamond_variational(const LinearMap& delta, const OptimizerOptions& opt) {
  const int d = delta.d_in();
  const Forward fwd = [&](const ComplexMatrix& x) { return delta.apply_stabilized(x, d); };
  const Forward bwd = [&](const ComplexMatrix& s) { return delta.adjoint_stabilized(s, d); };
  const MultistartOutcome m = multistart(fwd, bwd, d * d, true, true, opt);
  DistanceResult out;
  out.value = m.best.value;
  out.multistart = m.stats;
  out.witness = m.best.psi;
  return out;
}

ComplexMatrix pad_rows_env(const ComplexMatrix& v, int d_b, int d_e, int new_d_e) {
  ComplexMatrix out = ComplexMatrix::Zero(d_b * new_d_e, v.cols());
  for (int b = 0; b < d_b; ++b) out.middleRows(b * new_d_e, d_e) = v.middleRows(b * d_e, d_e);
  return out;
}

// V2^* (1_B (x) E_kl) V1 for the matrix unit E_kl: E1 -> E2.
ComplexMatrix sandwich_unit(const StinespringDilation& d1, const StinespringDilation& d2, int k, int l) {
  ComplexMatrix w = ComplexMatrix::Zero(d1.d_a, d1.d_a);
  for (int b = 0; b < d1.d_b; ++b) w += d2.v.row(b * d2.d_e + k).adjoint() * d1.v.row(b * d1.d_e + l);
  return w;
}

// Unitary U on C^n, n = max(d1, d2) + #defects, whose top-left d2 x d1 block is
// the contraction c (singular values within snap of 1 are rounded up to 1).
ComplexMatrix unitary_completion(const ComplexMatrix& c, double snap) {
  const int d2 = static_cast<int>(c.rows()), d1 = static_cast<int>(c.cols()), k = std::min(d1, d2);
  Eigen::JacobiSVD<ComplexMatrix> s(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexMatrix p = s.matrixU();  // d2 x d2
  const ComplexMatrix q = s.matrixV();  // d1 x d1
  const RealVector sv = s.singularValues();
  std::vector<int> defects;
  for (int i = 0; i < k; ++i)
    if (sv(i) < 1.0 - snap) defects.push_back(i);
  const int nd = static_cast<int>(defects.size());
  const int n = std::max(d1, d2) + nd;
  ComplexMatrix core = ComplexMatrix::Zero(n, n);  // rows: output basis, cols: input basis
  for (int i = 0; i < k; ++i) core(i, i) = 1.0;
  for (int j = 0; j < nd; ++j) {
    const int i = defects[j];
    const double sig = std::clamp(sv(i), 0.0, 1.0);
    const double co = std::sqrt(1.0 - sig * sig);
    core(i, i) = sig;
    core(d2 + j, i) = co;
    core(i, d1 + j) = co;
    core(d2 + j, d1 + j) = -sig;
  }
  for (int i = k; i < d1; ++i) core(d2 + nd + (i - k), i) = 1.0;
  for (int i = k; i < d2; ++i) core(i, d1 + nd + (i - k)) = 1.0;
  ComplexMatrix out_basis = identity(n), in_basis = identity(n);
  out_basis.topLeftCorner(d2, d2) = p;
  in_basis.topLeftCorner(d1, d1) = q;
  return out_basis * core * in_basis.adjoint();
}

}  // namespace

double stabilized_trace_norm(const LinearMap& delta, const ComplexVector& psi) {
  const int d = delta.d_in();
  require(psi.size() == d * d, ErrorCode::DimensionMismatch, "stabilized input has wrong length");
  return trace_norm(delta.apply_stabilized(psi * psi.adjoint(), d));
}

DistanceResult induced_distance(const LinearMap& a, const LinearMap& b, DistanceMode mode,
                                const OptimizerOptions& opt) {
  require(a.d_in() == b.d_in() && a.d_out() == b.d_out(), ErrorCode::DimensionMismatch,
          "induced_distance: maps have different dimensions");
  const LinearMap delta = a - b;
  const bool hp = delta.is_hermiticity_preserving();
  const Forward fwd = [&](const ComplexMatrix& x) { return delta.apply(x); };
  const Forward bwd = [&](const ComplexMatrix& s) { return delta.adjoint(s); };
  const MultistartOutcome m = multistart(fwd, bwd, delta.d_in(), mode == DistanceMode::States, hp, opt);
  DistanceResult out;
  out.value = m.best.value;
  out.multistart = m.stats;
  out.witness = m.best.psi;
  out.witness_phi = m.best.phi;
  return out;
}

DistanceResult diamond_norm(const LinearMap& delta, DiamondMethod method, const OptimizerOptions& opt,
                            double sdp_tol) {
  const bool hp = delta.is_hermiticity_preserving();
  if (method != DiamondMethod::Sdp)
    require(hp, ErrorCode::NotHermiticityPreserving,
            "variational diamond norm needs a Hermiticity-preserving map (use the sdp method)");
  if (method == DiamondMethod::Variational) return diamond_variational(delta, opt);
  DistanceResult out = hp ? diamond_sdp_hp(delta, sdp_tol) : diamond_sdp_general(delta, sdp_tol);
  if (method == DiamondMethod::Both) {
    const DistanceResult v = diamond_variational(delta, opt);
    out.variational_value = v.value;
    out.multistart = v.multistart;
    out.flagged = std::abs(v.value - out.value) > 1e-6;
    if (out.witness.size() == 0) out.witness = v.witness;
  }
  return out;
}

double dilation_overlap(const StinespringDilation& d1, const StinespringDilation& d2, const ComplexMatrix& rho) {
  require(d1.d_a == d2.d_a && d1.d_b == d2.d_b, ErrorCode::DimensionMismatch, "dilations act between different spaces");
  // tr_B(V2 rho V1^*) as a d_E2 x d_E1 matrix
  const ComplexMatrix m = d2.v * rho * d1.v.adjoint();
  ComplexMatrix r = ComplexMatrix::Zero(d2.d_e, d1.d_e);
  for (int b = 0; b < d1.d_b; ++b) r += m.block(b * d2.d_e, b * d1.d_e, d2.d_e, d1.d_e);
  return trace_norm(r);
}

FidelityResult dilation_fidelity(const StinespringDilation& d1, const StinespringDilation& d2, double sdp_tol) {
  require(d1.d_a == d2.d_a && d1.d_b == d2.d_b, ErrorCode::DimensionMismatch,
          "fidelity: channels act between different spaces");
  d1.validate();
  d2.validate();
  const int da = d1.d_a, e1 = d1.d_e, e2 = d2.d_e;

  sdp::LmiProblem lmi;
  const int s = lmi.add_variable(1.0);
  const int spectral = lmi.add_block(ComplexMatrix::Zero(da, da));
  const int ball = lmi.add_block(identity(e1 + e2));
  lmi.add_term(spectral, s, -identity(da));
  std::vector<int> re(static_cast<std::size_t>(e1 * e2)), im(re.size());
  for (int k = 0; k < e2; ++k)
    for (int l = 0; l < e1; ++l) {
      const ComplexMatrix w = sandwich_unit(d1, d2, k, l);
      const std::size_t idx = static_cast<std::size_t>(k * e1 + l);
      re[idx] = lmi.add_variable(0.0);
      lmi.add_term(spectral, re[idx], hermitian_part(w));
      ComplexMatrix unit = ComplexMatrix::Zero(e1 + e2, e1 + e2);
      unit(k, e2 + l) = 1.0;
      unit(e2 + l, k) = 1.0;
      lmi.add_term(ball, re[idx], unit);
      im[idx] = lmi.add_variable(0.0);
      lmi.add_term(spectral, im[idx], hermitian_part(Complex(0, 1) * w));
      unit(k, e2 + l) = Complex(0, 1);
      unit(e2 + l, k) = Complex(0, -1);
      lmi.add_term(ball, im[idx], unit);
    }
  const sdp::LmiSolution sol = sdp::solve(lmi, {sdp_tol, 100});

  FidelityResult out;
  out.certificate = certificate_of(sol.raw);
  out.value = std::clamp(0.5 * (sol.raw.primal_value + sol.raw.dual_value), 0.0, 1.0);
  ComplexMatrix c(e2, e1);
  for (int k = 0; k < e2; ++k)
    for (int l = 0; l < e1; ++l) {
      const std::size_t idx = static_cast<std::size_t>(k * e1 + l);
      c(k, l) = Complex(sol.y(re[idx]), sol.y(im[idx]));
    }
  out.contraction = c;
  out.input_state = sol.multipliers[spectral] / sol.multipliers[spectral].trace().real();
  out.witness = purify(DensityMatrix(hermitian_part(out.input_state), 1e-6)).vector();
  out.u = unitary_completion(c, 1e-10);
  const int n = static_cast<int>(out.u.rows());
  out.dilation1 = {pad_rows_env(d1.v, d1.d_b, e1, n), da, d1.d_b, n};
  out.dilation2 = {pad_rows_env(d2.v, d2.d_b, e2, n), da, d2.d_b, n};
  return out;
}

FidelityResult channel_fidelity(const Channel& t1, const Channel& t2, double sdp_tol) {
  require(t1.d_in() == t2.d_in() && t1.d_out() == t2.d_out(), ErrorCode::DimensionMismatch,
          "fidelity: channels have different dimensions");
  return dilation_fidelity(to_stinespring(t1), to_stinespring(t2), sdp_tol);
}

double von_neumann_entropy(const ComplexMatrix& rho) {
  const EigResult e = eig_hermitian(rho);
  double s = 0.0;
  for (int i = 0; i < e.values.size(); ++i) {
    const double l = e.values(i);
    if (l > 1e-12) s -= l * std::log2(l);
  }
  return std::max(0.0, s);
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

double holevo_chi(const Ensemble& e, const Channel& t) {
  require(e.dim() == t.d_in(), ErrorCode::DimensionMismatch, "holevo_chi: ensemble and channel dimensions differ");
  ComplexMatrix avg = ComplexMatrix::Zero(t.d_out(), t.d_out());
  double mean_entropy = 0.0;
  for (std::size_t i = 0; i < e.states.size(); ++i) {
    const ComplexMatrix out = t.apply(e.states[i].matrix());
    avg += e.weights[i] * out;
    mean_entropy += e.weights[i] * von_neumann_entropy(out);
  }
  return std::max(0.0, von_neumann_entropy(avg) - mean_entropy);
}

double coherent_info(const Channel& t, const DensityMatrix& rho) {
  require(rho.dim() == t.d_in(), ErrorCode::DimensionMismatch, "coherent_info: state and channel dimensions differ");
  const int d = rho.dim();
  const ComplexMatrix joint_in = swap_factors(purify(rho).projector(), d, d);  // reference first
  const ComplexMatrix joint_out = t.map().apply_stabilized(joint_in, d);
  return von_neumann_entropy(t.apply(rho.matrix())) - von_neumann_entropy(joint_out);
}

double channel_fidelity_fc(const Channel& r) {
  require(r.d_in() == r.d_out(), ErrorCode::DimensionMismatch, "channel fidelity F_c needs d_in = d_out");
  const ComplexVector omega = maximally_entangled(r.d_in());
  return omega.dot(jamiolkowski_state(r) * omega).real();
}

}  // namespace qchan
