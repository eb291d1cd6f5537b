#include "qchan/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qchan::sdp {

namespace {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Blocks = std::vector<RMat>;

RMat embed(const ComplexMatrix& m) {
  const auto n = m.rows();
  RMat r(2 * n, 2 * n);
  r.topLeftCorner(n, n) = m.real();
  r.topRightCorner(n, n) = -m.imag();
  r.bottomLeftCorner(n, n) = m.imag();
  r.bottomRightCorner(n, n) = m.real();
  return r;
}

// Inverse of embed(.)/2 for the primal side, the plain inverse for the dual side.
ComplexMatrix recover(const RMat& r, double scale) {
  const auto n = r.rows() / 2;
  ComplexMatrix m(n, n);
  m.real() = scale * (r.topLeftCorner(n, n) + r.bottomRightCorner(n, n));
  m.imag() = scale * (r.bottomLeftCorner(n, n) - r.topRightCorner(n, n));
  return hermitian_part(m);
}

struct RealProblem {
  std::vector<RMat> c;
  std::vector<std::vector<RMat>> a;  // a[i][j]; 0x0 when zero
  RVec b;
  int num_blocks() const { return static_cast<int>(c.size()); }
  int num_constraints() const { return static_cast<int>(a.size()); }
};

double inner(const RMat& x, const RMat& y) { return x.cwiseProduct(y).sum(); }

double inner(const Blocks& x, const Blocks& y) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += inner(x[j], y[j]);
  return s;
}

RVec apply_a(const RealProblem& p, const Blocks& x) {
  RVec out = RVec::Zero(p.num_constraints());
  for (int i = 0; i < p.num_constraints(); ++i)
    for (int j = 0; j < p.num_blocks(); ++j)
      if (p.a[i][j].size() != 0) out(i) += inner(p.a[i][j], x[j]);
  return out;
}

Blocks apply_a_adjoint(const RealProblem& p, const RVec& y) {
  Blocks out;
  for (const auto& c : p.c) out.push_back(RMat::Zero(c.rows(), c.cols()));
  for (int i = 0; i < p.num_constraints(); ++i)
    for (int j = 0; j < p.num_blocks(); ++j)
      if (p.a[i][j].size() != 0) out[j] += y(i) * p.a[i][j];
  return out;
}

double frobenius(const Blocks& x) {
  double s = 0.0;
  for (const auto& m : x) s += m.squaredNorm();
  return std::sqrt(s);
}

RMat sym(const RMat& m) { return 0.5 * (m + m.transpose()); }

[[noreturn]] void breakdown(const char* what, int iter, double pobj, double dobj) {
  std::ostringstream os;
  os << "sdp: " << what << " at iteration " << iter << " (primal " << pobj << ", dual " << dobj << ")";
  throw Error(ErrorCode::NumericalFailure, os.str());
}

// Nesterov-Todd scaling of one block: W = G G^T with W Z W = X and
// G^{-1} X G^{-T} = G^T Z G = diag(d).
struct Scaling {
  RMat g;
  RMat g_inv;
  RVec d;
  RMat w;
};

bool nt_scaling(const RMat& x, const RMat& z, Scaling& out) {
  Eigen::LLT<RMat> lx(x);
  Eigen::LLT<RMat> lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const RMat l = lx.matrixL();
  const RMat r = lz.matrixL();
  Eigen::JacobiSVD<RMat> s(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec sv = s.singularValues();
  if (!(sv.minCoeff() > 0.0) || !sv.allFinite()) return false;
  const RVec half = sv.cwiseSqrt();
  out.d = sv;
  out.g = l * s.matrixV() * half.cwiseInverse().asDiagonal();
  const RMat l_inv = l.triangularView<Eigen::Lower>().solve(RMat::Identity(l.rows(), l.cols()));
  out.g_inv = half.asDiagonal() * s.matrixV().transpose() * l_inv;
  out.w = out.g * out.g.transpose();
  return true;
}

bool positive_definite(const RMat& m) {
  return Eigen::LLT<RMat>(m).info() == Eigen::Success;
}

// Largest alpha in (0, inf] keeping x + alpha dx psd, given chol(x).
double max_step(const RMat& x, const RMat& dx) {
  Eigen::LLT<RMat> lx(x);
  if (lx.info() != Eigen::Success) return 0.0;
  const RMat l = lx.matrixL();
  const auto tl = l.triangularView<Eigen::Lower>();
  RMat t = tl.solve(dx);
  t = tl.solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RMat> es(sym(t), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo < 0.0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
}

double max_step(const Blocks& x, const Blocks& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < x.size(); ++j) a = std::min(a, max_step(x[j], dx[j]));
  return a;
}

void check_independent(const RealProblem& p) {
  const int m = p.num_constraints();
  if (m == 0) return;
  RMat gram(m, m);
  for (int i = 0; i < m; ++i)
    for (int k = i; k < m; ++k) {
      double s = 0.0;
      for (int j = 0; j < p.num_blocks(); ++j)
        if (p.a[i][j].size() != 0 && p.a[k][j].size() != 0) s += inner(p.a[i][j], p.a[k][j]);
      gram(i, k) = gram(k, i) = s;
    }
  Eigen::SelfAdjointEigenSolver<RMat> es(gram, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (!(hi > 0.0) || lo <= 1e-12 * hi) {
    std::ostringstream os;
    os << "sdp: constraint matrices are linearly dependent (Gram eigenvalues " << lo << " .. " << hi << ")";
    throw Error(ErrorCode::DegenerateConstraints, os.str());
  }
}

struct Direction {
  Blocks dx;
  RVec dy;
  Blocks dz;
};

class Solver {
 public:
  Solver(const RealProblem& p, const SdpOptions& o) : p_(p), opt_(o) {}

  SdpSolution run();

 private:
  Direction direction(const Blocks& r, const RVec& rp, const Blocks& rd) const;

  const RealProblem& p_;
  SdpOptions opt_;
  std::vector<Scaling> sc_;
  bool factor_schur(const RMat& schur);

  Eigen::LLT<RMat> schur_;
};

// Retries with a growing relative diagonal shift when rounding breaks
// positive definiteness near the optimum.
bool Solver::factor_schur(const RMat& schur) {
  if (!schur.allFinite()) return false;
  schur_.compute(schur);
  if (schur_.info() == Eigen::Success) return true;
  const double scale = std::max(schur.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (double shift = 1e-15; shift <= 1e-8; shift *= 10.0) {
    RMat shifted = schur;
    shifted.diagonal().array() += shift * scale;
    schur_.compute(shifted);
    if (schur_.info() == Eigen::Success) return true;
  }
  return false;
}

Direction Solver::direction(const Blocks& r, const RVec& rp, const Blocks& rd) const {
  const int nb = p_.num_blocks();
  Blocks wrdw(nb);
  for (int j = 0; j < nb; ++j) wrdw[j] = sc_[j].w * rd[j] * sc_[j].w;
  const RVec rhs = rp - apply_a(p_, r) + apply_a(p_, wrdw);
  Direction dir;
  dir.dy = p_.num_constraints() > 0 ? RVec(schur_.solve(rhs)) : RVec();
  const Blocks aty = apply_a_adjoint(p_, dir.dy);
  dir.dz.resize(nb);
  dir.dx.resize(nb);
  for (int j = 0; j < nb; ++j) {
    dir.dz[j] = sym(rd[j] - aty[j]);
    dir.dx[j] = sym(r[j] - sc_[j].w * dir.dz[j] * sc_[j].w);
  }
  return dir;
}

SdpSolution Solver::run() {
  const int nb = p_.num_blocks();
  const int m = p_.num_constraints();
  double n_total = 0.0;
  for (const auto& c : p_.c) n_total += static_cast<double>(c.rows());

  // scaled-identity start
  double norm_c = frobenius(p_.c);
  double max_a = 0.0;
  double xi = 10.0;
  for (int i = 0; i < m; ++i) {
    double na = 0.0;
    for (int j = 0; j < nb; ++j)
      if (p_.a[i][j].size() != 0) na += p_.a[i][j].squaredNorm();
    na = std::sqrt(na);
    max_a = std::max(max_a, na);
    xi = std::max(xi, std::sqrt(n_total) * (1.0 + std::abs(p_.b(i))) / (1.0 + na));
  }
  const double eta = std::max({10.0, std::sqrt(n_total), norm_c, max_a});
  Blocks x(nb), z(nb);
  for (int j = 0; j < nb; ++j) {
    x[j] = xi * RMat::Identity(p_.c[j].rows(), p_.c[j].cols());
    z[j] = eta * RMat::Identity(p_.c[j].rows(), p_.c[j].cols());
  }
  RVec y = RVec::Zero(m);

  SdpSolution sol;
  sc_.resize(nb);
  int iter = 0;
  for (;; ++iter) {
    const RVec rp = p_.b - apply_a(p_, x);
    Blocks rd(nb);
    const Blocks aty = apply_a_adjoint(p_, y);
    for (int j = 0; j < nb; ++j) rd[j] = p_.c[j] - z[j] - aty[j];
    const double pobj = inner(p_.c, x);
    const double dobj = m ? p_.b.dot(y) : 0.0;
    const double pinf = m ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double dinf = frobenius(rd) / (1.0 + norm_c);
    const double gap = std::abs(pobj - dobj);
    const double mu = inner(x, z) / n_total;

    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(mu))
      breakdown("non-finite iterate", iter, pobj, dobj);

    sol.primal_value = pobj;
    sol.dual_value = dobj;
    sol.gap = gap;
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;
    sol.iterations = iter;

    const bool converged = gap <= opt_.tol * (1.0 + std::abs(pobj)) && pinf <= opt_.tol && dinf <= opt_.tol;
    if (converged) {
      sol.status = SdpStatus::Optimal;
      break;
    }
    if (m && y.cwiseAbs().maxCoeff() > 1.0 / opt_.tol) {
      sol.status = SdpStatus::Infeasible;
      break;
    }
    if (iter >= opt_.max_iter) {
      sol.status = SdpStatus::MaxIter;
      break;
    }

    for (int j = 0; j < nb; ++j)
      if (!nt_scaling(x[j], z[j], sc_[j])) breakdown("scaling factorization failed", iter, pobj, dobj);

    // Schur complement M_ik = <A_i, W A_k W>
    if (m) {
      RMat schur = RMat::Zero(m, m);
      std::vector<RMat> waw(nb);
      for (int k = 0; k < m; ++k) {
        for (int j = 0; j < nb; ++j)
          waw[j] = p_.a[k][j].size() ? RMat(sc_[j].w * p_.a[k][j] * sc_[j].w) : RMat();
        for (int i = 0; i <= k; ++i) {
          double s = 0.0;
          for (int j = 0; j < nb; ++j)
            if (p_.a[i][j].size() && waw[j].size()) s += inner(p_.a[i][j], waw[j]);
          schur(i, k) = schur(k, i) = s;
        }
      }
      if (!factor_schur(schur)) breakdown("Schur complement factorization failed", iter, pobj, dobj);
    }

    // predictor
    Blocks r(nb);
    for (int j = 0; j < nb; ++j) r[j] = -x[j];
    const Direction aff = direction(r, rp, rd);
    const double ap_aff = std::min(1.0, max_step(x, aff.dx));
    const double ad_aff = std::min(1.0, max_step(z, aff.dz));
    double mu_aff = 0.0;
    for (int j = 0; j < nb; ++j)
      mu_aff += inner(RMat(x[j] + ap_aff * aff.dx[j]), RMat(z[j] + ad_aff * aff.dz[j]));
    mu_aff /= n_total;
    const double ratio = std::clamp(mu_aff / mu, 0.0, 1.0);
    const double sigma = std::pow(ratio, 3);

    // corrector in the scaled space
    for (int j = 0; j < nb; ++j) {
      const Scaling& s = sc_[j];
      const RMat dxs = s.g_inv * aff.dx[j] * s.g_inv.transpose();
      const RMat dzs = s.g.transpose() * aff.dz[j] * s.g;
      RMat rc = -sym(dxs * dzs);
      rc.diagonal() += (sigma * mu * RVec::Ones(s.d.size())) - s.d.cwiseProduct(s.d);
      RMat h(rc.rows(), rc.cols());
      for (int a = 0; a < rc.rows(); ++a)
        for (int b = 0; b < rc.cols(); ++b) h(a, b) = 2.0 * rc(a, b) / (s.d(a) + s.d(b));
      r[j] = sym(s.g * h * s.g.transpose());
    }
    const Direction dir = direction(r, rp, rd);
    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    double ap = std::min(1.0, gamma * max_step(x, dir.dx));
    double ad = std::min(1.0, gamma * max_step(z, dir.dz));
    // back off when rounding leaves the new iterate outside the cone
    Blocks xn(nb), zn(nb);
    for (int tries = 0;; ++tries) {
      bool inside = true;
      for (int j = 0; j < nb; ++j) {
        xn[j] = sym(x[j] + ap * dir.dx[j]);
        zn[j] = sym(z[j] + ad * dir.dz[j]);
        inside = inside && positive_definite(xn[j]) && positive_definite(zn[j]);
      }
      if (inside) break;
      if (tries == 30) breakdown("no interior step", iter, pobj, dobj);
      ap *= 0.5;
      ad *= 0.5;
    }
    x.swap(xn);
    z.swap(zn);
    if (m) y += ad * dir.dy;
  }

  for (int j = 0; j < nb; ++j) {
    sol.x.push_back(recover(x[j], 1.0));
    sol.z.push_back(recover(z[j], 0.5));
  }
  sol.y = y;
  return sol;
}

}  // namespace

std::string_view to_string(SdpStatus s) noexcept {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIter: return "max_iter";
    case SdpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  const auto nb = block_dims.size();
  if (nb == 0) throw Error(ErrorCode::DimensionMismatch, "sdp: no blocks");
  if (objective.size() != nb) throw Error(ErrorCode::DimensionMismatch, "sdp: objective block count mismatch");
  for (std::size_t j = 0; j < nb; ++j) {
    if (block_dims[j] < 1 || objective[j].rows() != block_dims[j] || objective[j].cols() != block_dims[j])
      throw Error(ErrorCode::DimensionMismatch, "sdp: objective block has wrong shape");
    if (!is_hermitian(objective[j])) throw Error(ErrorCode::NotHermitian, "sdp: objective block not Hermitian");
  }
  for (const auto& c : constraints) {
    if (c.a.size() != nb) throw Error(ErrorCode::DimensionMismatch, "sdp: constraint block count mismatch");
    for (std::size_t j = 0; j < nb; ++j) {
      if (c.a[j].size() == 0) continue;
      if (c.a[j].rows() != block_dims[j] || c.a[j].cols() != block_dims[j])
        throw Error(ErrorCode::DimensionMismatch, "sdp: constraint block has wrong shape");
      if (!is_hermitian(c.a[j])) throw Error(ErrorCode::NotHermitian, "sdp: constraint block not Hermitian");
    }
  }
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  problem.validate();
  RealProblem rp;
  for (const auto& c : problem.objective) rp.c.push_back(embed(hermitian_part(c)));
  rp.b.resize(static_cast<Eigen::Index>(problem.constraints.size()));
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    std::vector<RMat> row;
    for (const auto& a : problem.constraints[i].a) row.push_back(a.size() ? embed(hermitian_part(a)) : RMat());
    rp.a.push_back(std::move(row));
    rp.b(static_cast<Eigen::Index>(i)) = problem.constraints[i].b;
  }
  check_independent(rp);
  return Solver(rp, options).run();
}

int LmiProblem::add_variable(double objective_coefficient) {
  objective_.push_back(objective_coefficient);
  return num_variables() - 1;
}

int LmiProblem::add_block(ComplexMatrix constant) {
  if (!is_square(constant) || constant.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch, "lmi: block must be square and nonempty");
  constants_.push_back(std::move(constant));
  return num_blocks() - 1;
}

void LmiProblem::add_term(int block, int var, const ComplexMatrix& coefficient) {
  if (block < 0 || block >= num_blocks() || var < 0 || var >= num_variables())
    throw Error(ErrorCode::DimensionMismatch, "lmi: block or variable index out of range");
  if (coefficient.rows() != constants_[block].rows() || coefficient.cols() != constants_[block].cols())
    throw Error(ErrorCode::DimensionMismatch, "lmi: coefficient shape does not match block");
  auto [it, fresh] = terms_.try_emplace({block, var}, coefficient);
  if (!fresh) it->second += coefficient;
}

SdpProblem LmiProblem::to_standard() const {
  SdpProblem p;
  for (const auto& c : constants_) {
    p.block_dims.push_back(static_cast<int>(c.rows()));
    p.objective.push_back(c);
  }
  p.constraints.resize(objective_.size());
  for (std::size_t i = 0; i < objective_.size(); ++i) {
    p.constraints[i].a.assign(constants_.size(), ComplexMatrix());
    p.constraints[i].b = objective_[i];
  }
  for (const auto& [key, coeff] : terms_) p.constraints[key.second].a[key.first] = -coeff;
  return p;
}

LmiSolution solve(const LmiProblem& problem, const SdpOptions& options) {
  LmiSolution out;
  out.raw = solve(problem.to_standard(), options);
  out.y = out.raw.y;
  out.value = out.raw.dual_value;
  out.multipliers = out.raw.x;
  return out;
}

std::vector<ComplexMatrix> hermitian_basis(int n) {
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) basis.push_back(matrix_unit(n, n, k, k));
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(k, l) = s(l, k) = r;
      basis.push_back(s);
      ComplexMatrix a = ComplexMatrix::Zero(n, n);
      a(k, l) = Complex(0, -r);
      a(l, k) = Complex(0, r);
      basis.push_back(a);
    }
  return basis;
}

}  // namespace qchan::sdp
