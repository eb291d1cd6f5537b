#include "qchan/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qchan {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus, int d_in, int d_out) {
  ComplexMatrix j = ComplexMatrix::Zero(d_in * d_out, d_in * d_out);
  ComplexVector vec(d_in * d_out);
  for (const auto& k : kraus) {
    for (int i = 0; i < d_in; ++i) vec.segment(i * d_out, d_out) = k.col(i);
    j.noalias() += vec * vec.adjoint();
  }
  return j;
}

// -1 / 0 / +1 lexicographic order on (re, im) of each entry.
int lexicographic_compare(const ComplexVector& a, const ComplexVector& b, double tol) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i).real() - b(i).real()) > tol) return a(i).real() < b(i).real() ? -1 : 1;
    if (std::abs(a(i).imag() - b(i).imag()) > tol) return a(i).imag() < b(i).imag() ? -1 : 1;
  }
  return 0;
}

struct ChoiSpectrum {
  std::vector<double> values;          // descending, above the rank threshold
  std::vector<ComplexVector> vectors;  // phase-normalized
};

ChoiSpectrum ranked_choi_spectrum(const LinearMap& map, double tol) {
  const ComplexMatrix& j = map.choi();
  if (!is_hermitian(j, tol))
    throw Error(ErrorCode::NotCP, "Choi matrix is not Hermitian");
  const EigResult e = eig_hermitian(j, tol);
  const double lmin = e.values.minCoeff();
  const double lmax = e.values.maxCoeff();
  if (lmin < -tol)
    throw Error(ErrorCode::NotCP, "Choi matrix has eigenvalue " + std::to_string(lmin));

  const double threshold = 1e-10 * std::max(lmax, 0.0);
  std::vector<int> idx;
  for (int k = 0; k < e.values.size(); ++k)
    if (e.values(k) > threshold) idx.push_back(k);

  std::vector<ComplexVector> normalized(e.values.size());
  for (int k : idx) normalized[k] = phase_normalized(e.vectors.col(k), 1e-8);

  const double tie = 1e-10 * std::max(lmax, 1.0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (std::abs(e.values(a) - e.values(b)) > tie) return e.values(a) > e.values(b);
    return lexicographic_compare(normalized[a], normalized[b], 1e-9) < 0;
  });

  ChoiSpectrum out;
  for (int k : idx) {
    out.values.push_back(e.values(k));
    out.vectors.push_back(normalized[k]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearMap

LinearMap::LinearMap(int d_in, int d_out, ComplexMatrix choi)
    : d_in_(d_in), d_out_(d_out), choi_(std::move(choi)) {
  require(d_in > 0 && d_out > 0, ErrorCode::DimensionMismatch, "map dimensions must be positive");
  require(choi_.rows() == d_in * d_out && choi_.cols() == d_in * d_out, ErrorCode::DimensionMismatch,
          "Choi matrix must be (d_in*d_out) square");
}

bool LinearMap::is_hermiticity_preserving(double tol) const { return is_hermitian(choi_, tol); }

double LinearMap::min_choi_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(choi_), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

ComplexMatrix LinearMap::apply(const ComplexMatrix& x, Picture picture) const {
  if (picture == Picture::Schrodinger) {
    require(x.rows() == d_in_ && x.cols() == d_in_, ErrorCode::DimensionMismatch,
            "Schroedinger input must be d_in x d_in");
    ComplexMatrix out = ComplexMatrix::Zero(d_out_, d_out_);
    for (int i = 0; i < d_in_; ++i)
      for (int j = 0; j < d_in_; ++j)
        if (x(i, j) != Complex(0.0)) out += x(i, j) * choi_.block(i * d_out_, j * d_out_, d_out_, d_out_);
    return out;
  }
  require(x.rows() == d_out_ && x.cols() == d_out_, ErrorCode::DimensionMismatch,
          "Heisenberg input must be d_out x d_out");
  ComplexMatrix out(d_in_, d_in_);
  const ComplexMatrix xt = x.transpose();
  for (int i = 0; i < d_in_; ++i)
    for (int j = 0; j < d_in_; ++j)
      out(j, i) = choi_.block(i * d_out_, j * d_out_, d_out_, d_out_).cwiseProduct(xt).sum();
  return out;
}

ComplexMatrix LinearMap::adjoint(const ComplexMatrix& s) const {
  return apply(s.adjoint(), Picture::Heisenberg).adjoint();
}

ComplexMatrix LinearMap::apply_stabilized(const ComplexMatrix& x, int d_ref) const {
  require(x.rows() == d_ref * d_in_ && x.cols() == d_ref * d_in_, ErrorCode::DimensionMismatch,
          "stabilized input has wrong size");
  ComplexMatrix out(d_ref * d_out_, d_ref * d_out_);
  for (int r = 0; r < d_ref; ++r)
    for (int c = 0; c < d_ref; ++c)
      out.block(r * d_out_, c * d_out_, d_out_, d_out_) = apply(x.block(r * d_in_, c * d_in_, d_in_, d_in_));
  return out;
}

ComplexMatrix LinearMap::adjoint_stabilized(const ComplexMatrix& s, int d_ref) const {
  require(s.rows() == d_ref * d_out_ && s.cols() == d_ref * d_out_, ErrorCode::DimensionMismatch,
          "stabilized adjoint input has wrong size");
  ComplexMatrix out(d_ref * d_in_, d_ref * d_in_);
  for (int r = 0; r < d_ref; ++r)
    for (int c = 0; c < d_ref; ++c)
      out.block(r * d_in_, c * d_in_, d_in_, d_in_) = adjoint(s.block(r * d_out_, c * d_out_, d_out_, d_out_));
  return out;
}

LinearMap LinearMap::then(const LinearMap& next) const {
  require(next.d_in_ == d_out_, ErrorCode::DimensionMismatch, "composition: output/input dimensions differ");
  return LinearMap(d_in_, next.d_out_, next.apply_stabilized(choi_, d_in_));
}

LinearMap LinearMap::operator+(const LinearMap& other) const {
  require(d_in_ == other.d_in_ && d_out_ == other.d_out_, ErrorCode::DimensionMismatch,
          "sum of maps with different dimensions");
  return LinearMap(d_in_, d_out_, choi_ + other.choi_);
}

LinearMap LinearMap::operator-(const LinearMap& other) const {
  require(d_in_ == other.d_in_ && d_out_ == other.d_out_, ErrorCode::DimensionMismatch,
          "difference of maps with different dimensions");
  return LinearMap(d_in_, d_out_, choi_ - other.choi_);
}

LinearMap LinearMap::operator*(double scale) const { return LinearMap(d_in_, d_out_, choi_ * scale); }

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(LinearMap map, std::vector<ComplexMatrix> kraus)
    : map_(std::move(map)), kraus_(std::move(kraus)) {}

Channel Channel::from_kraus(std::vector<ComplexMatrix> kraus, double tol) {
  require(!kraus.empty(), ErrorCode::DimensionMismatch, "empty Kraus list");
  const int d_out = static_cast<int>(kraus.front().rows());
  const int d_in = static_cast<int>(kraus.front().cols());
  require(d_in > 0 && d_out > 0, ErrorCode::DimensionMismatch, "empty Kraus operator");
  ComplexMatrix sum = ComplexMatrix::Zero(d_in, d_in);
  for (const auto& k : kraus) {
    require(k.rows() == d_out && k.cols() == d_in, ErrorCode::DimensionMismatch, "Kraus operators differ in shape");
    sum.noalias() += k.adjoint() * k;
  }
  const double dev = (sum - identity(d_in)).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw Error(ErrorCode::NotCPTP, "trace preservation violated: |sum K*K - 1| = " + std::to_string(dev));
  LinearMap map(d_in, d_out, choi_from_kraus(kraus, d_in, d_out));
  return Channel(std::move(map), std::move(kraus));
}

Channel Channel::from_map(const LinearMap& map, double tol) {
  const ComplexMatrix& j = map.choi();
  if (!is_hermitian(j, tol)) throw Error(ErrorCode::NotCPTP, "complete positivity violated: Choi not Hermitian");
  const double lmin = map.min_choi_eigenvalue();
  if (lmin < -tol)
    throw Error(ErrorCode::NotCPTP, "complete positivity violated: min Choi eigenvalue " + std::to_string(lmin));
  const ComplexMatrix reduced = partial_trace(j, map.d_in(), map.d_out(), Keep::First);
  const double dev = (reduced - identity(map.d_in())).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw Error(ErrorCode::NotCPTP, "trace preservation violated: |tr_B J - 1| = " + std::to_string(dev));
  return Channel(map, choi_to_kraus(map, tol));
}

ComplexMatrix Channel::apply(const ComplexMatrix& x, Picture picture) const {
  if (picture == Picture::Schrodinger) {
    require(x.rows() == d_in() && x.cols() == d_in(), ErrorCode::DimensionMismatch,
            "Schroedinger input must be d_in x d_in");
    ComplexMatrix out = ComplexMatrix::Zero(d_out(), d_out());
    for (const auto& k : kraus_) out.noalias() += k * x * k.adjoint();
    return out;
  }
  require(x.rows() == d_out() && x.cols() == d_out(), ErrorCode::DimensionMismatch,
          "Heisenberg input must be d_out x d_out");
  ComplexMatrix out = ComplexMatrix::Zero(d_in(), d_in());
  for (const auto& k : kraus_) out.noalias() += k.adjoint() * x * k;
  return out;
}

Channel Channel::then(const Channel& next) const { return Channel::from_map(map_.then(next.map_)); }

ComplexMatrix apply(const LinearMap& map, const ComplexMatrix& x, Picture picture) { return map.apply(x, picture); }

// ---------------------------------------------------------------------------
// dilations

void StinespringDilation::validate(double tol) const {
  require(d_a > 0 && d_b > 0 && d_e > 0, ErrorCode::DimensionMismatch, "dilation dimensions must be positive");
  require(v.rows() == d_b * d_e && v.cols() == d_a, ErrorCode::DimensionMismatch, "dilation has wrong shape");
  if (!is_isometry(v, tol)) throw Error(ErrorCode::NotCPTP, "dilation is not an isometry");
}

Channel StinespringDilation::induced_channel() const {
  std::vector<ComplexMatrix> kraus(d_e, ComplexMatrix(d_b, d_a));
  for (int b = 0; b < d_b; ++b)
    for (int k = 0; k < d_e; ++k) kraus[k].row(b) = v.row(b * d_e + k);
  return Channel::from_kraus(std::move(kraus));
}

StinespringDilation StinespringDilation::swap_roles() const {
  ComplexMatrix w(v.rows(), v.cols());
  for (int b = 0; b < d_b; ++b)
    for (int k = 0; k < d_e; ++k) w.row(k * d_b + b) = v.row(b * d_e + k);
  return {w, d_a, d_e, d_b};
}

StinespringDilation StinespringDilation::rotate_environment(const ComplexMatrix& u) const {
  require(u.cols() == d_e, ErrorCode::DimensionMismatch, "environment map has wrong input dimension");
  const int new_e = static_cast<int>(u.rows());
  return {tensor(identity(d_b), u) * v, d_a, d_b, new_e};
}

Ensemble::Ensemble(std::vector<double> w, std::vector<DensityMatrix> s, double tol)
    : weights(std::move(w)), states(std::move(s)) {
  require(!states.empty() && weights.size() == states.size(), ErrorCode::InvalidState,
          "ensemble needs one weight per state");
  for (double p : weights) require(p >= -tol, ErrorCode::InvalidState, "negative ensemble weight");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(std::abs(total - 1.0) <= tol, ErrorCode::InvalidState, "ensemble weights do not sum to 1");
  for (const auto& st : states)
    require(st.dim() == states.front().dim(), ErrorCode::InvalidState, "ensemble members differ in dimension");
}

std::vector<ComplexMatrix> choi_to_kraus(const LinearMap& map, double tol) {
  const ChoiSpectrum spec = ranked_choi_spectrum(map, tol);
  const int d_in = map.d_in();
  const int d_out = map.d_out();
  std::vector<ComplexMatrix> kraus;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    ComplexMatrix op(d_out, d_in);
    for (int i = 0; i < d_in; ++i) op.col(i) = spec.vectors[k].segment(i * d_out, d_out);
    kraus.push_back(std::sqrt(spec.values[k]) * op);
  }
  if (kraus.empty()) kraus.push_back(ComplexMatrix::Zero(d_out, d_in));
  return kraus;
}

StinespringDilation to_stinespring(const Channel& t) {
  const auto kraus = choi_to_kraus(t.map());
  const int d_a = t.d_in();
  const int d_b = t.d_out();
  const int d_e = static_cast<int>(kraus.size());
  ComplexMatrix v(d_b * d_e, d_a);
  for (int b = 0; b < d_b; ++b)
    for (int k = 0; k < d_e; ++k) v.row(b * d_e + k) = kraus[k].row(b);
  return {v, d_a, d_b, d_e};
}

StinespringDilation pad_dilation(const StinespringDilation& d, int new_d_e) {
  if (new_d_e < d.d_e)
    throw Error(ErrorCode::ShrinkNotAllowed,
                "cannot pad environment of dimension " + std::to_string(d.d_e) + " to " + std::to_string(new_d_e));
  ComplexMatrix v = ComplexMatrix::Zero(d.d_b * new_d_e, d.d_a);
  for (int b = 0; b < d.d_b; ++b) v.middleRows(b * new_d_e, d.d_e) = d.v.middleRows(b * d.d_e, d.d_e);
  return {v, d.d_a, d.d_b, new_d_e};
}

Channel complementary(const StinespringDilation& d) { return d.swap_roles().induced_channel(); }

namespace {

// Row k, column (b, i) -> V[(b, k), i].
ComplexMatrix environment_matrix(const StinespringDilation& d) {
  ComplexMatrix m(d.d_e, d.d_b * d.d_a);
  for (int b = 0; b < d.d_b; ++b)
    for (int k = 0; k < d.d_e; ++k)
      for (int i = 0; i < d.d_a; ++i) m(k, b * d.d_a + i) = d.v(b * d.d_e + k, i);
  return m;
}

}  // namespace

ComplexMatrix connecting_isometry(const StinespringDilation& d1, const StinespringDilation& d2, double tol) {
  require(d1.d_a == d2.d_a && d1.d_b == d2.d_b, ErrorCode::DimensionMismatch,
          "dilations have different input/output dimensions");
  require(d1.d_e <= d2.d_e, ErrorCode::DimensionMismatch,
          "first environment is larger than the second; pad the second dilation first");
  const ComplexMatrix j1 = d1.induced_channel().choi();
  const ComplexMatrix j2 = d2.induced_channel().choi();
  const double diff = (j1 - j2).cwiseAbs().maxCoeff();
  if (diff > tol) throw Error(ErrorCode::NotSameChannel, "Choi matrices differ by " + std::to_string(diff));

  const ComplexMatrix m1 = environment_matrix(d1);
  const ComplexMatrix m2 = environment_matrix(d2);
  const SvdResult s = svd(m1);
  int rank = 0;
  const double smax = s.s.size() ? s.s(0) : 0.0;
  while (rank < s.s.size() && s.s(rank) > 1e-10 * std::max(smax, 1e-300)) ++rank;

  // Least-squares solution of u m1 = m2 on the range of m1.
  ComplexMatrix image = m2 * s.w.leftCols(rank) * s.s.head(rank).cwiseInverse().cast<Complex>().asDiagonal();
  if (rank > 0) {
    // Remove rounding drift so the columns are exactly orthonormal.
    const SvdResult fix = svd(image);
    image = fix.u * fix.w.adjoint();
  }
  ComplexMatrix u = image * s.u.leftCols(rank).adjoint();
  if (rank < d1.d_e) {
    const ComplexMatrix source_rest = orthogonal_complement(s.u.leftCols(rank), d1.d_e);
    const ComplexMatrix target_rest = orthogonal_complement(image, d2.d_e).leftCols(d1.d_e - rank);
    u += target_rest * source_rest.adjoint();
  }
  const double residual = operator_norm(tensor(identity(d1.d_b), u) * d1.v - d2.v);
  if (residual > tol)
    throw Error(ErrorCode::NotSameChannel, "no connecting isometry, residual " + std::to_string(residual));
  return u;
}

// ---------------------------------------------------------------------------
// named families

Channel identity_channel(int d) { return Channel::from_kraus({identity(d)}); }

Channel depolarizing(int d_in, const DensityMatrix& sigma) {
  require(d_in > 0, ErrorCode::BadParameters, "depolarizing: d_in must be positive");
  return Channel::from_map(LinearMap(d_in, sigma.dim(), tensor(identity(d_in), sigma.matrix())));
}

Channel completely_depolarizing(int d) { return depolarizing(d, DensityMatrix::maximally_mixed(d)); }

Channel unitary_channel(const ComplexMatrix& u) {
  if (!is_unitary(u)) throw Error(ErrorCode::NotCPTP, "unitary_channel: matrix is not unitary");
  return Channel::from_kraus({u});
}

Channel amplitude_damping(double gamma) {
  require(gamma >= 0.0 && gamma <= 1.0, ErrorCode::BadParameters, "amplitude damping needs gamma in [0,1]");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return Channel::from_kraus({k0, k1});
}

Channel random_unitary_mix(const std::vector<ComplexMatrix>& unitaries) {
  require(!unitaries.empty(), ErrorCode::BadParameters, "random_unitary_mix needs at least one unitary");
  const double w = 1.0 / std::sqrt(static_cast<double>(unitaries.size()));
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(unitaries.size());
  for (const auto& u : unitaries) kraus.push_back(w * u);
  return Channel::from_kraus(std::move(kraus));
}

Channel random_unitary_mix(int nu, int mu, RngStream& rng) {
  require(nu >= 1 && mu >= 1, ErrorCode::BadParameters, "random_unitary_mix needs nu, mu >= 1");
  std::vector<ComplexMatrix> us;
  us.reserve(mu);
  for (int i = 0; i < mu; ++i) us.push_back(haar_unitary(nu, rng));
  return random_unitary_mix(us);
}

Channel random_channel(int d_in, int d_out, int rank, RngStream& rng) {
  require(d_in >= 1 && d_out >= 1 && rank >= 1 && d_out * rank >= d_in, ErrorCode::BadParameters,
          "random_channel needs d_out * rank >= d_in");
  const ComplexMatrix u = haar_unitary(d_out * rank, rng);
  std::vector<ComplexMatrix> kraus(rank, ComplexMatrix(d_out, d_in));
  for (int b = 0; b < d_out; ++b)
    for (int k = 0; k < rank; ++k) kraus[k].row(b) = u.row(b * rank + k).head(d_in);
  return Channel::from_kraus(std::move(kraus));
}

LinearMap transpose_map(int nu) {
  require(nu >= 1, ErrorCode::BadParameters, "transpose_map needs nu >= 1");
  return LinearMap(nu, nu, flip(nu));
}

LinearMap t_family_map(int nu, double p) {
  require(nu >= 1, ErrorCode::BadParameters, "t_family needs nu >= 1");
  const ComplexMatrix depol = identity(nu * nu) / static_cast<double>(nu);
  return LinearMap(nu, nu, (1.0 - p) * depol + p * flip(nu));
}

Channel t_family(int nu, double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::BadParameters, "t_family needs p in [0,1]");
  return Channel::from_map(t_family_map(nu, p));
}

std::vector<ComplexMatrix> weyl_unitaries(int nu) {
  require(nu >= 1, ErrorCode::BadParameters, "weyl_unitaries needs nu >= 1");
  ComplexMatrix shift = ComplexMatrix::Zero(nu, nu);
  ComplexMatrix clock = ComplexMatrix::Zero(nu, nu);
  for (int j = 0; j < nu; ++j) {
    shift((j + 1) % nu, j) = 1.0;
    clock(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / nu);
  }
  std::vector<ComplexMatrix> out;
  ComplexMatrix xa = identity(nu);
  for (int a = 0; a < nu; ++a) {
    ComplexMatrix zb = identity(nu);
    for (int b = 0; b < nu; ++b) {
      out.push_back(xa * zb);
      zb = zb * clock;
    }
    xa = xa * shift;
  }
  return out;
}

ComplexMatrix flip(int nu) {
  ComplexMatrix f = ComplexMatrix::Zero(nu * nu, nu * nu);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < nu; ++j) f(i * nu + j, j * nu + i) = 1.0;
  return f;
}

ComplexMatrix sym_projector(int nu) { return 0.5 * (identity(nu * nu) + flip(nu)); }
ComplexMatrix antisym_projector(int nu) { return 0.5 * (identity(nu * nu) - flip(nu)); }

WernerSpectrum werner_eigenvalues(double alpha, double beta, int nu) {
  require(nu >= 2, ErrorCode::BadParameters, "werner_eigenvalues needs nu >= 2");
  WernerSpectrum w{alpha + beta, nu * (nu + 1) / 2, alpha - beta, nu * (nu - 1) / 2, false};
  w.positive = w.sym_value >= 0.0 && w.antisym_value >= 0.0;
  return w;
}

ComplexMatrix jamiolkowski_state(const LinearMap& map) {
  require(map.d_in() == map.d_out(), ErrorCode::DimensionMismatch, "jamiolkowski_state needs d_in == d_out");
  const int nu = map.d_in();
  return swap_factors(map.choi(), nu, nu) / static_cast<double>(nu);
}

ComplexVector maximally_entangled(int nu) {
  ComplexVector omega = ComplexVector::Zero(nu * nu);
  for (int i = 0; i < nu; ++i) omega(i * nu + i) = 1.0 / std::sqrt(static_cast<double>(nu));
  return omega;
}

}  // namespace qchan
