#include "qchan/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace qchan {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotCP: return "NotCP";
    case ErrorCode::NotCPTP: return "NotCPTP";
    case ErrorCode::ShrinkNotAllowed: return "ShrinkNotAllowed";
    case ErrorCode::NotSameChannel: return "NotSameChannel";
    case ErrorCode::NotHermiticityPreserving: return "NotHermiticityPreserving";
    case ErrorCode::NotAFactorization: return "NotAFactorization";
    case ErrorCode::DegenerateConstraints: return "DegenerateConstraints";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

double scale_of(const ComplexMatrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

// ---------------------------------------------------------------------------
// predicates

bool is_square(const ComplexMatrix& m) { return m.rows() == m.cols() && m.rows() > 0; }

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (!is_square(m)) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale_of(m);
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  return is_square(m) && is_isometry(m, tol);
}

bool is_isometry(const ComplexMatrix& m, double tol) {
  if (m.rows() < m.cols() || m.cols() == 0) return false;
  const ComplexMatrix g = m.adjoint() * m;
  return (g - ComplexMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const ComplexMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * scale_of(m);
}

// ---------------------------------------------------------------------------
// domain types

DensityMatrix::DensityMatrix(ComplexMatrix m, double tol) : mat_(std::move(m)) {
  if (!is_square(mat_)) throw Error(ErrorCode::InvalidState, "density matrix must be square");
  if (!is_hermitian(mat_, tol)) throw Error(ErrorCode::InvalidState, "density matrix not Hermitian");
  const double tr = mat_.trace().real();
  if (std::abs(tr - 1.0) > tol)
    throw Error(ErrorCode::InvalidState, "density matrix trace " + std::to_string(tr) + " != 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(mat_), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw Error(ErrorCode::InvalidState,
                "density matrix has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
  return DensityMatrix(PureState(psi).projector());
}

PureState::PureState(ComplexVector psi, double tol) : vec_(std::move(psi)) {
  if (vec_.size() == 0) throw Error(ErrorCode::InvalidState, "empty state vector");
  if (std::abs(vec_.norm() - 1.0) > tol)
    throw Error(ErrorCode::InvalidState, "state vector norm " + std::to_string(vec_.norm()));
}

PureState PureState::normalized(const ComplexVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidState, "cannot normalize zero vector");
  return PureState(v / n);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(make_engine(seed, stream)) {}

RngStream RngStream::derive(std::uint64_t index) const {
  return RngStream(seed_, splitmix64(stream_ ^ splitmix64(index + 1)));
}

double RngStream::normal() { return normal_(engine_); }
double RngStream::uniform() { return uniform_(engine_); }

Complex RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::sqrt(2.0);
}

// ---------------------------------------------------------------------------
// decompositions

EigResult eig_hermitian(const ComplexMatrix& m, double tol) {
  if (!is_square(m)) throw Error(ErrorCode::DimensionMismatch, "eig_hermitian needs a square matrix");
  if (!is_hermitian(m, tol)) throw Error(ErrorCode::NotHermitian, "eig_hermitian input not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NumericalFailure, "eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

SvdResult svd(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> js(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {js.matrixU(), js.singularValues(), js.matrixV()};
}

ComplexMatrix orthogonal_complement(const ComplexMatrix& q, int ambient_dim) {
  const int have = static_cast<int>(q.cols());
  ComplexMatrix basis(ambient_dim, ambient_dim);
  if (have > 0) basis.leftCols(have) = q;
  int count = have;
  for (int i = 0; i < ambient_dim && count < ambient_dim; ++i) {
    ComplexVector v = basis_vector(ambient_dim, i);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < count; ++k) v -= basis.col(k) * basis.col(k).dot(v);
    }
    const double n = v.norm();
    if (n > 1e-6) basis.col(count++) = v / n;
  }
  return basis.rightCols(ambient_dim - have);
}

PolarResult polar(const ComplexMatrix& m) {
  if (!is_square(m)) throw Error(ErrorCode::DimensionMismatch, "polar needs a square matrix");
  const int n = static_cast<int>(m.rows());
  const SvdResult d = svd(m);
  const double smax = d.s.size() ? d.s(0) : 0.0;
  int rank = 0;
  while (rank < n && d.s(rank) > 1e-12 * std::max(1.0, smax)) ++rank;

  ComplexMatrix unitary = d.u.leftCols(rank) * d.w.leftCols(rank).adjoint();
  if (rank < n) {
    const ComplexMatrix left_null = orthogonal_complement(d.u.leftCols(rank), n);
    const ComplexMatrix right_null = orthogonal_complement(d.w.leftCols(rank), n);
    unitary += left_null * right_null.adjoint();
  }
  ComplexMatrix positive = d.w * d.s.cast<Complex>().asDiagonal() * d.w.adjoint();
  return {unitary, hermitian_part(positive)};
}

// ---------------------------------------------------------------------------
// tensor calculus

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, int d1, int d2, Keep keep) {
  if (d1 <= 0 || d2 <= 0 || m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw Error(ErrorCode::DimensionMismatch, "partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                                                  std::to_string(m.cols()) + ", factors " + std::to_string(d1) +
                                                  "," + std::to_string(d2));
  if (keep == Keep::First) {
    ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j) out(i, j) = m.block(i * d2, j * d2, d2, d2).trace();
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (int i = 0; i < d1; ++i) out += m.block(i * d2, i * d2, d2, d2);
  return out;
}

ComplexMatrix swap_factors(const ComplexMatrix& m, int d1, int d2) {
  if (m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw Error(ErrorCode::DimensionMismatch, "swap_factors: size mismatch");
  const int n = d1 * d2;
  Eigen::VectorXi perm(n);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d2; ++b) perm(b * d1 + a) = a * d2 + b;
  ComplexMatrix out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out(r, c) = m(perm(r), perm(c));
  return out;
}

// ---------------------------------------------------------------------------
// norms, fidelity, purification

double schatten_norm(const ComplexMatrix& m, Schatten p) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    const RealVector a = es.eigenvalues().cwiseAbs();
    return p == Schatten::Trace ? a.sum() : a.maxCoeff();
  }
  const RealVector s = Eigen::BDCSVD<ComplexMatrix>(m).singularValues();
  return p == Schatten::Trace ? s.sum() : s(0);
}

double state_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorCode::DimensionMismatch, "state_fidelity: dimensions differ");
  const double f = trace_norm(psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix()));
  return std::clamp(f, 0.0, 1.0);
}

PureState purify(const DensityMatrix& rho) {
  const int d = rho.dim();
  const EigResult e = eig_hermitian(rho.matrix());
  // descending eigenvalue order; degenerate eigenvalues keep solver order
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return e.values(a) > e.values(b) + 1e-12; });
  ComplexVector out = ComplexVector::Zero(d * d);
  for (int k = 0; k < d; ++k) {
    const int src = order[k];
    const double p = std::max(0.0, e.values(src));
    out += std::sqrt(p) * tensor(ComplexVector(phase_normalized(e.vectors.col(src))), basis_vector(d, k));
  }
  return PureState::normalized(out);
}

ComplexMatrix haar_unitary(int d, RngStream& rng) {
  if (d < 1) throw Error(ErrorCode::BadParameters, "haar_unitary: d must be >= 1");
  ComplexMatrix g(d, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

// ---------------------------------------------------------------------------
// small helpers

ComplexMatrix identity(int d) { return ComplexMatrix::Identity(d, d); }

ComplexVector basis_vector(int d, int i) {
  ComplexVector v = ComplexVector::Zero(d);
  v(i) = 1.0;
  return v;
}

ComplexMatrix matrix_unit(int rows, int cols, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(rows, cols);
  e(i, j) = 1.0;
  return e;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(m));
  RealVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

ComplexVector phase_normalized(const ComplexVector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > tol) return v * (std::conj(v(i)) / a);
  }
  return v;
}

}  // namespace qchan
