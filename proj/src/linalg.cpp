#include "qrand/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace qrand {

namespace {

Tolerances load_tolerances() {
  Tolerances t;
  if (const char* env = std::getenv("QRAND_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0.0 && std::isfinite(v)) t.feasibility = v;
  }
  return t;
}

void check_dim(Eigen::Index rows, Eigen::Index cols) {
  if (rows != cols) throw ValidationError("matrix is not square");
  if (rows < 1) throw ValidationError("matrix dimension must be at least 1");
  if (rows > kMaxDim) throw SizeError("matrix dimension exceeds " + std::to_string(kMaxDim));
}

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

} // namespace

const Tolerances& default_tolerances() {
  static const Tolerances t = load_tolerances();
  return t;
}

HermitianMatrix::HermitianMatrix(CMatrix entries) {
  check_dim(entries.rows(), entries.cols());
  if (!entries.allFinite()) throw ValidationError("matrix has non-finite entries");
  double defect = hermiticity_defect(entries);
  if (defect > default_tolerances().hermitian)
    throw ValidationError("matrix is not Hermitian (asymmetry " + std::to_string(defect) + ")");
  m_ = (entries + entries.adjoint()) * 0.5;
}

HermitianMatrix HermitianMatrix::zero(int dim) { return HermitianMatrix(CMatrix::Zero(dim, dim)); }

HermitianMatrix HermitianMatrix::identity(int dim) { return HermitianMatrix(CMatrix::Identity(dim, dim)); }

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& diag) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(diag.size()), static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::outer(const CVector& v) { return hermitian_part(v * v.adjoint()); }

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  check_dim(m.rows(), m.cols());
  HermitianMatrix h;
  h.m_ = (m + m.adjoint()) * 0.5;
  return h;
}

double HermitianMatrix::expectation(const CVector& v) const {
  if (v.size() != m_.rows()) throw ValidationError("vector dimension mismatch");
  return v.dot(m_ * v).real();
}

double HermitianMatrix::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw ValidationError("dimension mismatch in addition");
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw ValidationError("dimension mismatch in subtraction");
  m_ -= o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

HermitianMatrix HermitianMatrix::conjugated(const CMatrix& u) const {
  if (u.rows() != m_.rows() || u.cols() != m_.cols()) throw ValidationError("unitary dimension mismatch");
  return hermitian_part(u * m_ * u.adjoint());
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("dimension mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("dimension mismatch in trace product");
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.mat().array() * b.mat().conjugate().array()).sum().real();
}

Spectrum eig_hermitian(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat());
  if (es.info() != Eigen::Success) throw InternalError("Hermitian eigensolver failed");
  // Eigen returns ascending order.
  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.eigenvectors = es.eigenvectors().rowwise().reverse();
  return s;
}

Spectrum eig_hermitian(const CMatrix& h) { return eig_hermitian(HermitianMatrix(h)); }

double min_eigenvalue(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

bool is_psd(const HermitianMatrix& h, double tol) { return min_eigenvalue(h) >= -tol; }

HermitianMatrix matrix_sqrt(const HermitianMatrix& h) {
  Spectrum s = eig_hermitian(h);
  const double clamp = default_tolerances().clamp;
  if (s.min() < -clamp)
    throw DomainError("matrix_sqrt: negative eigenvalue " + std::to_string(s.min()));
  return s.apply([](double l) { return std::sqrt(std::max(l, 0.0)); });
}

HermitianMatrix matrix_inv_sqrt(const HermitianMatrix& h, double cutoff) {
  Spectrum s = eig_hermitian(h);
  if (s.min() < -default_tolerances().clamp)
    throw DomainError("matrix_inv_sqrt: negative eigenvalue " + std::to_string(s.min()));
  return s.apply([cutoff](double l) { return l > cutoff ? 1.0 / std::sqrt(l) : 0.0; });
}

double fidelity(const HermitianMatrix& rho, const HermitianMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw ValidationError("fidelity: dimension mismatch");
  const double clamp = default_tolerances().clamp;
  if (min_eigenvalue(rho) < -clamp || min_eigenvalue(sigma) < -clamp)
    throw DomainError("fidelity: argument is not PSD");
  HermitianMatrix r = matrix_sqrt(rho);
  HermitianMatrix inner = HermitianMatrix::hermitian_part(r.mat() * sigma.mat() * r.mat());
  Spectrum s = eig_hermitian(inner);
  double f = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) f += std::sqrt(std::max(s.eigenvalues(i), 0.0));
  return f;
}

double von_neumann_entropy(const HermitianMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > default_tolerances().feasibility)
    throw ValidationError("von_neumann_entropy: trace is not 1");
  Spectrum s = eig_hermitian(rho);
  if (s.min() < -default_tolerances().clamp) throw DomainError("von_neumann_entropy: state is not PSD");
  double h = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    double l = s.eigenvalues(i);
    if (l > 0.0) h -= l * std::log2(l);
  }
  return std::max(h, 0.0);
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: argument outside [0, 1]");
  return shannon_entropy({x, 1.0 - x});
}

double shannon_entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return std::max(h, 0.0);
}

} // namespace qrand
