#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qrand {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Error taxonomy shared by every module.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SizeError : std::length_error {
  using std::length_error::length_error;
};
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tolerance defaults used throughout the library. Every operation that takes
/// a tolerance falls back to one of these.
struct Tolerances {
  double hermitian = 1e-12;     ///< max |H - H^dagger| accepted on construction
  double feasibility = 1e-9;    ///< PSD / constraint checks
  double reconstruction = 1e-9; ///< eigen-reconstruction checks
  double clamp = 1e-10;         ///< eigenvalues in [-clamp, 0] are treated as 0
};

/// Process-wide defaults; honours the QRAND_TOL environment variable for the
/// feasibility tolerance.
const Tolerances& default_tolerances();

inline constexpr int kMaxDim = 32;

/// Dense complex Hermitian operator. Construction validates hermiticity and
/// then stores the exactly-Hermitian part (A + A^dagger)/2.
class HermitianMatrix {
public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(CMatrix entries);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  static HermitianMatrix diagonal(const std::vector<double>& diag);
  /// |v><v| (v need not be normalized).
  static HermitianMatrix outer(const CVector& v);
  /// Symmetrizes without validation; for internal results that are Hermitian
  /// up to round-off by construction.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& mat() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }
  /// <v|H|v>, real for Hermitian H.
  double expectation(const CVector& v) const;
  double max_abs() const;

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }

  /// U H U^dagger.
  HermitianMatrix conjugated(const CMatrix& u) const;

private:
  CMatrix m_;
};

/// Max-norm of a - b.
double max_abs_diff(const CMatrix& a, const CMatrix& b);
/// Re tr(a b).
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

struct Spectrum {
  RVector eigenvalues;  // non-increasing
  CMatrix eigenvectors; // columns, orthonormal

  double max() const { return eigenvalues(0); }
  double min() const { return eigenvalues(eigenvalues.size() - 1); }
  /// V diag(f(lambda)) V^dagger.
  template <typename F>
  HermitianMatrix apply(F&& f) const {
    RVector mapped(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) mapped(i) = f(eigenvalues(i));
    return HermitianMatrix::hermitian_part(eigenvectors * mapped.asDiagonal() * eigenvectors.adjoint());
  }
};

Spectrum eig_hermitian(const HermitianMatrix& h);
/// Validates hermiticity of a raw matrix before decomposing.
Spectrum eig_hermitian(const CMatrix& h);

double min_eigenvalue(const HermitianMatrix& h);
double max_eigenvalue(const HermitianMatrix& h);
bool is_psd(const HermitianMatrix& h, double tol);

/// Principal square root of a PSD operator. Throws DomainError when an
/// eigenvalue is below -clamp.
HermitianMatrix matrix_sqrt(const HermitianMatrix& h);
/// Moore-Penrose inverse square root on the support (eigenvalues above cutoff).
HermitianMatrix matrix_inv_sqrt(const HermitianMatrix& h, double cutoff = 1e-14);

/// tr sqrt(sqrt(rho) sigma sqrt(rho)).
double fidelity(const HermitianMatrix& rho, const HermitianMatrix& sigma);
/// -tr(rho log2 rho), 0 log 0 := 0. Requires unit trace.
double von_neumann_entropy(const HermitianMatrix& rho);
double binary_entropy(double x);
/// Shannon entropy in bits of a probability vector.
double shannon_entropy(const std::vector<double>& p);

} // namespace qrand
