#include "qrand/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <thread>

namespace qrand {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// Extra Newton steps spent polishing the last barrier stage.
constexpr int kFinalSteps = 20;

// Coordinates of a Hermitian matrix in the orthonormal basis
// {E_kk} u {(E_kl + E_lk)/sqrt2, i(E_kl - E_lk)/sqrt2 : k < l}
// under <A, B> = Re tr(AB).
void svec(const CMatrix& a, double* out) {
  const auto d = a.rows();
  Eigen::Index i = 0;
  for (Eigen::Index k = 0; k < d; ++k) out[i++] = a(k, k).real();
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = k + 1; l < d; ++l) {
      out[i++] = std::sqrt(2.0) * a(k, l).real();
      out[i++] = std::sqrt(2.0) * a(k, l).imag();
    }
}

RVector svec(const CMatrix& a) {
  RVector v(a.rows() * a.rows());
  svec(a, v.data());
  return v;
}

CMatrix smat(const double* v, Eigen::Index d) {
  CMatrix a(d, d);
  Eigen::Index i = 0;
  for (Eigen::Index k = 0; k < d; ++k) a(k, k) = v[i++];
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = k + 1; l < d; ++l) {
      Complex z(v[i] * kInvSqrt2, v[i + 1] * kInvSqrt2);
      a(k, l) = z;
      a(l, k) = std::conj(z);
      i += 2;
    }
  return a;
}

// The basis elements B_i as matrices, cached per dimension and thread.
const std::vector<CMatrix>& basis_matrices(Eigen::Index d) {
  thread_local std::vector<std::vector<CMatrix>> cache;
  if (static_cast<Eigen::Index>(cache.size()) <= d) cache.resize(static_cast<std::size_t>(d + 1));
  auto& basis = cache[static_cast<std::size_t>(d)];
  if (basis.empty())
    for (Eigen::Index i = 0; i < d * d; ++i) {
      RVector e = RVector::Zero(d * d);
      e(i) = 1.0;
      basis.push_back(smat(e.data(), d));
    }
  return basis;
}

// Linear map svec(A) -> (<T_k, A>) onto a basis of traceless Hermitian
// matrices: off-diagonal basis elements plus (E_kk - E_k+1,k+1)/sqrt2.
Eigen::MatrixXd traceless_map(Eigen::Index d) {
  const Eigen::Index n = d * d;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n - 1, n);
  for (Eigen::Index k = 0; k + 1 < d; ++k) {
    T(k, k) = kInvSqrt2;
    T(k, k + 1) = -kInvSqrt2;
  }
  for (Eigen::Index i = d; i < n; ++i) T(i - 1, i) = 1.0;
  return T;
}

// svec(K B_l K) for every basis element: the block Hessian of log det.
Eigen::MatrixXd congruence_matrix(const CMatrix& K) {
  const Eigen::Index d = K.rows();
  const Eigen::Index n = d * d;
  Eigen::MatrixXd H(n, n);
  const auto& basis = basis_matrices(d);
  CMatrix KB(d, d);
  for (Eigen::Index l = 0; l < n; ++l) {
    KB.noalias() = K * basis[static_cast<std::size_t>(l)];
    svec(KB * K, H.col(l).data());
  }
  return 0.5 * (H + H.transpose());
}

struct Layout {
  int m, n, d, dd; // outcomes, sub-POVMs, dimension, d^2
  int rows() const { return m * dd; }
  int cols() const { return (n - 1) * (dd - 1); }
  int constraints() const { return rows() + cols(); }
  int block(int x, int j) const { return x * n + j; }
};

class BarrierSolver {
public:
  BarrierSolver(const std::vector<HermitianMatrix>& M, const CVector& phi, int n, const SolverConfig& cfg)
      : L_{static_cast<int>(M.size()), n, static_cast<int>(phi.size()), static_cast<int>(phi.size() * phi.size())},
        cfg_(cfg), T_(traceless_map(L_.d)) {
    const int d = L_.d;
    b_ = RVector::Zero(L_.constraints());
    for (int x = 0; x < L_.m; ++x) svec(M[static_cast<std::size_t>(x)].mat(), b_.data() + x * L_.dd);
    phi_proj_ = svec(phi * phi.adjoint());
    K_.resize(static_cast<std::size_t>(L_.m * L_.n));
    for (int x = 0; x < L_.m; ++x)
      for (int j = 0; j < L_.n; ++j) K_[idx(x, j)] = M[static_cast<std::size_t>(x)].mat() / static_cast<double>(L_.n);
    (void)d;
  }

  void run() {
    double mu = cfg_.barrier_mu0;
    const double barrier_param = static_cast<double>(L_.m) * L_.n * L_.d;
    for (;;) {
      center(mu, 0.25, cfg_.max_iters);
      stage_nu_.push_back(nu_);
      if (barrier_param * mu < cfg_.tol) break;
      mu /= 10.0;
    }
    center(mu, 1e-3, kFinalSteps);
    newton(mu);
    stage_nu_.push_back(nu_);
  }

  int iterations() const { return iters_; }
  const std::vector<CMatrix>& K() const { return K_; }
  /// Multiplier estimates at the end of each barrier stage, last one final.
  const std::vector<RVector>& stage_multipliers() const { return stage_nu_; }
  const Layout& layout() const { return L_; }
  const Eigen::MatrixXd& traceless() const { return T_; }

  double residual() const { return (constraint_values() - b_).cwiseAbs().maxCoeff(); }

private:
  std::size_t idx(int x, int j) const { return static_cast<std::size_t>(L_.block(x, j)); }

  RVector constraint_values() const { return apply_A(K_); }

  RVector apply_A(const std::vector<CMatrix>& blocks) const {
    RVector a = RVector::Zero(L_.constraints());
    RVector s(L_.dd);
    for (int x = 0; x < L_.m; ++x)
      for (int j = 0; j < L_.n; ++j) {
        svec(blocks[idx(x, j)], s.data());
        a.segment(x * L_.dd, L_.dd) += s;
        if (j < L_.n - 1) a.segment(L_.rows() + j * (L_.dd - 1), L_.dd - 1) += T_ * s;
      }
    return a;
  }

  // Computes the Newton direction for the barrier problem at mu and returns
  // the Newton decrement.
  double newton(double mu) {
    const int dd = L_.dd;
    const int p = L_.constraints();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
    RVector rhs = RVector::Zero(p);
    H_.resize(K_.size());
    g_.resize(K_.size());
    for (int x = 0; x < L_.m; ++x)
      for (int j = 0; j < L_.n; ++j) {
        const std::size_t bi = idx(x, j);
        const CMatrix& K = K_[bi];
        Eigen::LLT<CMatrix> llt(K);
        CMatrix Kinv = llt.solve(CMatrix::Identity(L_.d, L_.d));
        H_[bi] = congruence_matrix(K);
        g_[bi] = mu * svec(Kinv);
        if (x == j) g_[bi] += phi_proj_;
        const Eigen::MatrixXd& H = H_[bi];
        RVector Hg = H * g_[bi];
        const int r0 = x * dd;
        S.block(r0, r0, dd, dd) += H;
        rhs.segment(r0, dd) += Hg;
        if (j < L_.n - 1) {
          const int c0 = L_.rows() + j * (dd - 1);
          Eigen::MatrixXd HT = H * T_.transpose();
          S.block(r0, c0, dd, dd - 1) += HT;
          S.block(c0, r0, dd - 1, dd) += HT.transpose();
          S.block(c0, c0, dd - 1, dd - 1) += T_ * HT;
          rhs.segment(c0, dd - 1) += T_ * Hg;
        }
      }
    rhs -= mu * (b_ - constraint_values());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
    if (ldlt.info() != Eigen::Success) throw SolverError("Schur complement factorization failed");
    nu_ = ldlt.solve(rhs);
    if (!nu_.allFinite()) throw SolverError("Schur complement solve produced non-finite values");
    // Delta_b = (1/mu) H_b (g_b - A_b^T nu)
    dir_.resize(K_.size());
    double dec2 = 0.0;
    for (int x = 0; x < L_.m; ++x)
      for (int j = 0; j < L_.n; ++j) {
        const std::size_t bi = idx(x, j);
        RVector w = g_[bi] - nu_.segment(x * dd, dd);
        if (j < L_.n - 1) w -= T_.transpose() * nu_.segment(L_.rows() + j * (dd - 1), dd - 1);
        RVector delta = H_[bi] * w / mu;
        dir_[bi] = smat(delta.data(), L_.d);
        // <Delta, K^-1 Delta K^-1> = <delta, H^-1 delta> = <w, H w> / mu^2
        dec2 += w.dot(delta) / mu;
      }
    return std::sqrt(std::max(dec2, 0.0));
  }

  // <phi|sum_j K_jj|phi> + mu sum_b log det K_b at K + t Delta; NaN if not PD.
  double barrier_objective(double mu, double t) const {
    double f = 0.0;
    for (int x = 0; x < L_.m; ++x)
      for (int j = 0; j < L_.n; ++j) {
        const std::size_t bi = idx(x, j);
        const CMatrix K = K_[bi] + t * dir_[bi];
        Eigen::LLT<CMatrix> llt(K);
        if (llt.info() != Eigen::Success) return std::nan("");
        const CVector diag = llt.matrixLLT().diagonal();
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
          const double l = diag(i).real();
          if (!(l > 0.0)) return std::nan("");
          logdet += 2.0 * std::log(l);
        }
        f += mu * logdet;
        if (x == j) f += svec(K).dot(phi_proj_);
      }
    return f;
  }

  // A^T y as blocks.
  std::vector<CMatrix> apply_At(const RVector& y) const {
    const int dd = L_.dd;
    std::vector<CMatrix> out(K_.size());
    for (int x = 0; x < L_.m; ++x)
      for (int j = 0; j < L_.n; ++j) {
        RVector v = y.segment(x * dd, dd);
        if (j < L_.n - 1) v += T_.transpose() * y.segment(L_.rows() + j * (dd - 1), dd - 1);
        out[idx(x, j)] = smat(v.data(), L_.d);
      }
    return out;
  }

  // Removes the part of the direction that violates A(K + Delta) = b, in the
  // Euclidean metric where A A^T is well conditioned.
  void project_direction() {
    if (!gram_) {
      const int p = L_.constraints();
      Eigen::MatrixXd G(p, p);
      for (int i = 0; i < p; ++i) G.col(i) = apply_A(apply_At(RVector::Unit(p, i)));
      gram_.emplace(G);
    }
    std::vector<CMatrix> next(K_.size());
    for (std::size_t bi = 0; bi < K_.size(); ++bi) next[bi] = K_[bi] + dir_[bi];
    const RVector r = apply_A(next) - b_;
    const std::vector<CMatrix> fix = apply_At(gram_->solve(r));
    for (std::size_t bi = 0; bi < K_.size(); ++bi) dir_[bi] -= fix[bi];
  }

  bool all_pd(double t) const {
    for (std::size_t bi = 0; bi < K_.size(); ++bi) {
      Eigen::LLT<CMatrix> llt(K_[bi] + t * dir_[bi]);
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

  // Step length: Armijo backtracking on the barrier objective down to the
  // damped length 1/(1+lambda); below that, the damped step kept PD. The
  // fallback covers round-off and feasibility drift at small mu.
  double step_length(double mu, double lambda) const {
    const double f0 = barrier_objective(mu, 0.0);
    const double slope = mu * lambda * lambda;
    const double damped = 1.0 / (1.0 + lambda);
    for (double t = 1.0; t >= 0.5 * damped; t *= 0.5) {
      const double f = barrier_objective(mu, t);
      if (!std::isnan(f) && f >= f0 + 0.1 * t * slope) return t;
    }
    double t = damped;
    while (!all_pd(t)) {
      t *= 0.5;
      if (t < 1e-12) throw SolverError("line search failed to keep the iterate positive definite");
    }
    return t;
  }

  // Newton steps at fixed mu until the decrement drops below `target`, or
  // after `max_steps` steps.
  void center(double mu, double target, int max_steps) {
    for (int step = 0; step < max_steps; ++step) {
      if (iters_ >= cfg_.max_iters)
        throw SolverError("barrier method hit the iteration cap (" + std::to_string(cfg_.max_iters) +
                          " Newton steps); residual " + std::to_string(residual()));
      const double lambda = newton(mu);
      ++iters_;
      project_direction();
      const double t = step_length(mu, lambda);
      for (std::size_t bi = 0; bi < K_.size(); ++bi) K_[bi] += t * dir_[bi];
      if (lambda < target) return;
    }
  }

  Layout L_;
  SolverConfig cfg_;
  Eigen::MatrixXd T_;
  RVector b_;
  RVector phi_proj_;
  std::vector<CMatrix> K_;
  std::vector<Eigen::MatrixXd> H_;
  std::vector<RVector> g_;
  std::vector<CMatrix> dir_;
  RVector nu_;
  std::vector<RVector> stage_nu_;
  std::optional<Eigen::LDLT<Eigen::MatrixXd>> gram_;
  int iters_ = 0;
};

// Y_x from the row multipliers, G_j = -(column multipliers) with G_{n-1} = 0,
// then Y_x shifted by the worst negative slack. The dual objective uses the
// POVM actually solved (restored if needed).
std::pair<DualCertificate, double> read_dual(const RVector& nu, const PureState& state,
                                             const std::vector<HermitianMatrix>& M, int n,
                                             const Eigen::MatrixXd& traceless) {
  const int m = static_cast<int>(M.size());
  const int d = state.dim();
  const int dd = d * d;
  DualCertificate cert;
  for (int x = 0; x < m; ++x) cert.Y.push_back(HermitianMatrix::hermitian_part(smat(nu.data() + x * dd, d)));
  for (int j = 0; j < n; ++j) {
    if (j == n - 1) {
      cert.G.push_back(HermitianMatrix::zero(d));
      continue;
    }
    RVector c = traceless.transpose() * nu.segment(m * dd + j * (dd - 1), dd - 1);
    cert.G.push_back(-1.0 * HermitianMatrix::hermitian_part(smat(c.data(), d)));
  }
  const HermitianMatrix proj = state.projector();
  for (int x = 0; x < m; ++x) {
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      HermitianMatrix slack = cert.Y[static_cast<std::size_t>(x)] - cert.G[static_cast<std::size_t>(j)];
      if (x == j) slack -= proj;
      worst = std::min(worst, min_eigenvalue(slack));
    }
    if (worst < 0.0) cert.Y[static_cast<std::size_t>(x)] += (-worst) * HermitianMatrix::identity(d);
  }
  double value = 0.0;
  for (int x = 0; x < m; ++x) value += trace_product(cert.Y[static_cast<std::size_t>(x)], M[static_cast<std::size_t>(x)]);
  return {std::move(cert), value};
}

} // namespace

SolveResult solve_primal(const PrimalProblem& problem, const SolverConfig& config) {
  const Povm& povm = problem.povm;
  const int d = povm.dim();
  const int m = povm.size();
  const int n = problem.subpovms > 0 ? problem.subpovms : m;
  if (problem.state.dim() != d) throw ValidationError("state and POVM dimensions differ");
  if (d > 8 || m > 8 || n > 8) throw SizeError("dense solver supports d, outcomes <= 8");
  if (!(config.tol > 0.0)) throw ValidationError("solver tolerance must be positive");

  SolveResult res;
  std::vector<HermitianMatrix> M = povm.elements();
  double lmin = 1.0;
  for (const auto& e : M) lmin = std::min(lmin, min_eigenvalue(e));
  if (lmin < config.restore_eta) {
    const double eta = config.restore_eta;
    for (auto& e : M) e = (1.0 - eta) * e + (eta / m) * HermitianMatrix::identity(d);
    res.restored = true;
    res.restore_eta = eta;
  }

  const CVector& phi = problem.state.amplitudes();
  BarrierSolver solver(M, phi, n, config);
  solver.run();
  res.iterations = solver.iterations();
  res.feasibility_residual = solver.residual();

  Decomposition K(m, n, d);
  for (int x = 0; x < m; ++x)
    for (int j = 0; j < n; ++j)
      K(x, j) = HermitianMatrix::hermitian_part(solver.K()[static_cast<std::size_t>(x * n + j)]);
  res.value = K.guess_value(problem.state);

  // Every stage's multipliers give a feasible certificate after the shift;
  // keep the tightest.
  for (const RVector& nu : solver.stage_multipliers()) {
    auto [cert, dual_value] = read_dual(nu, problem.state, M, n, solver.traceless());
    if (!res.dual_value || dual_value < *res.dual_value) {
      res.dual = std::move(cert);
      res.dual_value = dual_value;
    }
  }
  res.gap = *res.dual_value - res.value;
  res.decomposition = std::move(K);
  return res;
}

DualCheck verify_dual_certificate(const DualCertificate& cert, const PureState& state, const Povm& povm,
                                  double tol) {
  if (static_cast<int>(cert.Y.size()) != povm.size()) throw ValidationError("certificate has wrong number of Y_x");
  if (cert.G.empty()) throw ValidationError("certificate has no G_j");
  const int d = povm.dim();
  for (const auto& y : cert.Y)
    if (y.dim() != d) throw ValidationError("certificate dimension mismatch");
  for (const auto& g : cert.G)
    if (g.dim() != d) throw ValidationError("certificate dimension mismatch");
  if (state.dim() != d) throw ValidationError("state dimension mismatch");
  DualCheck c;
  for (const auto& g : cert.G) c.max_trace_g = std::max(c.max_trace_g, std::abs(g.trace()));
  const HermitianMatrix proj = state.projector();
  c.min_eig_slack = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < cert.Y.size(); ++x)
    for (std::size_t j = 0; j < cert.G.size(); ++j) {
      HermitianMatrix slack = cert.Y[x] - cert.G[j];
      if (x == j) slack -= proj;
      c.min_eig_slack = std::min(c.min_eig_slack, min_eigenvalue(slack));
    }
  for (int x = 0; x < povm.size(); ++x) c.dual_value += trace_product(cert.Y[static_cast<std::size_t>(x)], povm[x]);
  c.feasible = c.max_trace_g <= tol && c.min_eig_slack >= -tol;
  return c;
}

namespace {

struct CertificateConstants {
  double tr_sqrt, alpha, beta, gamma;
};

CertificateConstants certificate_constants(const NoiseModel& noise) {
  const double d = noise.d, eps = noise.epsilon, A = noise.A;
  CertificateConstants c{};
  c.tr_sqrt = (std::sqrt(A) + (d - 1.0) * std::sqrt(eps)) / std::sqrt(d);
  const double k = c.tr_sqrt * std::sqrt(d / eps) / (d * d);
  c.alpha = (d - 1.0) / d - (d - 1.0) * k;
  c.beta = (d - 1.0) / d - (d - 2.0) * k;
  c.gamma = c.tr_sqrt / (d * std::sqrt(d)) * std::sqrt((d - 1.0) / eps) * (std::sqrt(A) - std::sqrt(eps)) /
            (std::sqrt(A) + std::sqrt(eps));
  return c;
}

// (1/sqrt(d-1)) sum_{k != x} |k>
CVector uniform_except(int d, int x) {
  CVector v = CVector::Constant(d, 1.0 / std::sqrt(d - 1.0));
  v(x) = 0.0;
  return v;
}

} // namespace

DualCertificate build_dual_certificate_noisy_projective(const NoiseModel& noise) {
  if (!(noise.epsilon > 0.0 && noise.epsilon < 1.0))
    throw DomainError("analytic dual certificate needs 0 < eps < 1");
  const int d = noise.d;
  const CertificateConstants c = certificate_constants(noise);
  const Povm povm = noisy_projective(noise);
  const CVector psi = unbiased_state(d).amplitudes();
  const HermitianMatrix psi_proj = HermitianMatrix::outer(psi);
  const HermitianMatrix one = HermitianMatrix::identity(d);

  std::vector<HermitianMatrix> T;
  for (int x = 0; x < d; ++x) {
    CVector e = CVector::Zero(d);
    e(x) = 1.0;
    CVector u = uniform_except(d, x);
    T.push_back(HermitianMatrix::hermitian_part(-c.gamma * (e * u.adjoint() + u * e.adjoint())));
  }
  DualCertificate cert;
  for (int x = 0; x < d; ++x)
    cert.Y.push_back((c.tr_sqrt / (d * d)) * matrix_inv_sqrt(povm[x]) + T[static_cast<std::size_t>(x)]);
  for (int j = 0; j < d; ++j) {
    CVector u = uniform_except(d, j);
    HermitianMatrix one_off = one;
    one_off -= HermitianMatrix::outer(CVector::Unit(d, j));
    HermitianMatrix root = matrix_sqrt(povm[j]);
    HermitianMatrix sandwich = HermitianMatrix::outer(root.mat() * psi);
    HermitianMatrix g = T[static_cast<std::size_t>(j)] - ((d - 1.0) / d) * psi_proj -
                        c.alpha * (one_off - HermitianMatrix::outer(u)) +
                        c.beta * (one - static_cast<double>(d) * sandwich);
    cert.G.push_back(g);
  }
  return cert;
}

double dual_block_determinant(const NoiseModel& noise, const DualCertificate& cert, int x, int j) {
  const int d = noise.d;
  if (d < 3) throw DomainError("the 2x2 block exists only for d >= 3");
  if (x == j || x < 0 || j < 0 || x >= d || j >= d) throw ValidationError("need distinct outcome indices");
  CVector u = CVector::Constant(d, 1.0 / std::sqrt(d - 2.0));
  u(x) = 0.0;
  u(j) = 0.0;
  CVector v = CVector::Zero(d);
  v(x) = std::sqrt(noise.epsilon);
  v(j) = std::sqrt(noise.A);
  v /= std::sqrt(noise.A + noise.epsilon);
  const CMatrix S = (cert.Y[static_cast<std::size_t>(x)] - cert.G[static_cast<std::size_t>(j)]).mat();
  const Complex a = u.dot(S * u), b = u.dot(S * v), dd = v.dot(S * v);
  return (a * dd - std::norm(b)).real();
}

double complementary_slackness_residual(const Decomposition& decomp, const DualCertificate& cert,
                                        const PureState& state) {
  if (static_cast<int>(cert.Y.size()) != decomp.outcomes() || static_cast<int>(cert.G.size()) != decomp.subpovms())
    throw ValidationError("certificate shape does not match the decomposition");
  if (state.dim() != decomp.dim()) throw ValidationError("state dimension mismatch");
  const HermitianMatrix proj = state.projector();
  double worst = 0.0;
  for (int x = 0; x < decomp.outcomes(); ++x)
    for (int j = 0; j < decomp.subpovms(); ++j) {
      HermitianMatrix slack = cert.Y[static_cast<std::size_t>(x)] - cert.G[static_cast<std::size_t>(j)];
      if (x == j) slack -= proj;
      worst = std::max(worst, (decomp(x, j).mat() * slack.mat()).cwiseAbs().maxCoeff());
    }
  return worst;
}

namespace {

PureState state_from_params(const RVector& v, int d) {
  CVector a(d);
  a(0) = v(0);
  for (int k = 1; k < d; ++k) a(k) = Complex(v(2 * k - 1), v(2 * k));
  double n = a.norm();
  if (n < 1e-12) throw DomainError("degenerate state parameters");
  return PureState(a / n);
}

RVector params_from_state(const PureState& s) {
  const int d = s.dim();
  RVector v(2 * d - 1);
  v(0) = s[0].real();
  for (int k = 1; k < d; ++k) {
    v(2 * k - 1) = s[k].real();
    v(2 * k) = s[k].imag();
  }
  return v;
}

struct LocalResult {
  RVector x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

template <typename F>
LocalResult nelder_mead(F&& f, RVector x0, double step, int max_evals, double ftol) {
  const auto n = x0.size();
  std::vector<RVector> simplex(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> fv(static_cast<std::size_t>(n + 1));
  LocalResult r;
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)](i) += step;
  for (std::size_t i = 0; i < simplex.size(); ++i) {
    fv[i] = f(simplex[i]);
    ++r.evals;
  }
  std::vector<std::size_t> order(simplex.size());
  while (r.evals < max_evals) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    double size = 0.0;
    for (std::size_t i = 0; i < simplex.size(); ++i)
      size = std::max(size, (simplex[i] - simplex[best]).cwiseAbs().maxCoeff());
    if (fv[worst] - fv[best] < ftol && size < 1e-3) {
      r.converged = true;
      break;
    }
    RVector centroid = RVector::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);
    RVector xr = centroid + (centroid - simplex[worst]);
    double fr = f(xr);
    ++r.evals;
    if (fr < fv[best]) {
      RVector xe = centroid + 2.0 * (centroid - simplex[worst]);
      double fe = f(xe);
      ++r.evals;
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
    } else {
      bool outside = fr < fv[worst];
      RVector xc = outside ? RVector(centroid + 0.5 * (xr - centroid)) : RVector(centroid + 0.5 * (simplex[worst] - centroid));
      double fc = f(xc);
      ++r.evals;
      if (fc < (outside ? fr : fv[worst])) {
        simplex[worst] = xc;
        fv[worst] = fc;
      } else {
        for (std::size_t i = 0; i < simplex.size(); ++i) {
          if (i == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          fv[i] = f(simplex[i]);
          ++r.evals;
        }
      }
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  r.x = simplex[best];
  r.f = fv[best];
  return r;
}

bool lex_less(const PureState& a, const PureState& b) {
  for (int k = 0; k < a.dim(); ++k) {
    if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
    if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
  }
  return false;
}

} // namespace

StateSearchResult minimize_over_states(const Povm& povm, const SolverConfig& config) {
  const int d = povm.dim();
  if (config.multistarts < 1) throw ValidationError("need at least one multistart");
  SolverConfig inner = config;
  inner.tol = std::max(config.tol, 1e-7);

  auto objective = [&](const RVector& v) {
    PureState s = state_from_params(v, d);
    return solve_primal({povm, s, 0}, inner).value;
  };

  // Starting points are drawn up front so the result does not depend on
  // how starts are scheduled across threads.
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<RVector> starts;
  for (int s = 0; s < config.multistarts; ++s) {
    CVector a(d);
    for (int k = 0; k < d; ++k) a(k) = Complex(normal(rng), normal(rng));
    starts.push_back(params_from_state(PureState(a / a.norm())));
  }

  const int max_evals = 60 * (2 * d - 1);
  const double ftol = config.search_tol * 1e-2;
  std::vector<LocalResult> results(starts.size());
  const unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(starts.size())));
  auto run_range = [&](unsigned w) {
    for (std::size_t i = w; i < starts.size(); i += workers)
      results[i] = nelder_mead(objective, starts[i], 0.25, max_evals, ftol);
  };
  if (workers == 1) {
    run_range(0);
  } else {
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w) futures.push_back(std::async(std::launch::async, run_range, w));
    for (auto& f : futures) f.get();
  }

  StateSearchResult out;
  std::size_t best = 0;
  std::vector<PureState> states;
  for (std::size_t i = 0; i < results.size(); ++i) {
    states.push_back(state_from_params(results[i].x, d));
    out.evaluations += results[i].evals;
    if (i == 0) continue;
    if (results[i].f < results[best].f ||
        (results[i].f == results[best].f && lex_less(states[i], states[best])))
      best = i;
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    if (i != best && results[i].f - results[best].f <= 1e-6) out.ties.push_back(states[i]);
  out.state = states[best];
  out.certified = results[best].converged;
  out.value = solve_primal({povm, out.state, 0}, config).value;
  return out;
}

} // namespace qrand
