#include "qrand/decompositions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qrand {

Decomposition::Decomposition(int outcomes, int subpovms, int dim) : m_(outcomes), n_(subpovms), dim_(dim) {
  if (outcomes < 1 || subpovms < 1) throw ValidationError("decomposition needs at least one outcome and sub-POVM");
  K_.assign(idx(outcomes), std::vector<HermitianMatrix>(idx(subpovms), HermitianMatrix::zero(dim)));
}

Decomposition::Decomposition(std::vector<std::vector<HermitianMatrix>> K) : K_(std::move(K)) {
  if (K_.empty() || K_.front().empty()) throw ValidationError("decomposition is empty");
  m_ = static_cast<int>(K_.size());
  n_ = static_cast<int>(K_.front().size());
  dim_ = K_.front().front().dim();
  for (const auto& row : K_) {
    if (static_cast<int>(row.size()) != n_) throw ValidationError("decomposition rows have different lengths");
    for (const auto& k : row)
      if (k.dim() != dim_) throw ValidationError("decomposition elements have inconsistent dimensions");
  }
}

double Decomposition::guess_value(const PureState& state) const {
  if (state.dim() != dim_) throw ValidationError("state dimension does not match decomposition");
  double v = 0.0;
  for (int j = 0; j < std::min(m_, n_); ++j) v += (*this)(j, j).expectation(state.amplitudes());
  return v;
}

std::vector<double> Decomposition::subpovm_weights() const {
  std::vector<double> p(idx(n_));
  for (int j = 0; j < n_; ++j) p[idx(j)] = column_sum(j).trace() / dim_;
  return p;
}

HermitianMatrix Decomposition::row_sum(int x) const {
  HermitianMatrix s = HermitianMatrix::zero(dim_);
  for (int j = 0; j < n_; ++j) s += (*this)(x, j);
  return s;
}

HermitianMatrix Decomposition::column_sum(int j) const {
  HermitianMatrix s = HermitianMatrix::zero(dim_);
  for (int x = 0; x < m_; ++x) s += (*this)(x, j);
  return s;
}

DecompositionReport verify_decomposition(const Decomposition& decomp, const Povm& povm, double tol) {
  if (decomp.dim() != povm.dim() || decomp.outcomes() != povm.size())
    throw ValidationError("decomposition does not match the POVM shape");
  DecompositionReport r;
  r.tol = tol;
  const int d = decomp.dim();
  for (int x = 0; x < decomp.outcomes(); ++x)
    for (int j = 0; j < decomp.subpovms(); ++j)
      r.psd_violation = std::max(r.psd_violation, -min_eigenvalue(decomp(x, j)));
  for (int j = 0; j < decomp.subpovms(); ++j) {
    HermitianMatrix c = decomp.column_sum(j);
    double dev = max_abs_diff(c.mat(), CMatrix::Identity(d, d) * (c.trace() / d));
    r.proportionality_violation = std::max(r.proportionality_violation, dev);
  }
  for (int x = 0; x < decomp.outcomes(); ++x)
    r.reconstruction_violation =
        std::max(r.reconstruction_violation, max_abs_diff(decomp.row_sum(x).mat(), povm[x].mat()));
  r.passed = r.psd_violation <= tol && r.proportionality_violation <= tol && r.reconstruction_violation <= tol;
  return r;
}

namespace {

void require_qubit_two_outcome(const Povm& povm) {
  if (povm.dim() != 2 || povm.size() != 2) throw ValidationError("expected a two-outcome qubit POVM");
}

// Returns the POVM with tr M1 <= tr M2.
Povm trace_ordered(const Povm& povm) {
  if (povm[0].trace() > povm[1].trace()) return Povm({povm[1], povm[0]});
  return povm;
}

} // namespace

Decomposition sqrt_decomposition_qubit(const Povm& input, const PureState& state) {
  require_qubit_two_outcome(input);
  if (state.dim() != 2) throw ValidationError("expected a qubit state");
  Povm povm = trace_ordered(input);
  const HermitianMatrix& m1 = povm[0];
  const HermitianMatrix one = HermitianMatrix::identity(2);
  std::vector<double> p = born_probabilities(state, povm);
  HermitianMatrix k11 = HermitianMatrix::outer(matrix_sqrt(m1).mat() * state.amplitudes());
  Decomposition K(2, 2, 2);
  K(0, 0) = k11;
  K(1, 0) = p[0] * one - k11;
  K(0, 1) = m1 - k11;
  K(1, 1) = p[1] * one - m1 + k11;
  for (int x = 0; x < 2; ++x)
    for (int j = 0; j < 2; ++j)
      if (!is_psd(K(x, j), 1e-9)) throw InternalError("square-root decomposition produced a non-PSD element");
  return K;
}

QuditSqrtDecomposition sqrt_decomposition_qudit(const NoiseModel& noise, const PureState& state) {
  const int d = noise.d;
  if (state.dim() != d) throw ValidationError("state dimension does not match the noise model");
  QuditSqrtDecomposition out;
  out.phases = CVector(d);
  RVector phi(d);
  for (int k = 0; k < d; ++k) {
    double mag = std::abs(state[k]);
    out.phases(k) = mag > 0.0 ? state[k] / mag : Complex(1.0, 0.0);
    phi(k) = mag;
  }
  Povm povm = noisy_projective(noise);
  std::vector<CMatrix> root(static_cast<std::size_t>(d));
  for (int x = 0; x < d; ++x) root[static_cast<std::size_t>(x)] = matrix_sqrt(povm[x]).mat();

  const CMatrix D = out.phases.asDiagonal();
  Decomposition K(d, d, d);
  for (int x = 0; x < d; ++x) {
    const CMatrix& r = root[static_cast<std::size_t>(x)];
    // K_xx = |phi_x><phi_x| + (eps/d)(c 1_{!=x} - 1_{!=x}|phi><phi|1_{!=x}),
    // written without dividing by c so that c = 0 needs no special case.
    CVector phi_x = r * phi.cast<Complex>();
    CVector off = phi.cast<Complex>();
    off(x) = 0.0;
    double c = off.squaredNorm();
    CMatrix one_off = CMatrix::Identity(d, d);
    one_off(x, x) = 0.0;
    CMatrix kxx = phi_x * phi_x.adjoint() + (noise.epsilon / d) * (c * one_off - off * off.adjoint());
    K(x, x) = HermitianMatrix::hermitian_part(D * kxx * D.adjoint());
    for (int j = 0; j < d; ++j) {
      if (j == x) continue;
      CVector v = CVector::Zero(d);
      v(x) = phi(j);
      v(j) = -phi(x);
      CVector phi_xj = r * v;
      K(x, j) = HermitianMatrix::hermitian_part(D * (phi_xj * phi_xj.adjoint()) * D.adjoint());
    }
  }
  out.decomposition = std::move(K);
  return out;
}

double sqrt_decomposition_value(const NoiseModel& noise, const PureState& state) {
  if (state.dim() != noise.d) throw ValidationError("state dimension does not match the noise model");
  // <phi|sqrt(M_x)|phi> = (sqrt A |<x|phi>|^2 + sqrt eps (1 - |<x|phi>|^2)) / sqrt d.
  double v = 0.0;
  for (double w : state.basis_weights()) {
    double e = (std::sqrt(noise.A) * w + std::sqrt(noise.epsilon) * (1.0 - w)) / std::sqrt(static_cast<double>(noise.d));
    v += e * e;
  }
  return v;
}

std::vector<double> unbiasedness_margins(const NoiseModel& noise, const PureState& state) {
  if (state.dim() != noise.d) throw ValidationError("state dimension does not match the noise model");
  const double d = noise.d;
  std::vector<double> delta;
  for (double w : state.basis_weights())
    delta.push_back((w - 1.0 / d) * (std::sqrt(noise.A) - std::sqrt(noise.epsilon)) / std::sqrt(d));
  return delta;
}

Vec3 bloch_vector(const PureState& state) {
  if (state.dim() != 2) throw ValidationError("Bloch vectors need a qubit state");
  Complex a0 = state[0], a1 = state[1];
  Complex c = std::conj(a0) * a1;
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(a0) - std::norm(a1)};
}

namespace {

double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }

Vec3 combine(double s, const Vec3& u, double t, const Vec3& v) {
  return {s * u[0] + t * v[0], s * u[1] + t * v[1], s * u[2] + t * v[2]};
}

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 unit_or(const Vec3& v, const Vec3& fallback) {
  double n = norm(v);
  if (n < 1e-14) return fallback;
  return {v[0] / n, v[1] / n, v[2] / n};
}

HermitianMatrix pauli_dot(const Vec3& r) {
  CMatrix m(2, 2);
  m << Complex(r[2], 0), Complex(r[0], -r[1]), Complex(r[0], r[1]), Complex(-r[2], 0);
  return HermitianMatrix::hermitian_part(m);
}

} // namespace

BlochWitness bloch_decomposition_qubit(const Povm& input, const PureState& state) {
  require_qubit_two_outcome(input);
  Povm povm = trace_ordered(input);
  Spectrum s = eig_hermitian(povm[0]);
  BlochWitness w;
  const double m1 = s.eigenvalues(0), m2 = s.eigenvalues(1);
  const double T = m1 + m2;
  w.trace_m1 = T;
  w.z = m1 - m2;
  w.r_phi = bloch_vector(state);
  w.r_1 = w.z > 1e-14 ? bloch_vector(PureState(s.eigenvectors.col(0))) : Vec3{0.0, 0.0, 1.0};
  w.cos_theta = std::clamp(dot(w.r_phi, w.r_1), -1.0, 1.0);
  if (w.z > 1e-14 && w.cos_theta >= 1.0 - 1e-12)
    throw DomainError("state coincides with the eigenvector of M1; Eve guesses perfectly");
  const double zc = w.z * w.cos_theta;
  const double num = T * T - w.z * w.z;
  const double den = T * T - zc * zc;
  const double ratio = den > 1e-300 ? std::sqrt(std::max(num, 0.0) / den) : 0.0;
  w.a = std::max(0.0, 0.5 * (T + zc * ratio));
  w.b = std::max(0.0, 0.5 * (T - zc * ratio));
  w.l = std::sqrt(std::max(0.0, 2.0 * (w.a * w.a + w.b * w.b) - w.z * w.z));
  Vec3 va = combine(0.5 * w.l, w.r_phi, 0.5 * w.z, w.r_1);
  Vec3 vb = combine(0.5 * w.l, w.r_phi, -0.5 * w.z, w.r_1);
  w.r_lambda1 = unit_or(va, w.r_1);
  w.r_mu1 = unit_or(vb, Vec3{-w.r_1[0], -w.r_1[1], -w.r_1[2]});
  w.h = w.a * dot(w.r_lambda1, w.r_phi);
  w.value = 1.0 - 0.5 * (w.a + w.b) + 0.5 * w.l;
  return w;
}

Decomposition bloch_witness_to_decomposition(const BlochWitness& w) {
  const double T = w.trace_m1;
  const double lambda1 = 0.5 * (T + w.a - w.b);
  const double lambda2 = lambda1 - w.a;
  const double mu1 = 1.0 - lambda1;
  const double mu2 = mu1 - w.b;
  const HermitianMatrix one = HermitianMatrix::identity(2);
  const HermitianMatrix sl = pauli_dot(w.r_lambda1);
  const HermitianMatrix sm = pauli_dot(w.r_mu1);
  Decomposition K(2, 2, 2);
  K(0, 0) = 0.5 * (lambda1 + lambda2) * one + 0.5 * w.a * sl;
  K(1, 0) = 0.5 * w.a * (one - sl);
  K(0, 1) = 0.5 * w.b * (one - sm);
  K(1, 1) = 0.5 * (mu1 + mu2) * one + 0.5 * w.b * sm;
  return K;
}

Decomposition permutation_symmetrize(const Decomposition& decomp) {
  const int d = decomp.dim();
  if (decomp.outcomes() != d || decomp.subpovms() != d)
    throw ValidationError("symmetrization needs d outcomes and d sub-POVMs");
  if (d > 6) throw SizeError("permutation symmetrization is limited to d <= 6");
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<CMatrix>> acc(static_cast<std::size_t>(d),
                                        std::vector<CMatrix>(static_cast<std::size_t>(d), CMatrix::Zero(d, d)));
  long count = 0;
  do {
    CMatrix P = permutation_matrix(perm);
    for (int x = 0; x < d; ++x)
      for (int j = 0; j < d; ++j)
        acc[static_cast<std::size_t>(x)][static_cast<std::size_t>(j)] +=
            P.transpose() * decomp(perm[static_cast<std::size_t>(x)], perm[static_cast<std::size_t>(j)]).mat() * P;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  Decomposition out(d, d, d);
  for (int x = 0; x < d; ++x)
    for (int j = 0; j < d; ++j)
      out(x, j) = HermitianMatrix::hermitian_part(acc[static_cast<std::size_t>(x)][static_cast<std::size_t>(j)] /
                                                  static_cast<double>(count));
  return out;
}

SymmetricCoefficients extract_symmetric_coefficients(const Decomposition& decomp) {
  const int d = decomp.dim();
  if (decomp.outcomes() != d || decomp.subpovms() != d || d < 2)
    throw ValidationError("coefficient extraction needs a d x d decomposition");
  const CMatrix& kxx = decomp(0, 0).mat();
  const CMatrix& kxj = decomp(0, 1).mat();
  SymmetricCoefficients c{};
  c.tau = kxx(0, 0).real();
  c.gamma = kxx(0, 1).real();
  c.alpha = kxx(1, 1).real();
  c.beta = d >= 3 ? kxx(1, 2).real() : 0.0;
  c.f = kxj(0, 0).real();
  c.h = kxj(1, 1).real();
  c.g = kxj(0, 1).real();
  c.s = d >= 3 ? kxj(0, 2).real() : 0.0;
  c.t = d >= 3 ? kxj(1, 2).real() : 0.0;
  c.a = d >= 3 ? kxj(2, 2).real() : 0.0;
  c.b = d >= 4 ? kxj(2, 3).real() : 0.0;
  return c;
}

double symmetric_family_value(const NoiseModel& noise, double h) {
  const double d = noise.d;
  const double hmax = noise.epsilon / (d * d);
  if (!(h >= 0.0 && h <= hmax * (1.0 + 1e-12) + 1e-300)) throw DomainError("h must lie in [0, eps/d^2]");
  double gap = std::sqrt(h + (1.0 - noise.epsilon) / d) - std::sqrt(h);
  return 1.0 - (d - 1.0) * gap * gap;
}

HermitianMatrix inflate(const HermitianMatrix& f, int d) {
  if (f.dim() != 2) throw ValidationError("inflation acts on 2x2 matrices");
  if (d < 2 || d % 2 != 0) throw DomainError("inflation needs an even dimension");
  const int half = d / 2;
  CMatrix out = CMatrix::Zero(d, d);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.block(a * half, b * half, half, half) = f(a, b) * CMatrix::Identity(half, half);
  return HermitianMatrix::hermitian_part(out);
}

Decomposition inflate_qubit_decomposition(const NoiseModel& noise, const Decomposition& qubit_decomp) {
  if (noise.d < 4 || noise.d % 2 != 0) throw DomainError("inflation needs an even dimension d >= 4");
  if (qubit_decomp.dim() != 2 || qubit_decomp.outcomes() != 2 || qubit_decomp.subpovms() != 2)
    throw ValidationError("expected a 2x2 qubit decomposition");
  Decomposition out(2, 2, noise.d);
  for (int x = 0; x < 2; ++x)
    for (int j = 0; j < 2; ++j) out(x, j) = inflate(qubit_decomp(x, j), noise.d);
  return out;
}

PureState block_uniform_state(int d, double alpha1, double alpha2) {
  if (d < 2 || d % 2 != 0) throw DomainError("block-uniform state needs an even dimension");
  const int half = d / 2;
  CVector v(d);
  for (int k = 0; k < d; ++k) v(k) = (k < half ? alpha1 : alpha2) / std::sqrt(static_cast<double>(half));
  return PureState(v);
}

double inflated_attack_value(double epsilon, double alpha1) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
  const double p = alpha1 * alpha1;
  const double gap = std::sqrt(2.0 - epsilon) - std::sqrt(epsilon);
  return 1.0 - p * (1.0 - p) * gap * gap;
}

Decomposition coarse_grain_eve_attack(const Decomposition& decomp, const Partition& partition) {
  validate_partition(partition, decomp.outcomes());
  validate_partition(partition, decomp.subpovms());
  const int parts = static_cast<int>(partition.size());
  Decomposition out(parts, parts, decomp.dim());
  for (int a = 0; a < parts; ++a)
    for (int b = 0; b < parts; ++b)
      for (int x : partition[static_cast<std::size_t>(a)])
        for (int j : partition[static_cast<std::size_t>(b)]) out(a, b) += decomp(x, j);
  return out;
}

double coarse_grained_attack_value(const NoiseModel& noise) {
  const double d = noise.d;
  const double se = std::sqrt(noise.epsilon);
  return 0.5 + se / (2.0 * d) * (2.0 * std::sqrt(noise.A) + se * (d - 2.0));
}

double JointDecomposition::guess_value() const {
  double v = 0.0;
  for (const auto& br : branches) {
    double best = 0.0;
    for (const auto& n : br.povm) best = std::max(best, n.expectation(br.state.amplitudes()));
    v += br.weight * best;
  }
  return v;
}

HermitianMatrix JointDecomposition::average_state() const {
  HermitianMatrix rho = HermitianMatrix::zero(2);
  for (const auto& br : branches) rho += br.weight * br.state.projector();
  return rho;
}

HermitianMatrix JointDecomposition::average_element(int x) const {
  HermitianMatrix m = HermitianMatrix::zero(2);
  for (const auto& br : branches) m += br.weight * br.povm[static_cast<std::size_t>(x)];
  return m;
}

double epsilon_star() { return 1.0 - 1.0 / std::sqrt(2.0); }

namespace {

CVector basis_vector(int i) {
  CVector v = CVector::Zero(2);
  v(i) = 1.0;
  return v;
}

// N_jj = |v><v|, N_{x != j} = 1 - |v><v| for a unit vector v.
std::vector<HermitianMatrix> projective_pair(int j, const CVector& v) {
  HermitianMatrix p = HermitianMatrix::outer(v);
  HermitianMatrix q = HermitianMatrix::identity(2) - p;
  return j == 0 ? std::vector<HermitianMatrix>{p, q} : std::vector<HermitianMatrix>{q, p};
}

} // namespace

JointDecomposition joint_noise_decomposition(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("joint noise decomposition needs 0 < eps < 1");
  JointDecomposition jd;
  jd.epsilon = epsilon;
  const CVector psi = unbiased_state(2).amplitudes();
  const double es = epsilon_star();
  if (epsilon <= es) {
    HermitianMatrix rho = depolarize(HermitianMatrix::outer(psi), epsilon);
    CMatrix root_rho = matrix_sqrt(rho).mat();
    Povm m = noisy_projective(2, epsilon);
    for (int i = 0; i < 2; ++i) {
      CVector phi = std::sqrt(2.0) * root_rho * basis_vector(i);
      CVector n = std::sqrt(2.0) * matrix_sqrt(m[i]).mat() * psi;
      jd.branches.push_back({i, i, 1, 0.5, PureState(phi), projective_pair(i, n)});
    }
    return jd;
  }
  // Above the threshold: states from the eps* decomposition and its mirror
  // image, mixed by p(lambda). Those branches realize the measurement at eps*,
  // so a deterministic read-out branch (N_x = delta_xj 1) supplies the rest of
  // the measurement noise.
  const CVector psi_perp = (CVector(2) << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)).finished();
  const double c = std::sqrt(2.0 - es) - std::sqrt(es);
  const double p1 = 0.5 * (std::sqrt(2.0) * (1.0 - epsilon) + 1.0);
  const double w = std::sqrt(2.0) * (1.0 - epsilon);
  for (int lambda = 1; lambda <= 2; ++lambda) {
    const double pl = lambda == 1 ? p1 : 1.0 - p1;
    for (int i = 0; i < 2; ++i) {
      CVector dir = lambda == 1 ? psi : CVector((i == 0 ? 1.0 : -1.0) * psi_perp);
      CVector phi = (c * dir + std::sqrt(2.0 * es) * basis_vector(i)) / std::sqrt(2.0);
      PureState st(phi);
      jd.branches.push_back({i, i, lambda, 0.5 * pl * w, st, projective_pair(i, st.amplitudes())});
      std::vector<HermitianMatrix> fixed = {HermitianMatrix::zero(2), HermitianMatrix::zero(2)};
      fixed[static_cast<std::size_t>(i)] = HermitianMatrix::identity(2);
      jd.branches.push_back({i, i, lambda, 0.5 * pl * (1.0 - w), st, fixed});
    }
  }
  return jd;
}

JointReport verify_joint_decomposition(const JointDecomposition& jd, double tol) {
  JointReport r;
  const double eps = jd.epsilon;
  double total = 0.0;
  for (const auto& br : jd.branches) {
    total += br.weight;
    r.weight_violation = std::max(r.weight_violation, -br.weight);
    HermitianMatrix sum = HermitianMatrix::zero(2);
    for (const auto& n : br.povm) {
      r.povm_violation = std::max(r.povm_violation, -min_eigenvalue(n));
      sum += n;
    }
    r.povm_violation = std::max(r.povm_violation, max_abs_diff(sum.mat(), CMatrix::Identity(2, 2)));
  }
  r.weight_violation = std::max(r.weight_violation, std::abs(total - 1.0));
  const HermitianMatrix rho = depolarize(unbiased_state(2).projector(), eps);
  r.state_violation = max_abs_diff(jd.average_state().mat(), rho.mat());
  const Povm m = noisy_projective(2, eps);
  for (int x = 0; x < 2; ++x) {
    r.measurement_violation = std::max(r.measurement_violation, max_abs_diff(jd.average_element(x).mat(), m[x].mat()));
    double stat = 0.0;
    for (const auto& br : jd.branches)
      stat += br.weight * br.povm[static_cast<std::size_t>(x)].expectation(br.state.amplitudes());
    r.born_violation = std::max(r.born_violation, std::abs(stat - trace_product(m[x], rho)));
  }
  r.passed = r.weight_violation <= tol && r.povm_violation <= tol && r.state_violation <= tol &&
             r.measurement_violation <= tol && r.born_violation <= tol;
  return r;
}

} // namespace qrand
