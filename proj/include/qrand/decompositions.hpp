#pragma once

#include <array>
#include <vector>

#include "qrand/povm.hpp"

namespace qrand {

/// Eve's subnormalized sub-POVMs K[x][j]; x indexes outcomes, j sub-POVMs.
class Decomposition {
public:
  Decomposition() = default;
  Decomposition(int outcomes, int subpovms, int dim);
  explicit Decomposition(std::vector<std::vector<HermitianMatrix>> K);

  int dim() const { return dim_; }
  int outcomes() const { return m_; }
  int subpovms() const { return n_; }
  const HermitianMatrix& operator()(int x, int j) const { return K_[idx(x)][idx(j)]; }
  HermitianMatrix& operator()(int x, int j) { return K_[idx(x)][idx(j)]; }

  /// sum_j <phi|K_jj|phi>, Eve guessing outcome j on sub-POVM label j.
  double guess_value(const PureState& state) const;
  /// p(j) = (1/d) sum_x tr K_xj.
  std::vector<double> subpovm_weights() const;
  /// sum_j K_xj.
  HermitianMatrix row_sum(int x) const;
  /// sum_x K_xj.
  HermitianMatrix column_sum(int j) const;

private:
  static std::size_t idx(int i) { return static_cast<std::size_t>(i); }
  int m_ = 0, n_ = 0, dim_ = 0;
  std::vector<std::vector<HermitianMatrix>> K_;
};

struct DecompositionReport {
  double psd_violation = 0.0;            ///< max(0, -lambda_min(K_xj))
  double proportionality_violation = 0.0; ///< max |sum_x K_xj - (tr/d) 1|
  double reconstruction_violation = 0.0;  ///< max |sum_j K_xj - M_x|
  double tol = 0.0;
  bool passed = false;
};

DecompositionReport verify_decomposition(const Decomposition& decomp, const Povm& povm, double tol);

/// Square-root attack on a two-outcome qubit POVM (trace ordering applied).
Decomposition sqrt_decomposition_qubit(const Povm& povm, const PureState& state);

/// Result of the qudit square-root construction. `phases` holds the diagonal
/// unitary D with state = D * realified, so K = D K_real D^dagger.
struct QuditSqrtDecomposition {
  Decomposition decomposition;
  CVector phases;
};

/// Square-root attack on the noisy projective measurement.
QuditSqrtDecomposition sqrt_decomposition_qudit(const NoiseModel& noise, const PureState& state);

/// sum_x <phi|sqrt(M_x)|phi>^2 for the noisy projective measurement.
double sqrt_decomposition_value(const NoiseModel& noise, const PureState& state);

/// delta_x = (<phi|x>^2 - 1/d)(sqrt A - sqrt eps)/sqrt d. The square-root value
/// exceeds (1/d)(tr sqrt M1)^2 by sum_x delta_x^2.
std::vector<double> unbiasedness_margins(const NoiseModel& noise, const PureState& state);

using Vec3 = std::array<double, 3>;

/// Bloch-vector witness for a two-outcome qubit decomposition.
struct BlochWitness {
  double a = 0, b = 0, z = 0, l = 0, cos_theta = 0, h = 0;
  Vec3 r_lambda1{}, r_mu1{}, r_1{}, r_phi{};
  double trace_m1 = 0;
  double value = 0; ///< 1 - (a+b)/2 + l/2
};

Vec3 bloch_vector(const PureState& state);
BlochWitness bloch_decomposition_qubit(const Povm& povm, const PureState& state);
/// The decomposition K_xj described by a Bloch witness.
Decomposition bloch_witness_to_decomposition(const BlochWitness& w);

/// Averages K over all d! relabelings of outcomes and sub-POVMs, d <= 6.
Decomposition permutation_symmetrize(const Decomposition& decomp);

/// Coefficients of a permutation-symmetric decomposition of the noisy
/// projective measurement, read off K_00 and K_01.
struct SymmetricCoefficients {
  double tau, gamma, alpha, beta; // K_xx
  double f, g, h, s, t, a, b;     // K_xj, x != j
};

SymmetricCoefficients extract_symmetric_coefficients(const Decomposition& decomp);

/// 1 - (d-1)(sqrt(h + (1-eps)/d) - sqrt h)^2 for h in [0, eps/d^2].
double symmetric_family_value(const NoiseModel& noise, double h);

/// C(F) = F (x) 1_{d/2}: inflates each 2x2 element blockwise.
HermitianMatrix inflate(const HermitianMatrix& f, int d);
/// Inflates a qubit decomposition built for the state (alpha1, alpha2).
Decomposition inflate_qubit_decomposition(const NoiseModel& noise, const Decomposition& qubit_decomp);
/// (alpha1 |u>, alpha2 |u>) with |u> uniform on each half.
PureState block_uniform_state(int d, double alpha1, double alpha2);
/// 1 - alpha1^2 (1 - alpha1^2)(sqrt(2-eps) - sqrt eps)^2.
double inflated_attack_value(double epsilon, double alpha1);

/// K_ab = sum_{x in S_a, j in S_b} K_xj.
Decomposition coarse_grain_eve_attack(const Decomposition& decomp, const Partition& partition);
/// 1/2 + (sqrt eps / 2d)(2 sqrt A + sqrt eps (d-2)).
double coarse_grained_attack_value(const NoiseModel& noise);

/// One branch of a joint state+measurement decomposition: with weight p,
/// Eve prepares `state` and Alice's device measures `povm`.
struct JointBranch {
  int i = 0, j = 0, lambda = 0;
  double weight = 0.0;
  PureState state;
  std::vector<HermitianMatrix> povm; // N_x for this branch
};

struct JointDecomposition {
  double epsilon = 0.0;
  std::vector<JointBranch> branches;

  /// sum_b p_b max_x <phi_b|N_x,b|phi_b>.
  double guess_value() const;
  HermitianMatrix average_state() const;
  HermitianMatrix average_element(int x) const;
};

struct JointReport {
  double weight_violation = 0.0;
  double povm_violation = 0.0;     ///< PSD and completeness of each branch POVM
  double state_violation = 0.0;    ///< vs rho_psi = Delta_eps(|psi><psi|)
  double measurement_violation = 0.0; ///< vs M_x = Delta_eps(|x><x|)
  double born_violation = 0.0;     ///< branch statistics vs tr(M_x rho)
  bool passed = false;
};

/// 1 - 1/sqrt 2.
double epsilon_star();
JointDecomposition joint_noise_decomposition(double epsilon);
JointReport verify_joint_decomposition(const JointDecomposition& jd, double tol);

} // namespace qrand
