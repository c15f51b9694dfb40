#include "qrand/povm.hpp"

#include <cmath>
#include <string>

namespace qrand {

PureState::PureState(CVector amplitudes) {
  if (amplitudes.size() < 1) throw ValidationError("state must have at least one amplitude");
  if (amplitudes.size() > kMaxDim) throw SizeError("state dimension exceeds limit");
  if (!amplitudes.allFinite()) throw ValidationError("state has non-finite amplitudes");
  double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-10)
    throw ValidationError("state is not normalized (norm^2 = " + std::to_string(norm2) + ")");
  amplitudes /= std::sqrt(norm2);
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    if (std::abs(amplitudes(i)) > 1e-14) {
      Complex phase = std::conj(amplitudes(i)) / std::abs(amplitudes(i));
      amplitudes *= phase;
      amplitudes(i) = std::abs(amplitudes(i));
      break;
    }
  }
  amp_ = std::move(amplitudes);
}

std::vector<double> PureState::basis_weights() const {
  std::vector<double> w(static_cast<std::size_t>(dim()));
  for (int i = 0; i < dim(); ++i) w[static_cast<std::size_t>(i)] = std::norm(amp_(i));
  return w;
}

Povm::Povm(std::vector<HermitianMatrix> elements, double tol) : elements_(std::move(elements)) {
  if (elements_.size() < 2) throw ValidationError("POVM needs at least two elements");
  const int d = elements_.front().dim();
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t x = 0; x < elements_.size(); ++x) {
    if (elements_[x].dim() != d) throw ValidationError("POVM elements have inconsistent dimensions");
    if (!is_psd(elements_[x], tol))
      throw ValidationError("POVM element " + std::to_string(x + 1) + " is not PSD");
    sum += elements_[x].mat();
  }
  double defect = max_abs_diff(sum, CMatrix::Identity(d, d));
  if (defect > tol) throw ValidationError("POVM elements do not sum to identity (defect " + std::to_string(defect) + ")");
}

NoiseModel::NoiseModel(int d_, double epsilon_) : d(d_), epsilon(epsilon_) {
  if (d < 2) throw DomainError("noise model needs d >= 2");
  if (d > kMaxDim) throw SizeError("noise model dimension exceeds limit");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
  A = d - epsilon * (d - 1);
  delta = epsilon * (2.0 - epsilon);
}

HermitianMatrix depolarize(const HermitianMatrix& op, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
  const int d = op.dim();
  return (1.0 - epsilon) * op + (epsilon * op.trace() / d) * HermitianMatrix::identity(d);
}

Povm noisy_projective(int d, double epsilon) { return noisy_projective(NoiseModel(d, epsilon)); }

Povm noisy_projective(const NoiseModel& noise) {
  std::vector<HermitianMatrix> els;
  els.reserve(static_cast<std::size_t>(noise.d));
  for (int x = 0; x < noise.d; ++x) {
    std::vector<double> diag(static_cast<std::size_t>(noise.d), noise.epsilon / noise.d);
    diag[static_cast<std::size_t>(x)] += 1.0 - noise.epsilon;
    els.push_back(HermitianMatrix::diagonal(diag));
  }
  return Povm(std::move(els));
}

PureState unbiased_state(int d) {
  if (d < 1) throw DomainError("dimension must be positive");
  return PureState(CVector::Constant(d, Complex(1.0 / std::sqrt(static_cast<double>(d)), 0.0)));
}

std::vector<double> born_probabilities(const PureState& state, const Povm& povm) {
  if (state.dim() != povm.dim()) throw ValidationError("state and POVM dimensions differ");
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(povm.size()));
  for (const auto& m : povm.elements()) p.push_back(m.expectation(state.amplitudes()));
  return p;
}

void validate_partition(const Partition& partition, int m) {
  std::vector<int> seen(static_cast<std::size_t>(m), 0);
  for (const auto& part : partition) {
    if (part.empty()) throw ValidationError("partition has an empty part");
    for (int x : part) {
      if (x < 0 || x >= m) throw ValidationError("partition index out of range");
      if (seen[static_cast<std::size_t>(x)]++) throw ValidationError("partition parts overlap");
    }
  }
  for (int c : seen)
    if (c == 0) throw ValidationError("partition does not cover every outcome");
}

Povm coarse_grain(const Povm& povm, const Partition& partition) {
  validate_partition(partition, povm.size());
  if (partition.size() < 2) throw ValidationError("coarse-grained POVM needs at least two parts");
  std::vector<HermitianMatrix> els;
  for (const auto& part : partition) {
    HermitianMatrix sum = HermitianMatrix::zero(povm.dim());
    for (int x : part) sum += povm[x];
    els.push_back(std::move(sum));
  }
  return Povm(std::move(els));
}

Partition half_split(int d) {
  if (d < 2 || d % 2 != 0) throw DomainError("half split needs an even dimension");
  Partition p(2);
  for (int x = 0; x < d; ++x) p[static_cast<std::size_t>(x < d / 2 ? 0 : 1)].push_back(x);
  return p;
}

Povm two_outcome_qubit(double m1, double m2, const std::optional<CMatrix>& basis, bool* swapped) {
  if (!(m1 >= 0.0 && m1 <= 1.0 && m2 >= 0.0 && m2 <= 1.0))
    throw DomainError("two_outcome_qubit: eigenvalues must lie in [0, 1]");
  if (m2 > m1) throw DomainError("two_outcome_qubit: expects m1 >= m2");
  HermitianMatrix M1 = HermitianMatrix::diagonal({m1, m2});
  if (basis) {
    const CMatrix& u = *basis;
    if (u.rows() != 2 || u.cols() != 2 || max_abs_diff(u * u.adjoint(), CMatrix::Identity(2, 2)) > 1e-10)
      throw ValidationError("two_outcome_qubit: basis is not a 2x2 unitary");
    M1 = M1.conjugated(u);
  }
  HermitianMatrix M2 = HermitianMatrix::identity(2) - M1;
  bool swap = M1.trace() > M2.trace();
  if (swapped) *swapped = swap;
  if (swap) return Povm({M2, M1});
  return Povm({M1, M2});
}

CMatrix permutation_matrix(const std::vector<int>& perm) {
  const auto d = static_cast<Eigen::Index>(perm.size());
  CMatrix p = CMatrix::Zero(d, d);
  for (Eigen::Index x = 0; x < d; ++x) p(perm[static_cast<std::size_t>(x)], x) = 1.0;
  return p;
}

} // namespace qrand
