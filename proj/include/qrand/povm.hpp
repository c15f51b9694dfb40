#pragma once

#include <optional>
#include <vector>

#include "qrand/linalg.hpp"

namespace qrand {

/// Normalized pure state. The global phase is fixed so that the first
/// nonzero amplitude is real and positive.
class PureState {
public:
  PureState() = default;
  explicit PureState(CVector amplitudes);

  int dim() const { return static_cast<int>(amp_.size()); }
  const CVector& amplitudes() const { return amp_; }
  Complex operator[](int i) const { return amp_(i); }
  HermitianMatrix projector() const { return HermitianMatrix::outer(amp_); }
  /// |<x|phi>|^2 for every basis vector.
  std::vector<double> basis_weights() const;

private:
  CVector amp_;
};

class Povm {
public:
  Povm() = default;
  explicit Povm(std::vector<HermitianMatrix> elements, double tol = default_tolerances().feasibility);

  int dim() const { return elements_.front().dim(); }
  int size() const { return static_cast<int>(elements_.size()); }
  const HermitianMatrix& operator[](int x) const { return elements_[static_cast<std::size_t>(x)]; }
  const std::vector<HermitianMatrix>& elements() const { return elements_; }

private:
  std::vector<HermitianMatrix> elements_;
};

/// White-noise parameters for a d-outcome noisy projective measurement.
struct NoiseModel {
  int d;
  double epsilon;
  double A;
  double delta;

  NoiseModel(int d, double epsilon);
};

/// (1-eps) op + (eps/d) tr(op) 1.
HermitianMatrix depolarize(const HermitianMatrix& op, double epsilon);
/// M_x = (1-eps)|x><x| + (eps/d) 1.
Povm noisy_projective(int d, double epsilon);
Povm noisy_projective(const NoiseModel& noise);
/// (1,...,1)/sqrt(d).
PureState unbiased_state(int d);
std::vector<double> born_probabilities(const PureState& state, const Povm& povm);

/// A partition of outcome indices into groups (0-based).
using Partition = std::vector<std::vector<int>>;
/// Checks that the partition covers 0..m-1 exactly once with nonempty parts.
void validate_partition(const Partition& partition, int m);
Povm coarse_grain(const Povm& povm, const Partition& partition);
/// {0,...,d/2-1} and {d/2,...,d-1}.
Partition half_split(int d);

/// Two-outcome qubit POVM with M1 = U diag(m1, m2) U^dagger and M2 = 1 - M1.
/// Requires 0 <= m2 <= m1 <= 1. If tr M1 > tr M2 the two outcomes are swapped
/// and `swapped` (when provided) is set.
Povm two_outcome_qubit(double m1, double m2, const std::optional<CMatrix>& basis = std::nullopt,
                       bool* swapped = nullptr);

/// Permutation matrix P with P|x> = |perm[x]>.
CMatrix permutation_matrix(const std::vector<int>& perm);

} // namespace qrand
