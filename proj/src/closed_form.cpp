#include "qrand/closed_form.hpp"

#include <algorithm>
#include <cmath>

namespace qrand {

std::string to_string(GuessMethod m) {
  switch (m) {
  case GuessMethod::theorem1: return "theorem1";
  case GuessMethod::theorem2: return "theorem2";
  case GuessMethod::corollary1_bound: return "corollary1-bound";
  case GuessMethod::sdp: return "sdp";
  }
  return "unknown";
}

double min_entropy_bits(double pguess) {
  if (!(pguess > 0.0)) throw DomainError("guessing probability must be positive");
  return std::max(0.0, -std::log2(pguess));
}

namespace {

void require_two_outcomes(const Povm& povm) {
  if (povm.size() != 2) throw ValidationError("expected a two-outcome POVM");
}

CVector balanced(const CVector& a, const CVector& b) { return (a + b) / std::sqrt(2.0); }

} // namespace

GuessReport pguess_star_qubit_two_outcome(const Povm& povm) {
  require_two_outcomes(povm);
  if (povm.dim() != 2) throw ValidationError("expected a qubit POVM");
  GuessReport r;
  r.method = GuessMethod::theorem1;
  r.relabeled = povm[0].trace() > povm[1].trace();
  const HermitianMatrix& m1 = povm[r.relabeled ? 1 : 0];
  Spectrum s = eig_hermitian(m1);
  double tr_sqrt = std::sqrt(std::max(s.eigenvalues(0), 0.0)) + std::sqrt(std::max(s.eigenvalues(1), 0.0));
  r.pguess = std::min(1.0, 1.0 - m1.trace() + 0.5 * tr_sqrt * tr_sqrt);
  r.hmin_bits = min_entropy_bits(r.pguess);
  r.optimal_state = PureState(balanced(s.eigenvectors.col(0), s.eigenvectors.col(1)));
  return r;
}

double trace_sqrt_m1(const NoiseModel& noise) {
  return (std::sqrt(noise.A) + (noise.d - 1) * std::sqrt(noise.epsilon)) / std::sqrt(static_cast<double>(noise.d));
}

GuessReport pguess_star_noisy_projective(const NoiseModel& noise) {
  GuessReport r;
  r.method = GuessMethod::theorem2;
  double t = trace_sqrt_m1(noise);
  r.pguess = std::min(1.0, t * t / noise.d);
  r.hmin_bits = min_entropy_bits(r.pguess);
  r.optimal_state = unbiased_state(noise.d);
  return r;
}

GuessReport two_outcome_upper_bound(const Povm& povm) {
  require_two_outcomes(povm);
  Spectrum s0 = eig_hermitian(povm[0]);
  Spectrum s1 = eig_hermitian(povm[1]);
  GuessReport r;
  r.method = GuessMethod::corollary1_bound;
  r.relabeled = s0.max() + s0.min() > s1.max() + s1.min();
  const Spectrum& s = r.relabeled ? s1 : s0;
  double lmax = std::max(s.max(), 0.0);
  double lmin = std::max(s.min(), 0.0);
  double gap = std::sqrt(lmax) - std::sqrt(lmin);
  r.pguess = 1.0 - 0.5 * gap * gap;
  r.hmin_bits = min_entropy_bits(r.pguess);
  const auto last = s.eigenvectors.cols() - 1;
  r.optimal_state = PureState(balanced(s.eigenvectors.col(0), s.eigenvectors.col(last)));
  return r;
}

double midpoint_lower_bound(const Povm& povm) {
  require_two_outcomes(povm);
  Spectrum s = eig_hermitian(povm[0]);
  return 1.0 - 0.5 * (s.max() - s.min());
}

} // namespace qrand
