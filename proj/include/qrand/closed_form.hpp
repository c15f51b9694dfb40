#pragma once

#include <optional>
#include <string>

#include "qrand/povm.hpp"

namespace qrand {

enum class GuessMethod { theorem1, theorem2, corollary1_bound, sdp };

std::string to_string(GuessMethod m);

struct GuessReport {
  double pguess = 1.0;
  double hmin_bits = 0.0;
  std::optional<PureState> optimal_state;
  GuessMethod method = GuessMethod::sdp;
  bool relabeled = false; // outcomes were swapped to meet the trace ordering
};

/// -log2(p), clamped at 0 for p >= 1.
double min_entropy_bits(double pguess);

/// Optimal guessing probability of a two-outcome qubit POVM,
/// 1 - tr M1 + (tr sqrt M1)^2 / 2 with tr M1 <= tr M2.
GuessReport pguess_star_qubit_two_outcome(const Povm& povm);

/// (1/d^2)(sqrt A + (d-1) sqrt eps)^2, attained at the unbiased state.
GuessReport pguess_star_noisy_projective(const NoiseModel& noise);

/// tr sqrt(M_1) for the noisy projective measurement.
double trace_sqrt_m1(const NoiseModel& noise);

/// 1 - (sqrt lmax(M1) - sqrt lmin(M1))^2 / 2 for any two-outcome POVM.
GuessReport two_outcome_upper_bound(const Povm& povm);

/// 1 - (lmax(M1) - lmin(M1)) / 2, valid for every input state.
double midpoint_lower_bound(const Povm& povm);

} // namespace qrand
