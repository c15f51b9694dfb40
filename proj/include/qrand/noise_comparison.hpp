#pragma once

#include <ostream>
#include <vector>

namespace qrand {

struct NoiseCurvePoint {
  double delta = 0.0;
  double single_noise_pguess = 0.0;
  double shared_noise_lower_bound = 0.0;
};

/// eps = 1 - sqrt(1 - delta), the inverse of delta = eps (2 - eps).
double delta_to_epsilon(double delta);
double epsilon_to_delta(double epsilon);

/// (1 + sqrt(delta (2 - delta))) / 2: qubit noisy projective measurement at eps = delta.
double single_noise_curve(double delta);

/// (1 + 2 sqrt(delta (1 - delta))) / 2 for delta < 1/2, else 1. Only a lower
/// bound: it is the value of one explicit joint attack.
double shared_noise_lower_bound(double delta);

std::vector<NoiseCurvePoint> sweep_curves(const std::vector<double>& grid);
/// `points` equally spaced values in [0, 1].
std::vector<double> uniform_grid(int points);
void write_noise_csv(std::ostream& out, const std::vector<NoiseCurvePoint>& curve);

} // namespace qrand
