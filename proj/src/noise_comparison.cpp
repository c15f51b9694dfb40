#include "qrand/noise_comparison.hpp"

#include <cmath>
#include <cstdio>

#include "qrand/linalg.hpp"

namespace qrand {

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

} // namespace

double delta_to_epsilon(double delta) {
  check_unit(delta, "delta");
  return 1.0 - std::sqrt(1.0 - delta);
}

double epsilon_to_delta(double epsilon) {
  check_unit(epsilon, "epsilon");
  return epsilon * (2.0 - epsilon);
}

double single_noise_curve(double delta) {
  check_unit(delta, "delta");
  return 0.5 * (1.0 + std::sqrt(delta * (2.0 - delta)));
}

double shared_noise_lower_bound(double delta) {
  check_unit(delta, "delta");
  if (delta >= 0.5) return 1.0;
  return 0.5 * (1.0 + 2.0 * std::sqrt(delta * (1.0 - delta)));
}

std::vector<NoiseCurvePoint> sweep_curves(const std::vector<double>& grid) {
  if (grid.size() > 10000) throw SizeError("grid has more than 10^4 points");
  std::vector<NoiseCurvePoint> out;
  out.reserve(grid.size());
  for (double delta : grid) out.push_back({delta, single_noise_curve(delta), shared_noise_lower_bound(delta)});
  return out;
}

std::vector<double> uniform_grid(int points) {
  if (points < 2 || points > 10000) throw ValidationError("points must be in [2, 10000]");
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(static_cast<double>(i) / (points - 1));
  return g;
}

void write_noise_csv(std::ostream& out, const std::vector<NoiseCurvePoint>& curve) {
  out << "delta,single_noise,shared_lower_bound\n";
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", p.delta, p.single_noise_pguess, p.shared_noise_lower_bound);
    out << buf;
  }
}

} // namespace qrand
