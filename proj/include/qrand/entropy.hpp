#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "qrand/decompositions.hpp"

namespace qrand {

/// Eve's classical-quantum ensemble {p(x), rho_x}. Outcomes with p(x) = 0 are
/// flagged in `empty` and excluded from every entropy sum.
struct EveEnsemble {
  std::vector<double> probs;
  std::vector<HermitianMatrix> states;
  std::vector<bool> empty;

  int outcomes() const { return static_cast<int>(probs.size()); }
  int dim() const { return states.empty() ? 0 : states.front().dim(); }
};

/// Checks probabilities and states; throws ValidationError.
void validate_ensemble(const EveEnsemble& ens, double tol = 1e-9);

/// p(x) rho_x = sum_j <phi|K_xj|phi> |j><j|.
EveEnsemble eve_ensemble_from_decomposition(const PureState& state, const Decomposition& decomp);

/// H(p) + sum_x p(x) S(rho_x) - S(sum_x p(x) rho_x).
double conditional_vn_entropy(const EveEnsemble& ens);

/// Guessing probability sum_j max_x p(x) rho_x[j][j]; the states must be
/// diagonal (DomainError otherwise).
double ensemble_guess_probability(const EveEnsemble& ens, double tol = 1e-9);
double conditional_min_entropy(const EveEnsemble& ens);

struct PsecrConfig {
  double tol = 1e-6;
  int restarts = 8;
  std::uint64_t seed = 7;
  int max_iters = 2000;
};

struct PsecrResult {
  double value = 0.0; ///< best value found (the lower bound)
  double lower = 0.0;
  double upper = 0.0;
  bool converged = false; ///< upper - lower <= tol
  HermitianMatrix sigma;
};

/// max over density matrices sigma of (sum_x sqrt p(x) F(rho_x, sigma))^2.
PsecrResult p_secr(const EveEnsemble& ens, const PsecrConfig& config = {});

/// H2(P*) + (1 - P*) log2(d - 1).
double vn_bound_noisy_projective(const NoiseModel& noise);
/// log2(d - (d-1) eps).
double hmax_bound_noisy_projective(const NoiseModel& noise);

/// Entropies of the noisy state rho_psi = Delta_eps(|psi><psi|).
struct StateComparison {
  double hmin_star = 0.0;       ///< -log2 P*(M_d)
  double state_vn_star = 0.0;   ///< log2 d - S(rho_psi)
  double state_hmax_star = 0.0; ///< log2 d + log2 lambda_max(rho_psi)
};
StateComparison state_side_comparison(const NoiseModel& noise);

struct EntropyBounds {
  double vn_bound = 0.0;
  double hmax_bound = 0.0;
  double state_vn_star = 0.0;
  double state_hmax_star = 0.0;
};

struct EntropyReport {
  double hmin = 0.0;
  double h_vn = 0.0;
  double hmax = 0.0;
  double p_secr = 0.0;
  double p_secr_lower = 0.0;
  double p_secr_upper = 0.0;
  bool p_secr_converged = false;
  std::optional<EntropyBounds> bounds;
};

EntropyReport entropy_report(const EveEnsemble& ens, const PsecrConfig& config = {});
/// Report for the square-root ensemble at the unbiased state, with bounds.
EntropyReport noisy_projective_entropy_report(const NoiseModel& noise, const PsecrConfig& config = {});

struct EntropyCurveRow {
  double epsilon, hmax_bound, vn_bound, state_vn_star, hmin_star;
};
/// Closed-form curves on a uniform grid of `points` values of eps in [0, 1].
std::vector<EntropyCurveRow> entropy_curves(int d, int points);
void write_entropy_csv(std::ostream& out, const std::vector<EntropyCurveRow>& rows);

} // namespace qrand
