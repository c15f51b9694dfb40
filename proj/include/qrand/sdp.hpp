#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrand/decompositions.hpp"

namespace qrand {

struct SolverConfig {
  double tol = 1e-6;          ///< target duality gap
  int max_iters = 200;        ///< Newton steps across all barrier stages
  double barrier_mu0 = 1.0;
  double restore_eta = 1e-8;  ///< white-noise mixing for rank-deficient POVMs
  int multistarts = 32;
  std::uint64_t seed = 7;
  double search_tol = 1e-4;   ///< accuracy target of the state search
};

struct PrimalProblem {
  Povm povm;
  PureState state;
  int subpovms = 0; ///< 0 means one sub-POVM per outcome
};

/// Dual variables: Y_x >= delta_xj |phi><phi| + G_j with tr G_j = 0.
struct DualCertificate {
  std::vector<HermitianMatrix> Y;
  std::vector<HermitianMatrix> G;
};

struct SolveResult {
  double value = 0.0;
  Decomposition decomposition;
  std::optional<DualCertificate> dual;
  std::optional<double> dual_value;
  std::optional<double> gap;
  int iterations = 0;
  double feasibility_residual = 0.0;
  bool restored = false; ///< POVM was mixed with white noise to get an interior
  double restore_eta = 0.0;
};

/// Maximizes sum_j <phi|K_jj|phi> over decompositions of the POVM with a
/// dense primal log-barrier method. Throws SolverError on failure.
SolveResult solve_primal(const PrimalProblem& problem, const SolverConfig& config = {});

struct DualCheck {
  double dual_value = 0.0;
  bool feasible = false;
  double min_eig_slack = 0.0;
  double max_trace_g = 0.0;
};

DualCheck verify_dual_certificate(const DualCertificate& cert, const PureState& state, const Povm& povm,
                                  double tol);

/// Analytic certificate for the noisy projective measurement at the unbiased
/// state; requires 0 < eps < 1.
DualCertificate build_dual_certificate_noisy_projective(const NoiseModel& noise);

/// Determinant of Y_x - G_j on span{|psi_{!=x,j}>, |psi_xj^perp>}, x != j, d >= 3.
double dual_block_determinant(const NoiseModel& noise, const DualCertificate& cert, int x, int j);

/// max_{x,j} max-norm of K_xj (Y_x - delta_xj |phi><phi| - G_j).
double complementary_slackness_residual(const Decomposition& decomp, const DualCertificate& cert,
                                        const PureState& state);

struct StateSearchResult {
  PureState state;
  double value = 0.0;
  bool certified = false; ///< false if the search budget ran out
  int evaluations = 0;
  std::vector<PureState> ties; ///< other local minima within 1e-6 of the best
};

/// Multistart Nelder-Mead over input states minimizing the SDP value.
StateSearchResult minimize_over_states(const Povm& povm, const SolverConfig& config = {});

} // namespace qrand
