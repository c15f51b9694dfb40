#include "cli_commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qrand/noise_comparison.hpp"

namespace qrand::cli {

namespace {

double validation_tol(const Common& c) { return c.tol ? *c.tol : default_tolerances().feasibility; }

SolverConfig solver_config(const Common& c) {
  SolverConfig cfg;
  if (!c.config_path.empty()) cfg = solver_config_from_json(read_json_file(c.config_path));
  return cfg;
}

// Writes through a temporary file so readers never see partial output.
void emit_text(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  const std::string tmp = c.output + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, c.output);
}

void emit_json(const Common& c, Json j) {
  round_numbers(j, 12);
  emit_text(c, j.dump(2) + "\n");
}

// Full precision; data files are meant to be read back and re-verified.
void write_json_file(const std::string& path, const Json& j) {
  emit_text(Common{path, {}, std::nullopt}, j.dump(2) + "\n");
}

// eps when the POVM is {(1-eps)|x><x| + (eps/d) 1} in the computational basis.
std::optional<double> detect_noisy_projective(const Povm& povm) {
  const int d = povm.dim();
  if (povm.size() != d || d < 2) return std::nullopt;
  const double eps = d * povm[0](1, 1).real();
  if (eps < -1e-12 || eps > 1.0 + 1e-12) return std::nullopt;
  const double e = std::clamp(eps, 0.0, 1.0);
  const Povm ref = noisy_projective(d, e);
  for (int x = 0; x < d; ++x)
    if (max_abs_diff(povm[x].mat(), ref[x].mat()) > 1e-10) return std::nullopt;
  return e;
}

bool is_unbiased_for(const PureState& s, const CMatrix& basis) {
  for (int k = 0; k < s.dim(); ++k) {
    double w = std::norm(basis.col(k).dot(s.amplitudes()));
    if (std::abs(w - 1.0 / s.dim()) > 1e-9) return false;
  }
  return true;
}

// The closed form applicable to the POVM, and whether `state` (if given)
// attains it.
std::optional<GuessReport> closed_form(const Povm& povm, const std::optional<PureState>& state) {
  if (povm.dim() == 2 && povm.size() == 2) {
    if (state) {
      Spectrum sp = eig_hermitian(povm[0]);
      bool degenerate = sp.max() - sp.min() < 1e-12;
      if (!degenerate && !is_unbiased_for(*state, sp.eigenvectors)) return std::nullopt;
    }
    return pguess_star_qubit_two_outcome(povm);
  }
  if (auto eps = detect_noisy_projective(povm)) {
    const int d = povm.dim();
    if (state && !is_unbiased_for(*state, CMatrix::Identity(d, d))) return std::nullopt;
    return pguess_star_noisy_projective(NoiseModel(d, *eps));
  }
  return std::nullopt;
}

Json sdp_json(const SolveResult& r) {
  Json j{{"value", r.value},
         {"iterations", r.iterations},
         {"feasibility_residual", r.feasibility_residual},
         {"restored", r.restored}};
  if (r.restored) j["restore_eta"] = r.restore_eta;
  if (r.dual_value) j["dual_value"] = *r.dual_value;
  if (r.gap) j["gap"] = *r.gap;
  return j;
}

} // namespace

int cmd_compute(const Common& c, const ComputeArgs& a) {
  const Povm povm = povm_from_json(read_json_file(a.povm));
  std::optional<PureState> state;
  if (!a.state.empty()) {
    state = state_from_json(read_json_file(a.state));
    if (state->dim() != povm.dim()) throw ValidationError("state and POVM dimensions differ");
  }
  const SolverConfig cfg = solver_config(c);
  Json out;
  if (a.minimize_state || !state) {
    if (auto cf = closed_form(povm, std::nullopt)) {
      out = to_json(*cf);
    } else {
      StateSearchResult s = minimize_over_states(povm, cfg);
      GuessReport r;
      r.pguess = s.value;
      r.hmin_bits = min_entropy_bits(s.value);
      r.optimal_state = s.state;
      out = to_json(r);
      out["certified"] = s.certified;
      out["evaluations"] = s.evaluations;
      out["ties"] = s.ties.size();
    }
  } else if (auto cf = closed_form(povm, state)) {
    out = to_json(*cf);
    out["state"] = to_json(*state);
  } else {
    SolveResult r = solve_primal({povm, *state, 0}, cfg);
    GuessReport g;
    g.pguess = r.value;
    g.hmin_bits = min_entropy_bits(r.value);
    out = to_json(g);
    out["state"] = to_json(*state);
    out["sdp"] = sdp_json(r);
    if (!a.decomposition_out.empty()) write_json_file(a.decomposition_out, to_json(r.decomposition));
  }
  out["solver"] = to_json(cfg);
  out["tolerance"] = validation_tol(c);
  emit_json(c, out);
  return kOk;
}

int cmd_certify(const Common& c, const CertifyArgs& a) {
  const double tol = validation_tol(c);
  Json out;
  bool passed = false;
  if (a.analytic) {
    if (a.d < 2) throw UsageError("--analytic needs --d >= 2");
    const NoiseModel noise(a.d, a.epsilon);
    const PureState psi = unbiased_state(a.d);
    const Povm povm = noisy_projective(noise);
    const Decomposition K = sqrt_decomposition_qudit(noise, psi).decomposition;
    const DualCertificate cert = build_dual_certificate_noisy_projective(noise);
    const DecompositionReport primal = verify_decomposition(K, povm, tol);
    const DualCheck dual = verify_dual_certificate(cert, psi, povm, tol);
    const double value = K.guess_value(psi);
    const double slack = complementary_slackness_residual(K, cert, psi);
    passed = primal.passed && dual.feasible && std::abs(dual.dual_value - value) <= tol && slack <= tol;
    out = {{"primal_value", value}, {"primal", to_json(primal)}, {"dual", to_json(dual)},
           {"dual_value", dual.dual_value}, {"gap", dual.dual_value - value}, {"slackness_residual", slack}};
  } else {
    if (a.povm.empty() || a.state.empty() || a.decomposition.empty())
      throw UsageError("certify needs --povm, --state and --decomposition, or --analytic");
    const Povm povm = povm_from_json(read_json_file(a.povm));
    const PureState state = state_from_json(read_json_file(a.state));
    const Decomposition K = decomposition_from_json(read_json_file(a.decomposition));
    if (K.dim() != povm.dim() || K.outcomes() != povm.size() || state.dim() != povm.dim())
      throw ValidationError("decomposition, POVM and state shapes are inconsistent");
    DualCertificate cert;
    if (!a.dual.empty()) {
      cert = dual_certificate_from_json(read_json_file(a.dual));
    } else {
      cert = *solve_primal({povm, state, K.subpovms()}, solver_config(c)).dual;
    }
    const DecompositionReport primal = verify_decomposition(K, povm, tol);
    const DualCheck dual = verify_dual_certificate(cert, state, povm, tol);
    const double value = K.guess_value(state);
    out = {{"primal_value", value}, {"primal", to_json(primal)}, {"dual", to_json(dual)},
           {"dual_value", dual.dual_value}, {"gap", dual.dual_value - value}};
    if (static_cast<int>(cert.G.size()) == K.subpovms())
      out["slackness_residual"] = complementary_slackness_residual(K, cert, state);
    passed = primal.passed && dual.feasible;
  }
  out["tolerance"] = tol;
  out["passed"] = passed;
  emit_json(c, out);
  return passed ? kOk : kValidationFailed;
}

int cmd_sweep(const Common& c, const SweepArgs& a) {
  std::ostringstream csv;
  if (a.fig3) {
    write_noise_csv(csv, sweep_curves(uniform_grid(a.points)));
  } else if (a.entropies_d >= 2) {
    write_entropy_csv(csv, entropy_curves(a.entropies_d, a.points));
  } else {
    throw UsageError("sweep needs --fig3 or --entropies d (d >= 2)");
  }
  emit_text(c, csv.str());
  return kOk;
}

int cmd_entropies(const Common& c, const EntropiesArgs& a) {
  Json out;
  PsecrConfig pc;
  if (a.d >= 2) {
    const NoiseModel noise(a.d, a.epsilon);
    EntropyReport r = noisy_projective_entropy_report(noise, pc);
    out = to_json(r);
    out["bounds"]["hmin_star"] = state_side_comparison(noise).hmin_star;
    out["d"] = a.d;
    out["epsilon"] = a.epsilon;
  } else {
    if (a.povm.empty() || a.state.empty() || a.decomposition.empty())
      throw UsageError("entropies needs --d and --epsilon, or --povm, --state and --decomposition");
    const Povm povm = povm_from_json(read_json_file(a.povm));
    const PureState state = state_from_json(read_json_file(a.state));
    const Decomposition K = decomposition_from_json(read_json_file(a.decomposition));
    const DecompositionReport check = verify_decomposition(K, povm, validation_tol(c));
    if (!check.passed) {
      Json err{{"error", "decomposition does not reproduce the POVM"}, {"primal", to_json(check)}};
      emit_json(c, err);
      return kValidationFailed;
    }
    out = to_json(entropy_report(eve_ensemble_from_decomposition(state, K), pc));
  }
  out["tolerance"] = pc.tol;
  emit_json(c, out);
  return out["p_secr_converged"].get<bool>() ? kOk : kValidationFailed;
}

int cmd_coarse(const Common& c, const CoarseArgs& a) {
  if (a.d < 4 || a.d % 2 != 0) throw UsageError("coarse needs an even --d >= 4");
  const double tol = validation_tol(c);
  const NoiseModel noise(a.d, a.epsilon);
  const NoiseModel qubit(2, a.epsilon);
  const Povm coarse = coarse_grain(noisy_projective(noise), half_split(a.d));
  const PureState block = block_uniform_state(a.d, std::sqrt(0.5), std::sqrt(0.5));

  const Decomposition inflated =
      inflate_qubit_decomposition(noise, sqrt_decomposition_qubit(noisy_projective(qubit), unbiased_state(2)));
  const DecompositionReport inflated_check = verify_decomposition(inflated, coarse, tol);
  const Decomposition eve = coarse_grain_eve_attack(
      sqrt_decomposition_qudit(noise, unbiased_state(a.d)).decomposition, half_split(a.d));
  const DecompositionReport eve_check = verify_decomposition(eve, coarse, tol);
  const SolveResult sdp = solve_primal({coarse, block, 0}, solver_config(c));

  Json out{{"d", a.d},
           {"epsilon", a.epsilon},
           {"optimal", pguess_star_noisy_projective(qubit).pguess},
           {"inflated_attack", inflated.guess_value(block)},
           {"inflated_attack_closed_form", inflated_attack_value(a.epsilon, std::sqrt(0.5))},
           {"inflated_check", to_json(inflated_check)},
           {"coarse_grained_eve", eve.guess_value(block)},
           {"coarse_grained_eve_closed_form", coarse_grained_attack_value(noise)},
           {"coarse_grained_eve_check", to_json(eve_check)},
           {"sdp", sdp_json(sdp)},
           {"tolerance", tol}};
  emit_json(c, out);
  return inflated_check.passed && eve_check.passed ? kOk : kValidationFailed;
}

int cmd_joint_noise(const Common& c, const JointArgs& a) {
  const double tol = validation_tol(c);
  const JointDecomposition jd = joint_noise_decomposition(a.epsilon);
  const JointReport report = verify_joint_decomposition(jd, tol);
  const double delta = epsilon_to_delta(a.epsilon);
  Json out{{"epsilon", a.epsilon},
           {"epsilon_star", epsilon_star()},
           {"delta", delta},
           {"guess_value", jd.guess_value()},
           {"shared_noise_lower_bound", shared_noise_lower_bound(delta)},
           {"single_noise_at_delta", single_noise_curve(delta)},
           {"branches", jd.branches.size()},
           {"report", to_json(report)},
           {"tolerance", tol}};
  if (a.full) out["decomposition"] = to_json(jd);
  emit_json(c, out);
  return report.passed ? kOk : kValidationFailed;
}

} // namespace qrand::cli
