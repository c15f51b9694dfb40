#include <iostream>

#include <CLI11.hpp>

#include "cli_commands.hpp"

using namespace qrand;

int main(int argc, char** argv) {
  CLI::App app{"Randomness certification for noisy quantum measurements"};
  app.require_subcommand(1);

  cli::Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", common.output, "Output file (default: stdout)");
    sub->add_option("--config", common.config_path, "Solver config JSON");
    sub->add_option("--tol", common.tol, "Validation tolerance (default: QRAND_TOL or 1e-9)");
  };

  cli::ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Optimal guessing probability of a POVM");
  c->add_option("--povm", compute.povm, "POVM JSON")->required();
  c->add_option("--state", compute.state, "State JSON");
  c->add_flag("--minimize-state", compute.minimize_state, "Minimize over input states");
  c->add_option("--decomposition-out", compute.decomposition_out, "Write the SDP decomposition here");
  add_common(c);

  cli::CertifyArgs certify;
  auto* ce = app.add_subcommand("certify", "Validate a primal/dual pair");
  ce->add_option("--povm", certify.povm, "POVM JSON");
  ce->add_option("--state", certify.state, "State JSON");
  ce->add_option("--decomposition", certify.decomposition, "Decomposition JSON");
  ce->add_option("--dual", certify.dual, "Dual certificate JSON");
  ce->add_flag("--analytic", certify.analytic, "Analytic pair for the noisy projective measurement");
  ce->add_option("--d", certify.d, "Dimension (with --analytic)");
  ce->add_option("--epsilon", certify.epsilon, "Noise level (with --analytic)");
  add_common(ce);

  cli::SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Emit figure data as CSV");
  auto* fig3 = s->add_flag("--fig3", sweep.fig3, "Shared versus single noise curves");
  auto* ent = s->add_option("--entropies", sweep.entropies_d, "Entropy curves for dimension d");
  fig3->excludes(ent);
  s->add_option("--points", sweep.points, "Grid size")->check(CLI::Range(2, 10000));
  add_common(s);

  cli::EntropiesArgs entropies;
  auto* e = app.add_subcommand("entropies", "Conditional entropies of Eve's ensemble");
  e->add_option("--d", entropies.d, "Dimension of the noisy projective measurement");
  e->add_option("--epsilon", entropies.epsilon, "Noise level");
  e->add_option("--povm", entropies.povm, "POVM JSON");
  e->add_option("--state", entropies.state, "State JSON");
  e->add_option("--decomposition", entropies.decomposition, "Decomposition JSON");
  add_common(e);

  cli::CoarseArgs coarse;
  auto* co = app.add_subcommand("coarse", "Coarse-graining of a noisy projective measurement");
  co->add_option("--d", coarse.d, "Even dimension >= 4");
  co->add_option("--epsilon", coarse.epsilon, "Noise level");
  add_common(co);

  cli::JointArgs joint;
  auto* j = app.add_subcommand("joint-noise", "Joint state and measurement noise attack");
  j->add_option("--epsilon", joint.epsilon, "Noise level in (0, 1)")->required();
  j->add_flag("--full", joint.full, "Include every branch of the decomposition");
  add_common(j);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : cli::kBadInput;
  }

  try {
    if (*c) return cli::cmd_compute(common, compute);
    if (*ce) return cli::cmd_certify(common, certify);
    if (*s) return cli::cmd_sweep(common, sweep);
    if (*e) return cli::cmd_entropies(common, entropies);
    if (*co) return cli::cmd_coarse(common, coarse);
    if (*j) return cli::cmd_joint_noise(common, joint);
  } catch (const SolverError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return cli::kSolverFailed;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "malformed JSON: " << err.what() << "\n";
    return cli::kBadInput;
  } catch (const FormatError& err) {
    std::cerr << "malformed JSON: " << err.what() << "\n";
    return cli::kBadInput;
  } catch (const cli::UsageError& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return cli::kBadInput;
  } catch (const std::invalid_argument& err) {
    std::cerr << "invalid input: " << err.what() << "\n";
    return cli::kBadInput;
  } catch (const std::domain_error& err) {
    std::cerr << "out of range: " << err.what() << "\n";
    return cli::kBadInput;
  } catch (const std::length_error& err) {
    std::cerr << "too large: " << err.what() << "\n";
    return cli::kBadInput;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return cli::kValidationFailed;
  }
  return cli::kBadInput;
}
