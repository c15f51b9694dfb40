#pragma once

#include <optional>
#include <string>

#include "qrand/json_io.hpp"

namespace qrand::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailed = 1;
inline constexpr int kBadInput = 2;
inline constexpr int kSolverFailed = 3;

struct Common {
  std::string output;      // empty: stdout
  std::string config_path; // solver config JSON
  std::optional<double> tol;
};

struct ComputeArgs {
  std::string povm, state, decomposition_out;
  bool minimize_state = false;
};
struct CertifyArgs {
  std::string povm, state, decomposition, dual;
  bool analytic = false;
  int d = 0;
  double epsilon = 0.0;
};
struct SweepArgs {
  bool fig3 = false;
  int entropies_d = 0;
  int points = 101;
};
struct EntropiesArgs {
  int d = 0;
  double epsilon = -1.0;
  std::string povm, state, decomposition;
};
struct CoarseArgs {
  int d = 4;
  double epsilon = 0.2;
};
struct JointArgs {
  double epsilon = 0.0;
  bool full = false;
};

/// Raised for argument combinations the parser cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_compute(const Common& c, const ComputeArgs& a);
int cmd_certify(const Common& c, const CertifyArgs& a);
int cmd_sweep(const Common& c, const SweepArgs& a);
int cmd_entropies(const Common& c, const EntropiesArgs& a);
int cmd_coarse(const Common& c, const CoarseArgs& a);
int cmd_joint_noise(const Common& c, const JointArgs& a);

} // namespace qrand::cli
