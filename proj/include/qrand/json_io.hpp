#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qrand/closed_form.hpp"
#include "qrand/entropy.hpp"
#include "qrand/sdp.hpp"

namespace qrand {

using Json = nlohmann::json;

/// Structurally malformed JSON input (wrong keys, shapes or types).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json to_json(const HermitianMatrix& m);
HermitianMatrix matrix_from_json(const Json& j);

Json to_json(const Povm& povm);
Povm povm_from_json(const Json& j);

Json to_json(const PureState& s);
PureState state_from_json(const Json& j);

Json to_json(const Decomposition& d);
Decomposition decomposition_from_json(const Json& j);

Json to_json(const DualCertificate& c);
DualCertificate dual_certificate_from_json(const Json& j);

Json to_json(const SolverConfig& c);
/// Missing keys keep the values of `base`.
SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {});

Json to_json(const GuessReport& r);
Json to_json(const DecompositionReport& r);
Json to_json(const DualCheck& r);
Json to_json(const EntropyReport& r);
Json to_json(const JointReport& r);
Json to_json(const JointDecomposition& jd);

/// Reads and parses a file; throws FormatError on I/O or syntax errors.
Json read_json_file(const std::string& path);

/// Rounds every floating-point number in place to `digits` significant digits.
void round_numbers(Json& j, int digits = 12);

} // namespace qrand
