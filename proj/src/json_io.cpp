#include "qrand/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qrand {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw FormatError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("missing key \"") + key + "\"");
  return *it;
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string("\"") + key + "\" must be an integer");
  return v.get<int>();
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("complex numbers are written as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

void check_dim(int d) {
  if (d < 1) throw FormatError("\"dim\" must be positive");
  if (d > kMaxDim) throw SizeError("dimension exceeds " + std::to_string(kMaxDim));
}

} // namespace

Json to_json(const HermitianMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.dim(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return {{"dim", m.dim()}, {"entries", rows}};
}

HermitianMatrix matrix_from_json(const Json& j) {
  const int d = int_field(j, "dim");
  check_dim(d);
  const Json& rows = field(j, "entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != d) throw FormatError("\"entries\" must have dim rows");
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != d) throw FormatError("each row must have dim entries");
    for (int k = 0; k < d; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return HermitianMatrix(m);
}

Json to_json(const Povm& povm) {
  Json els = Json::array();
  for (const auto& e : povm.elements()) els.push_back(to_json(e));
  return {{"dim", povm.dim()}, {"elements", els}};
}

Povm povm_from_json(const Json& j) {
  const int d = int_field(j, "dim");
  check_dim(d);
  const Json& els = field(j, "elements");
  if (!els.is_array()) throw FormatError("\"elements\" must be an array");
  std::vector<HermitianMatrix> elements;
  for (const auto& e : els) {
    elements.push_back(matrix_from_json(e));
    if (elements.back().dim() != d) throw FormatError("POVM element dimension differs from \"dim\"");
  }
  return Povm(std::move(elements));
}

Json to_json(const PureState& s) {
  Json amps = Json::array();
  for (int i = 0; i < s.dim(); ++i) amps.push_back(complex_to_json(s[i]));
  return {{"dim", s.dim()}, {"amplitudes", amps}};
}

PureState state_from_json(const Json& j) {
  const int d = int_field(j, "dim");
  check_dim(d);
  const Json& amps = field(j, "amplitudes");
  if (!amps.is_array() || static_cast<int>(amps.size()) != d) throw FormatError("\"amplitudes\" must have dim entries");
  CVector a(d);
  for (int i = 0; i < d; ++i) a(i) = complex_from_json(amps[static_cast<std::size_t>(i)]);
  return PureState(a);
}

Json to_json(const Decomposition& d) {
  Json K = Json::array();
  for (int x = 0; x < d.outcomes(); ++x) {
    Json row = Json::array();
    for (int j = 0; j < d.subpovms(); ++j) row.push_back(to_json(d(x, j)));
    K.push_back(row);
  }
  return {{"dim", d.dim()}, {"outcomes", d.outcomes()}, {"subpovms", d.subpovms()}, {"K", K}};
}

Decomposition decomposition_from_json(const Json& j) {
  const int d = int_field(j, "dim");
  check_dim(d);
  const int m = int_field(j, "outcomes"), n = int_field(j, "subpovms");
  if (m < 1 || n < 1) throw FormatError("\"outcomes\" and \"subpovms\" must be positive");
  const Json& K = field(j, "K");
  if (!K.is_array() || static_cast<int>(K.size()) != m) throw FormatError("\"K\" must have one row per outcome");
  std::vector<std::vector<HermitianMatrix>> table;
  for (const auto& row : K) {
    if (!row.is_array() || static_cast<int>(row.size()) != n) throw FormatError("each row of \"K\" needs subpovms entries");
    std::vector<HermitianMatrix> r;
    for (const auto& e : row) {
      r.push_back(matrix_from_json(e));
      if (r.back().dim() != d) throw FormatError("K entry dimension differs from \"dim\"");
    }
    table.push_back(std::move(r));
  }
  return Decomposition(std::move(table));
}

Json to_json(const DualCertificate& c) {
  Json Y = Json::array(), G = Json::array();
  for (const auto& y : c.Y) Y.push_back(to_json(y));
  for (const auto& g : c.G) G.push_back(to_json(g));
  return {{"Y", Y}, {"G", G}};
}

DualCertificate dual_certificate_from_json(const Json& j) {
  DualCertificate c;
  const Json& Y = field(j, "Y");
  const Json& G = field(j, "G");
  if (!Y.is_array() || !G.is_array()) throw FormatError("\"Y\" and \"G\" must be arrays");
  for (const auto& y : Y) c.Y.push_back(matrix_from_json(y));
  for (const auto& g : G) c.G.push_back(matrix_from_json(g));
  return c;
}

Json to_json(const SolverConfig& c) {
  return {{"tol", c.tol},
          {"max_iters", c.max_iters},
          {"barrier_mu0", c.barrier_mu0},
          {"restore_eta", c.restore_eta},
          {"multistarts", c.multistarts},
          {"seed", c.seed},
          {"search_tol", c.search_tol}};
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig c) {
  if (!j.is_object()) throw FormatError("solver config must be an object");
  auto num = [&](const char* key, double& out) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw FormatError(std::string("\"") + key + "\" must be a number");
      out = it->get<double>();
    }
  };
  auto integer = [&](const char* key, auto& out) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number_integer()) throw FormatError(std::string("\"") + key + "\" must be an integer");
      out = it->get<std::decay_t<decltype(out)>>();
    }
  };
  num("tol", c.tol);
  num("barrier_mu0", c.barrier_mu0);
  num("restore_eta", c.restore_eta);
  num("search_tol", c.search_tol);
  integer("max_iters", c.max_iters);
  integer("multistarts", c.multistarts);
  integer("seed", c.seed);
  if (!(c.tol > 0) || !(c.barrier_mu0 > 0) || !(c.restore_eta > 0) || c.max_iters < 1 || c.multistarts < 1)
    throw ValidationError("solver config values out of range");
  return c;
}

Json to_json(const GuessReport& r) {
  Json j{{"pguess", r.pguess}, {"hmin_bits", r.hmin_bits}, {"method", to_string(r.method)}, {"relabeled", r.relabeled}};
  if (r.optimal_state) j["optimal_state"] = to_json(*r.optimal_state);
  return j;
}

Json to_json(const DecompositionReport& r) {
  return {{"psd_violation", r.psd_violation},
          {"proportionality_violation", r.proportionality_violation},
          {"reconstruction_violation", r.reconstruction_violation},
          {"tol", r.tol},
          {"passed", r.passed}};
}

Json to_json(const DualCheck& r) {
  return {{"dual_value", r.dual_value},
          {"feasible", r.feasible},
          {"min_eig_slack", r.min_eig_slack},
          {"max_trace_g", r.max_trace_g}};
}

Json to_json(const EntropyReport& r) {
  Json j{{"hmin", r.hmin},
         {"h_vn", r.h_vn},
         {"hmax", r.hmax},
         {"p_secr", r.p_secr},
         {"p_secr_interval", {r.p_secr_lower, r.p_secr_upper}},
         {"p_secr_converged", r.p_secr_converged}};
  if (r.bounds) {
    j["bounds"] = {{"vn_bound", r.bounds->vn_bound},
                   {"hmax_bound", r.bounds->hmax_bound},
                   {"state_vn_star", r.bounds->state_vn_star},
                   {"state_hmax_star", r.bounds->state_hmax_star},
                   {"note", "vn_bound and hmax_bound are upper bounds on the optimal entropies of the measurement"}};
  }
  return j;
}

Json to_json(const JointReport& r) {
  return {{"weight_violation", r.weight_violation},
          {"povm_violation", r.povm_violation},
          {"state_violation", r.state_violation},
          {"measurement_violation", r.measurement_violation},
          {"born_violation", r.born_violation},
          {"passed", r.passed}};
}

Json to_json(const JointDecomposition& jd) {
  Json branches = Json::array();
  for (const auto& b : jd.branches) {
    Json povm = Json::array();
    for (const auto& n : b.povm) povm.push_back(to_json(n));
    branches.push_back({{"i", b.i}, {"j", b.j}, {"lambda", b.lambda}, {"weight", b.weight},
                        {"state", to_json(b.state)}, {"povm", povm}});
  }
  return {{"epsilon", jd.epsilon}, {"branches", branches}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void round_numbers(Json& j, int digits) {
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (std::isfinite(v)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*g", digits, v);
      j = std::strtod(buf, nullptr);
    }
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v, digits);
  }
}

} // namespace qrand
