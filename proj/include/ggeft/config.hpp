#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>  // vendored nlohmann/json

#include "ggeft/heisenberg.hpp"

namespace ggeft {

// versioned JSON run configuration (the model-file contract)
struct RunConfig {
  int schema_version = 1;
  std::string mode = "exchange";  // exchange | work | custom

  // heisenberg model parameters (mode exchange/work)
  HeisenbergParams heisenberg;

  // custom model (mode custom): pauli expressions + affinities, undriven
  struct CustomModel {
    int n_sites_system = 1;
    int n_sites_reservoir = 1;
    std::vector<std::string> system_charges;
    std::vector<std::string> reservoir_charges;
    std::vector<double> affinities;
    std::vector<double> reservoir_affinities;
    std::string system_hamiltonian;     // optional, defaults to zero
    std::string reservoir_hamiltonian;  // optional, defaults to zero
    std::string interaction;  // on system+reservoir sites, system sites first
    double tau = 1.0;
  } custom;

  struct Grid {
    double theta_min = 0.0;
    double theta_max = M_PI;
    int points = 65;
  } grid;

  PropagatorConfig propagator;
  std::vector<std::string> flags;  // literal-eq5 | force-epsilon-zero | mn-basis-variant
  std::string out_path;

  bool has_flag(const std::string &f) const {
    for (const auto &x : flags)
      if (x == f) return true;
    return false;
  }

  EstimatorOptions estimator_options() const {
    EstimatorOptions o;
    o.force_epsilon_zero = has_flag("force-epsilon-zero");
    o.reference_basis_delta_a = has_flag("mn-basis-variant");
    o.literal_eq5 = has_flag("literal-eq5");
    return o;
  }
};

inline void to_json(nlohmann::json &j, const RunConfig &c) {
  j["schema_version"] = c.schema_version;
  j["mode"] = c.mode;
  if (c.mode == "custom") {
    j["model"] = {{"type", "custom"},
                  {"n_sites_system", c.custom.n_sites_system},
                  {"n_sites_reservoir", c.custom.n_sites_reservoir},
                  {"system_charges", c.custom.system_charges},
                  {"reservoir_charges", c.custom.reservoir_charges},
                  {"affinities", c.custom.affinities},
                  {"reservoir_affinities", c.custom.reservoir_affinities},
                  {"system_hamiltonian", c.custom.system_hamiltonian},
                  {"reservoir_hamiltonian", c.custom.reservoir_hamiltonian},
                  {"interaction", c.custom.interaction},
                  {"tau", c.custom.tau}};
  } else {
    j["model"] = {{"type", "heisenberg"},
                  {"J", c.heisenberg.coupling},
                  {"omega", c.heisenberg.omega},
                  {"beta", c.heisenberg.beta},
                  {"beta_r", c.heisenberg.beta_r},
                  {"tau", c.heisenberg.tau},
                  {"g0", c.heisenberg.g0},
                  {"g_tau", c.heisenberg.g_tau},
                  {"slices", c.heisenberg.slices}};
  }
  j["grid"] = {{"theta_min", c.grid.theta_min},
               {"theta_max", c.grid.theta_max},
               {"points", c.grid.points}};
  j["propagator"] = {{"slices", c.propagator.slices},
                     {"target_error", c.propagator.target_error},
                     {"max_slices", c.propagator.max_slices}};
  j["flags"] = c.flags;
  if (!c.out_path.empty()) j["out"] = c.out_path;
}

inline void from_json(const nlohmann::json &j, RunConfig &c) {
  if (!j.contains("schema_version"))
    throw std::invalid_argument("config: missing schema_version");
  c.schema_version = j.at("schema_version").get<int>();
  if (c.schema_version != 1)
    throw std::invalid_argument("config: unsupported schema_version " +
                                std::to_string(c.schema_version));
  c.mode = j.value("mode", std::string("exchange"));
  if (c.mode != "exchange" && c.mode != "work" && c.mode != "custom")
    throw std::invalid_argument("config: mode must be exchange|work|custom");
  if (j.contains("model")) {
    const auto &m = j.at("model");
    const std::string type = m.value("type", std::string("heisenberg"));
    if (type == "heisenberg") {
      c.heisenberg.coupling = m.value("J", 1.0);
      c.heisenberg.omega = m.value("omega", 1.0);
      c.heisenberg.beta = m.value("beta", 1.0);
      c.heisenberg.beta_r = m.value("beta_r", 0.5);
      c.heisenberg.tau = m.value("tau", M_PI);
      c.heisenberg.g0 = m.value("g0", 1.0);
      c.heisenberg.g_tau = m.value("g_tau", 1.0);
      c.heisenberg.slices = m.value("slices", defaults::propagator_slices);
    } else if (type == "custom") {
      if (c.mode != "custom")
        throw std::invalid_argument("config: custom model requires mode=custom");
      c.custom.n_sites_system = m.at("n_sites_system").get<int>();
      c.custom.n_sites_reservoir = m.at("n_sites_reservoir").get<int>();
      c.custom.system_charges = m.at("system_charges").get<std::vector<std::string>>();
      c.custom.reservoir_charges = m.at("reservoir_charges").get<std::vector<std::string>>();
      c.custom.affinities = m.at("affinities").get<std::vector<double>>();
      c.custom.reservoir_affinities = m.at("reservoir_affinities").get<std::vector<double>>();
      c.custom.system_hamiltonian = m.value("system_hamiltonian", std::string());
      c.custom.reservoir_hamiltonian = m.value("reservoir_hamiltonian", std::string());
      c.custom.interaction = m.at("interaction").get<std::string>();
      c.custom.tau = m.value("tau", 1.0);
    } else {
      throw std::invalid_argument("config: unknown model type '" + type + "'");
    }
  }
  if (j.contains("grid")) {
    const auto &g = j.at("grid");
    c.grid.theta_min = g.value("theta_min", 0.0);
    c.grid.theta_max = g.value("theta_max", M_PI);
    c.grid.points = g.value("points", 65);
    if (c.grid.points < 1) throw std::invalid_argument("config: grid.points must be >= 1");
  }
  if (j.contains("propagator")) {
    const auto &p = j.at("propagator");
    c.propagator.slices = p.value("slices", defaults::propagator_slices);
    c.propagator.target_error = p.value("target_error", defaults::propagator_target_error);
    c.propagator.max_slices = p.value("max_slices", defaults::propagator_max_slices);
  }
  if (j.contains("flags")) c.flags = j.at("flags").get<std::vector<std::string>>();
  for (const auto &f : c.flags)
    if (f != "literal-eq5" && f != "force-epsilon-zero" && f != "mn-basis-variant")
      throw std::invalid_argument("config: unknown flag '" + f + "'");
  c.out_path = j.value("out", std::string());
}

inline RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument("config '" + path + "': " + e.what());
  }
  RunConfig c;
  from_json(j, c);
  return c;
}

// Custom (undriven) model assembled from pauli expressions.
inline JointSetup build_custom_model(const RunConfig::CustomModel &m) {
  const int ns = m.n_sites_system, nr = m.n_sites_reservoir;
  if (ns + nr > 6) throw std::invalid_argument("custom model: dimension cap exceeded");
  if (m.system_charges.size() != m.reservoir_charges.size() ||
      m.system_charges.size() != m.affinities.size() ||
      m.affinities.size() != m.reservoir_affinities.size())
    throw std::invalid_argument("custom model: charge/affinity list lengths mismatch");

  std::vector<HermitianOperator> sys, res;
  std::vector<std::string> labels;
  for (size_t k = 0; k < m.system_charges.size(); ++k) {
    sys.push_back(expr_to_matrix(parse_pauli_expr(m.system_charges[k], ns)));
    res.push_back(expr_to_matrix(parse_pauli_expr(m.reservoir_charges[k], nr)));
    labels.push_back("k" + std::to_string(k));
  }
  const HermitianOperator v = expr_to_matrix(parse_pauli_expr(m.interaction, ns + nr), "V");

  JointSetup s;
  s.d_s = 1 << ns;
  s.d_r = 1 << nr;
  s.lambda = m.affinities;
  s.lambda_r = m.reservoir_affinities;
  s.charges_0 = sys;
  s.charges_tau = sys;
  s.charges_res = res;
  s.charge_labels = labels;
  s.driven = false;

  s.system_initial = build_gibbs_state(ChargeSet(sys, s.lambda, "pi0"));
  s.system_final_reference = s.system_initial;
  s.reservoir = build_gibbs_state(ChargeSet(res, s.lambda_r, "rhoR"));
  s.reference_initial = build_gibbs_state(ChargeSet(sys, s.lambda_r, "ref0"));
  s.reference_final = s.reference_initial;

  Protocol proto;
  proto.duration = m.tau;
  const HermitianOperator hs =
      m.system_hamiltonian.empty()
          ? HermitianOperator(ComplexMatrix::zero(s.d_s), "H")
          : expr_to_matrix(parse_pauli_expr(m.system_hamiltonian, ns), "H");
  proto.system_hamiltonian = [hs](double) { return hs; };
  proto.reservoir_hamiltonian =
      m.reservoir_hamiltonian.empty()
          ? HermitianOperator(ComplexMatrix::zero(s.d_r), "HR")
          : expr_to_matrix(parse_pauli_expr(m.reservoir_hamiltonian, nr), "HR");
  proto.interaction = v;
  proto.system_charges = [sys](double) { return sys; };
  proto.reservoir_charges = res;
  proto.time_independent = true;
  s.protocol = std::move(proto);
  s.propagator = propagate(s.protocol);
  s.validate();
  return s;
}

}  // namespace ggeft
