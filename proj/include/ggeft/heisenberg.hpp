#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggeft/flucts.hpp"
#include "ggeft/pauli.hpp"
#include "ggeft/trajectories.hpp"

namespace ggeft {

struct HeisenbergParams {
  double coupling = 1.0;   // J
  double omega = 1.0;      // level splitting
  double beta = 1.0;       // system inverse temperature
  double beta_r = 0.5;     // reservoir inverse temperature
  double theta = 0.0;      // angle between the spin quantization axes
  double tau = M_PI;       // protocol duration
  double g0 = 1.0;         // drive ramp start gain (driven mode)
  double g_tau = 1.0;      // drive ramp end gain
  int slices = defaults::propagator_slices;

  void validate() const {
    if (tau <= 0.0) throw std::invalid_argument("HeisenbergParams: tau must be positive");
    if (beta <= 0.0 || beta_r <= 0.0)
      throw std::invalid_argument("HeisenbergParams: beta, beta_r must be positive");
  }
};

namespace detail {

inline ComplexMatrix sigma(char axis) { return pauli_letter(axis); }

inline HermitianOperator sigma_op(char axis) {
  return HermitianOperator(pauli_letter(axis), std::string("sigma_") + axis);
}

inline ComplexMatrix heisenberg_coupling(double j_coupling) {
  ComplexMatrix v(4);
  for (char axis : {'X', 'Y', 'Z'}) v += tensor(sigma(axis), sigma(axis));
  return j_coupling * v;
}

inline JointSetup assemble_setup(const HeisenbergParams &p,
                                 const std::vector<HermitianOperator> &charges_0,
                                 const std::vector<HermitianOperator> &charges_tau,
                                 Protocol protocol, bool driven) {
  const double om = p.omega;
  JointSetup s;
  s.d_s = 2;
  s.d_r = 2;
  s.lambda = {om * p.beta * std::sin(p.theta) / 2.0, 0.0, om * p.beta * std::cos(p.theta) / 2.0};
  s.lambda_r = {0.0, 0.0, om * p.beta_r / 2.0};
  s.charges_0 = charges_0;
  s.charges_tau = charges_tau;
  s.charges_res = {sigma_op('X'), sigma_op('Y'), sigma_op('Z')};
  s.charge_labels = {"x", "y", "z"};
  s.driven = driven;

  s.system_initial = build_gibbs_state(ChargeSet(charges_0, s.lambda, "pi0"));
  s.system_final_reference = build_gibbs_state(ChargeSet(charges_tau, s.lambda, "pitau"));
  s.reservoir = build_gibbs_state(ChargeSet(s.charges_res, s.lambda_r, "rhoR"));
  s.reference_initial = build_gibbs_state(ChargeSet(charges_0, s.lambda_r, "ref0"));
  s.reference_final = build_gibbs_state(ChargeSet(charges_tau, s.lambda_r, "reftau"));

  s.protocol = std::move(protocol);
  s.propagator = propagate(s.protocol, PropagatorConfig{p.slices});
  s.validate();
  return s;
}

}  // namespace detail

// Undriven two-qubit exchange model: charges (sigma_x, sigma_y, sigma_z) on
// both bodies, V = J sigma.sigma^R, H = omega (cos t sz + sin t sx)/2,
// H^R = omega sz/2.
inline JointSetup build_exchange_model(const HeisenbergParams &p) {
  p.validate();
  const double om = p.omega, th = p.theta;
  const std::vector<HermitianOperator> charges = {detail::sigma_op('X'), detail::sigma_op('Y'),
                                                  detail::sigma_op('Z')};
  const HermitianOperator hsys(
      om * 0.5 * (std::cos(th) * detail::sigma('Z') + std::sin(th) * detail::sigma('X')), "H");
  Protocol proto;
  proto.duration = p.tau;
  proto.system_hamiltonian = [hsys](double) { return hsys; };
  proto.reservoir_hamiltonian = HermitianOperator(om * 0.5 * detail::sigma('Z'), "HR");
  proto.interaction = HermitianOperator(detail::heisenberg_coupling(p.coupling), "V");
  proto.system_charges = [charges](double) { return charges; };
  proto.reservoir_charges = charges;
  proto.time_independent = true;
  return detail::assemble_setup(p, charges, charges, std::move(proto), /*driven=*/false);
}

// Driven variant: H(t) = omega [g(t) cos t sz + sin t sx]/2 with the linear
// ramp g0 -> g_tau. The system is prepared in the Gibbs state of the
// unscaled charges (the undriven H), and the final measurement charges are
// A^tau = (sx, sy, g_tau sz); the ramp lives in the generator.
inline JointSetup build_driven_model(const HeisenbergParams &p) {
  p.validate();
  const double om = p.omega, th = p.theta;
  const LinearRamp ramp = linear_ramp(p.g0, p.g_tau, p.tau);
  const std::vector<HermitianOperator> charges_0 = {detail::sigma_op('X'), detail::sigma_op('Y'),
                                                    detail::sigma_op('Z')};
  const std::vector<HermitianOperator> charges_tau = {
      detail::sigma_op('X'), detail::sigma_op('Y'),
      HermitianOperator(p.g_tau * detail::sigma('Z'), "g_tau*sigma_z")};

  Protocol proto;
  proto.duration = p.tau;
  proto.g0 = p.g0;
  proto.g_tau = p.g_tau;
  proto.system_hamiltonian = [om, th, ramp](double t) {
    return HermitianOperator(
        om * 0.5 * (ramp(t) * std::cos(th) * detail::sigma('Z') + std::sin(th) * detail::sigma('X')),
        "H(t)");
  };
  proto.reservoir_hamiltonian = HermitianOperator(om * 0.5 * detail::sigma('Z'), "HR");
  proto.interaction = HermitianOperator(detail::heisenberg_coupling(p.coupling), "V");
  proto.system_charges = [ramp](double t) {
    return std::vector<HermitianOperator>{
        detail::sigma_op('X'), detail::sigma_op('Y'),
        HermitianOperator(ramp(t) * detail::sigma('Z'), "g(t)*sigma_z")};
  };
  proto.reservoir_charges = charges_0;
  proto.time_independent = (p.g0 == p.g_tau);
  const bool driven = (p.g_tau != 1.0);
  return detail::assemble_setup(p, charges_0, charges_tau, std::move(proto), driven);
}

enum class SweepMode { exchange, work };

struct SweepRow {
  double theta = 0.0;
  bool ok = false;
  std::string error;
  std::vector<double> E, Q, W;
  double sigma = 0.0;
  double sigma_z = 0.0;
  double ft_exchange = 0.0;     // exchange mode
  double ft_no_eps = 0.0;       // exchange estimator with eps forced to zero
  double ft_work = 0.0;         // work mode, eigen outcomes
  double ft_work_ref = 0.0;     // work mode, reference outcomes
  double ft_normalization = 0.0;
  double detailed_residual_max = 0.0;
  double excluded_mass = 0.0;       // estimator-level
  double ratio_invalid_mass = 0.0;  // forward mass with undefined epsilon ratio
  double lam_we_eigen = 0.0;
  double lam_we_ref = 0.0;
  double sigma_kl = 0.0;
  double max_first_law_residual = 0.0;  // ratio eps vs delta_a - q, valid records
  WorkFTVariantReport variants;         // work mode
};

struct SweepTable {
  SweepMode mode = SweepMode::exchange;
  std::vector<SweepRow> rows;
  std::vector<std::string> charge_labels = {"x", "y", "z"};
};

inline std::vector<double> make_theta_grid(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("make_theta_grid: points must be >= 1");
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k)
    g[k] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  return g;
}

// Row evaluation on an already-built setup (also used by the custom-model
// command path).
inline SweepRow evaluate_setup_row(const JointSetup &setup, SweepMode mode, double theta,
                                   const EstimatorOptions &opts = {}) {
  SweepRow row;
  row.theta = theta;
  const PathEnsemble ens = enumerate_ensemble(setup);
  const EnsembleAverages av = ensemble_averages(ens, opts);
  const EntropyProduction ep = entropy_production(ens, av, opts);

  row.E = av.epsilon;
  row.Q = av.heat;
  row.W = av.work;
  row.sigma = ep.sigma;
  row.sigma_z = ep.per_charge.back();
  row.sigma_kl = ep.kl;
  row.lam_we_eigen = av.lam_we_eigen;
  row.lam_we_ref = av.lam_we_ref;
  row.ratio_invalid_mass = ens.excluded_mass;
  for (const auto &r : ens.records)
    if (r.eps_valid)
      for (size_t k = 0; k < r.eps.size(); ++k)
        row.max_first_law_residual = std::max(
            row.max_first_law_residual, std::abs(r.delta_a[k] - r.q[k] - r.eps[k]));

  if (mode == SweepMode::exchange) {
    EstimatorOptions o = opts;
    row.ft_exchange = integral_exchange_ft(ens, o).value;
    o.force_epsilon_zero = true;
    row.ft_no_eps = integral_exchange_ft(ens, o).value;
    row.detailed_residual_max = detailed_residuals(ens, ResidualMode::exchange, opts).max_abs;
    row.excluded_mass = opts.identity_epsilon ? 0.0 : ens.excluded_mass;
    const WorkFTResult norm = integral_work_ft(ens, opts);
    row.ft_normalization = opts.literal_eq5 ? norm.normalization_literal : norm.normalization;
  } else {
    const WorkFTResult wft = integral_work_ft(ens, opts);
    row.ft_work = wft.decomposition;
    row.ft_work_ref = wft.decomposition_ref;
    row.ft_normalization = opts.literal_eq5 ? wft.normalization_literal : wft.normalization;
    row.detailed_residual_max = detailed_residuals(ens, ResidualMode::work, opts).max_abs;
    row.excluded_mass = av.excluded_mass;
    row.variants = work_ft_variants(ens);
  }
  row.ok = true;
  return row;
}

inline SweepRow evaluate_sweep_point(SweepMode mode, double theta, HeisenbergParams p,
                                     const EstimatorOptions &opts = {}) {
  p.theta = theta;
  const JointSetup setup =
      (mode == SweepMode::work) ? build_driven_model(p) : build_exchange_model(p);
  return evaluate_setup_row(setup, mode, theta, opts);
}

// One row per grid point; a failed point keeps its slot with error text and
// the remaining points are still evaluated.
inline SweepTable run_sweep(SweepMode mode, const std::vector<double> &grid,
                            const HeisenbergParams &params, const EstimatorOptions &opts = {}) {
  SweepTable table;
  table.mode = mode;
  table.rows.reserve(grid.size());
  for (double theta : grid) {
    try {
      table.rows.push_back(evaluate_sweep_point(mode, theta, params, opts));
    } catch (const std::exception &e) {
      SweepRow bad;
      bad.theta = theta;
      bad.ok = false;
      bad.error = e.what();
      table.rows.push_back(std::move(bad));
    }
  }
  return table;
}

// CSV: header + one line per row, 17 significant digits, LF endings. Failed
// rows become '#' comment lines carrying the error.
inline void write_sweep_csv(const SweepTable &t, std::ostream &os) {
  const auto &lab = t.charge_labels;
  os << "theta";
  for (const auto &l : lab) os << ",E_" << l;
  for (const auto &l : lab) os << ",Q_" << l;
  if (t.mode == SweepMode::work)
    for (const auto &l : lab) os << ",W_" << l;
  os << ",Sigma,Sigma_z";
  if (t.mode == SweepMode::exchange)
    os << ",ft_exchange,ft_no_eps";
  else
    os << ",ft_work,ft_work_ref,ft_normalization";
  os << ",detailed_residual_max,excluded_mass\n";
  char buf[32];
  auto num = [&](double x, bool lead = false) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    if (!lead) os << ',';
    os << buf;
  };
  for (const auto &r : t.rows) {
    if (!r.ok) {
      os << "# theta=";
      std::snprintf(buf, sizeof buf, "%.17g", r.theta);
      os << buf << " error: " << r.error << '\n';
      continue;
    }
    num(r.theta, true);
    for (double x : r.E) num(x);
    for (double x : r.Q) num(x);
    if (t.mode == SweepMode::work)
      for (double x : r.W) num(x);
    num(r.sigma);
    num(r.sigma_z);
    if (t.mode == SweepMode::exchange) {
      num(r.ft_exchange);
      num(r.ft_no_eps);
    } else {
      num(r.ft_work);
      num(r.ft_work_ref);
      num(r.ft_normalization);
    }
    num(r.detailed_residual_max);
    num(r.excluded_mass);
    os << '\n';
  }
}

}  // namespace ggeft
