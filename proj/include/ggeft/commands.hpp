#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "ggeft/config.hpp"

namespace ggeft {

// exit codes shared by the CLI subcommands
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_row_failures = 2;

inline SweepTable run_config_sweep(const RunConfig &cfg) {
  const EstimatorOptions opts = cfg.estimator_options();
  if (cfg.mode == "custom") {
    const JointSetup setup = build_custom_model(cfg.custom);
    SweepTable t;
    t.mode = SweepMode::exchange;
    t.charge_labels = setup.charge_labels;
    try {
      t.rows.push_back(evaluate_setup_row(setup, SweepMode::exchange, 0.0, opts));
    } catch (const std::exception &e) {
      SweepRow bad;
      bad.ok = false;
      bad.error = e.what();
      t.rows.push_back(std::move(bad));
    }
    return t;
  }
  const SweepMode mode = (cfg.mode == "work") ? SweepMode::work : SweepMode::exchange;
  HeisenbergParams p = cfg.heisenberg;
  p.slices = cfg.propagator.slices;
  const std::vector<double> grid =
      make_theta_grid(cfg.grid.theta_min, cfg.grid.theta_max, cfg.grid.points);
  return run_sweep(mode, grid, p, opts);
}

// `sweep`: CSV to out_path, one summary line to `out`.
inline int cmd_sweep(const RunConfig &cfg, const std::string &out_path, std::ostream &out,
                     std::ostream &err) {
  const SweepTable table = run_config_sweep(cfg);
  if (out_path.empty()) {
    err << "sweep: no output path given (config \"out\" or --out)\n";
    return exit_config_error;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) {
    err << "sweep: cannot write '" << out_path << "'\n";
    return exit_config_error;
  }
  write_sweep_csv(table, os);

  double max_ft_dev = 0.0, min_sigma = HUGE_VAL;
  int failures = 0;
  for (const auto &r : table.rows) {
    if (!r.ok) {
      ++failures;
      continue;
    }
    const double ft = (table.mode == SweepMode::exchange) ? r.ft_exchange : r.ft_work;
    max_ft_dev = std::max(max_ft_dev, std::abs(ft - 1.0));
    min_sigma = std::min(min_sigma, r.sigma);
  }
  out << "rows=" << table.rows.size() << " max|ft-1|=" << std::scientific
      << std::setprecision(3) << max_ft_dev << " min<Sigma>=" << min_sigma
      << " failures=" << failures << "\n";
  return failures == 0 ? exit_ok : exit_row_failures;
}

struct VerifyCheck {
  std::string name;
  bool hard = true;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

struct VerifyResult {
  std::vector<VerifyCheck> checks;
  nlohmann::json report;  // FTReport of the worst-ft point + diagnostics
  bool all_hard_pass() const {
    for (const auto &c : checks)
      if (c.hard && !c.pass) return false;
    return true;
  }
};

// The invariant suite behind `verify`: normalizations, first-law closure,
// exchange FT / sigma positivity for undriven setups, and the work-FT
// variant diagnostics for driven ones.
inline VerifyResult run_verify(const RunConfig &cfg) {
  const EstimatorOptions opts = cfg.estimator_options();
  VerifyResult vr;

  std::vector<std::pair<double, JointSetup>> setups;
  if (cfg.mode == "custom") {
    setups.emplace_back(0.0, build_custom_model(cfg.custom));
  } else {
    HeisenbergParams p = cfg.heisenberg;
    p.slices = cfg.propagator.slices;
    for (double th :
         make_theta_grid(cfg.grid.theta_min, cfg.grid.theta_max, cfg.grid.points)) {
      p.theta = th;
      setups.emplace_back(th, cfg.mode == "work" ? build_driven_model(p)
                                                 : build_exchange_model(p));
    }
  }

  double max_fwd_norm_dev = 0.0, max_rev_norm_dev = 0.0, max_first_law = 0.0,
         max_closure = 0.0, max_ft_dev = 0.0, min_sigma = HUGE_VAL, max_kl_gap = 0.0,
         max_exchange_resid = 0.0, max_work_resid = 0.0, worst_ft = -1.0;
  bool any_driven = false;
  nlohmann::json variants_json = nlohmann::json::array();
  nlohmann::json worst_report;

  for (const auto &[theta, setup] : setups) {
    const PathEnsemble ens = enumerate_ensemble(setup);
    double fwd = 0.0;
    for (const auto &r : ens.records) fwd += r.p_forward;
    max_fwd_norm_dev = std::max(max_fwd_norm_dev, std::abs(fwd - 1.0));

    const WorkFTResult wft = integral_work_ft(ens, opts);
    max_rev_norm_dev = std::max(max_rev_norm_dev, std::abs(wft.normalization - 1.0));

    for (const auto &r : ens.records)
      if (r.eps_valid)
        for (size_t k = 0; k < r.eps.size(); ++k) {
          max_closure = std::max(
              max_closure, std::abs(r.delta_a[k] - r.q[k] - r.eps[k] - r.w[k]));
          if (!setup.driven)
            max_first_law =
                std::max(max_first_law, std::abs(r.delta_a[k] - r.q[k] - r.eps[k]));
        }

    const EnsembleAverages av = ensemble_averages(ens, opts);
    const EntropyProduction ep = entropy_production(ens, av, opts);
    if (!setup.driven) {
      const double ft = integral_exchange_ft(ens, opts).value;
      const double dev = std::abs(ft - 1.0);
      max_ft_dev = std::max(max_ft_dev, dev);
      min_sigma = std::min(min_sigma, ep.sigma);
      max_kl_gap = std::max(max_kl_gap, std::abs(ep.sigma - ep.kl));
      max_exchange_resid = std::max(
          max_exchange_resid, detailed_residuals(ens, ResidualMode::exchange, opts).max_abs);
      if (dev > worst_ft) {
        worst_ft = dev;
        worst_report = to_json(build_ft_report(ens, opts));
        worst_report["theta"] = theta;
      }
    } else {
      any_driven = true;
      max_work_resid = std::max(max_work_resid,
                                detailed_residuals(ens, ResidualMode::work, opts).max_abs);
      const WorkFTVariantReport wrep = work_ft_variants(ens);
      nlohmann::json v;
      v["theta"] = theta;
      v["normalization_default"] = wrep.normalization_default;
      v["normalization_literal"] = wrep.normalization_literal;
      v["decomposition_literal_sign"] = wrep.decomposition_literal_sign;
      v["best_variant"] = wrep.best_variant;
      v["variants"] = nlohmann::json::array();
      for (const auto &row : wrep.rows)
        v["variants"].push_back(
            {{"eq5_reading", row.eq5_reading}, {"da_basis", row.da_basis}, {"value", row.value}});
      variants_json.push_back(std::move(v));
      const double dev = std::abs(wft.decomposition - 1.0);
      if (dev > worst_ft) {
        worst_ft = dev;
        worst_report = to_json(build_ft_report(ens, opts));
        worst_report["theta"] = theta;
      }
    }
  }

  auto add = [&](const std::string &name, bool hard, double value, double bound, bool le) {
    VerifyCheck c;
    c.name = name;
    c.hard = hard;
    c.value = value;
    c.bound = bound;
    c.pass = le ? (value <= bound) : (value >= bound);
    vr.checks.push_back(c);
  };
  add("forward_normalization_dev", true, max_fwd_norm_dev, 1e-10, true);
  add("reverse_normalization_dev", true, max_rev_norm_dev, 1e-10, true);
  add("first_law_closure_dev", true, max_closure, 1e-12, true);
  if (!any_driven) {
    add("first_law_identity_dev", true, max_first_law, 1e-9, true);
    add("exchange_ft_dev", true, max_ft_dev, 1e-10, true);
    add("sigma_min", true, min_sigma, -1e-12, false);
    add("sigma_kl_gap", true, max_kl_gap, 1e-9, true);
    add("exchange_detailed_residual", true, max_exchange_resid, 1e-9, true);
  } else {
    add("work_detailed_residual_info", false, max_work_resid, 0.0, true);
  }

  vr.report["checks"] = nlohmann::json::array();
  for (const auto &c : vr.checks)
    vr.report["checks"].push_back({{"name", c.name},
                                   {"hard", c.hard},
                                   {"pass", c.pass},
                                   {"value", c.value},
                                   {"bound", c.bound}});
  vr.report["ft_report"] = worst_report;
  if (any_driven) vr.report["work_ft_variants"] = variants_json;
  return vr;
}

inline int cmd_verify(const RunConfig &cfg, const std::string &out_path, std::ostream &out,
                      std::ostream &err) {
  VerifyResult vr;
  try {
    vr = run_verify(cfg);
  } catch (const std::exception &e) {
    err << "verify: " << e.what() << "\n";
    return exit_config_error;
  }
  for (const auto &c : vr.checks)
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << std::scientific
        << std::setprecision(6) << c.value << (c.hard ? "" : " (informational)") << "\n";
  if (!out_path.empty()) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) {
      err << "verify: cannot write '" << out_path << "'\n";
      return exit_config_error;
    }
    os << vr.report.dump(2) << "\n";
  } else {
    out << vr.report.dump(2) << "\n";
  }
  return vr.all_hard_pass() ? exit_ok : exit_row_failures;
}

inline int cmd_trajectories(const RunConfig &cfg, double theta, const std::string &out_path,
                            std::ostream &err) {
  JointSetup setup;
  try {
    if (cfg.mode == "custom") {
      setup = build_custom_model(cfg.custom);
    } else {
      HeisenbergParams p = cfg.heisenberg;
      p.slices = cfg.propagator.slices;
      p.theta = theta;
      setup = (cfg.mode == "work") ? build_driven_model(p) : build_exchange_model(p);
    }
  } catch (const std::exception &e) {
    err << "trajectories: " << e.what() << "\n";
    return exit_config_error;
  }
  const PathEnsemble ens = enumerate_ensemble(setup);
  std::ofstream os(out_path, std::ios::binary);
  if (!os) {
    err << "trajectories: cannot write '" << out_path << "'\n";
    return exit_config_error;
  }
  write_trajectory_csv(ens, os);
  return exit_ok;
}

}  // namespace ggeft
