#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggeft/trajectories.hpp"

#include <json.hpp>  // vendored nlohmann/json

namespace ggeft {

struct EstimatorOptions {
  // Undriven default: evaluate lambda.eps through the conservation identity
  // lambda.(delta_a - q) so zero-V-element records need no ratio.
  bool identity_epsilon = true;
  bool force_epsilon_zero = false;
  bool reference_basis_delta_a = false;  // (m,n)-outcome variant of delta_a
  bool literal_eq5 = false;              // reverse-probability reading
};

namespace detail {

// sum_r weight_r * exp(x_r), evaluated with a max-shift.
class LogSpaceAccumulator {
 public:
  void add(double weight, double exponent) {
    if (weight <= 0.0) return;
    terms_.push_back({weight, exponent});
    xmax_ = std::max(xmax_, exponent);
  }
  double value() const {
    if (terms_.empty()) return 0.0;
    double s = 0.0;
    for (const auto &t : terms_) s += t.w * std::exp(t.x - xmax_);
    return s * std::exp(xmax_);
  }

 private:
  struct Term {
    double w, x;
  };
  std::vector<Term> terms_;
  double xmax_ = -std::numeric_limits<double>::infinity();
};

inline double contract(const std::vector<double> &lam, const std::vector<double> &v) {
  double s = 0.0;
  for (size_t k = 0; k < lam.size(); ++k) s += lam[k] * v[k];
  return s;
}

inline std::vector<double> affinity_difference(const JointSetup &s) {
  std::vector<double> d(s.lambda.size());
  for (size_t k = 0; k < d.size(); ++k) d[k] = s.lambda[k] - s.lambda_r[k];
  return d;
}

}  // namespace detail

struct ExchangeFTResult {
  double value = 0.0;
  double excluded_mass = 0.0;  // forward mass the estimator had to drop
  bool identity_mode = true;
  bool approximate() const { return excluded_mass > 1e-9; }
};

// Integral exchange FT, <exp(-lambda.eps - dlambda.q)> over P(Gamma).
// Undriven setups only (endpoint charges must coincide).
inline ExchangeFTResult integral_exchange_ft(const PathEnsemble &ens,
                                             const EstimatorOptions &opts = {}) {
  const JointSetup &s = ens.setup;
  if (s.driven)
    throw std::invalid_argument("integral_exchange_ft: driven setup (use integral_work_ft)");
  const std::vector<double> dlam = detail::affinity_difference(s);
  ExchangeFTResult res;
  res.identity_mode = opts.identity_epsilon && !opts.force_epsilon_zero;
  detail::LogSpaceAccumulator acc;
  for (const auto &r : ens.records) {
    double lam_eps;
    if (opts.force_epsilon_zero) {
      lam_eps = 0.0;
    } else if (opts.identity_epsilon) {
      lam_eps = detail::contract(s.lambda, r.delta_a) - detail::contract(s.lambda, r.q);
    } else {
      if (!r.eps_valid) {
        res.excluded_mass += r.p_forward;
        continue;
      }
      lam_eps = detail::contract(s.lambda, r.eps);
    }
    acc.add(r.p_forward, -lam_eps - detail::contract(dlam, r.q));
  }
  res.value = acc.value();
  return res;
}

struct WorkFTResult {
  double decomposition = 0.0;      // Eq.(7) route, eigen-outcome delta_a
  double decomposition_ref = 0.0;  // same with reference-outcome delta_a
  double normalization = 0.0;          // sum of P^dag, default Eq.(5) reading
  double normalization_literal = 0.0;  // literal p^tau_i reading
  double excluded_mass = 0.0;          // mass dropped for dc/dd flags
  bool approximate() const { return excluded_mass > 1e-9; }
};

// Work FT routes. The decomposition exponent is
//   -lambda.(w+eps) - dlambda.q + dF^r - dc - dd,
// with w+eps evaluated as delta_a - q (exact by the first-law split) so the
// route needs no epsilon ratio. The sign on (dc, dd) is fixed against the
// commuting-limit reduction; the literal printed sign is reported separately
// by the variant report.
inline WorkFTResult integral_work_ft(const PathEnsemble &ens, const EstimatorOptions &opts = {}) {
  const JointSetup &s = ens.setup;
  const std::vector<double> dlam = detail::affinity_difference(s);
  const double dfr = s.reference_final.massieu - s.reference_initial.massieu;
  WorkFTResult res;
  detail::LogSpaceAccumulator acc, acc_ref;
  for (const auto &r : ens.records) {
    res.normalization += r.p_reverse;
    res.normalization_literal += r.p_reverse_literal;
    if (!r.log_valid) {
      res.excluded_mass += r.p_forward;
      continue;
    }
    const double common = -detail::contract(dlam, r.q) + dfr - r.dc - r.dd;
    double we = detail::contract(s.lambda, r.delta_a) - detail::contract(s.lambda, r.q);
    double we_ref = detail::contract(s.lambda, r.delta_a_ref) - detail::contract(s.lambda, r.q);
    if (opts.force_epsilon_zero && r.eps_valid) {
      // drop the epsilon part: keep lambda.w only
      we -= detail::contract(s.lambda, r.eps);
      we_ref -= detail::contract(s.lambda, r.eps);
    }
    acc.add(r.p_forward, -we + common);
    acc_ref.add(r.p_forward, -we_ref + common);
  }
  res.decomposition = acc.value();
  res.decomposition_ref = acc_ref.value();
  return res;
}

struct DetailedResiduals {
  double max_abs = 0.0;
  std::vector<double> table;  // aligned with ensemble record order; NaN where skipped
};

enum class ResidualMode { exchange, work };

// delta(Gamma) = ln(P/P^dag) - claimed exponent, over records with both
// probabilities above the floor. Exchange mode claims lambda.eps + dlambda.q;
// work mode claims lambda.(w+eps) + dlambda.q - dF^r + dc + dd.
inline DetailedResiduals detailed_residuals(const PathEnsemble &ens, ResidualMode mode,
                                            const EstimatorOptions &opts = {}) {
  const JointSetup &s = ens.setup;
  const std::vector<double> dlam = detail::affinity_difference(s);
  const double dfr = s.reference_final.massieu - s.reference_initial.massieu;
  DetailedResiduals out;
  out.table.assign(ens.records.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t idx = 0; idx < ens.records.size(); ++idx) {
    const auto &r = ens.records[idx];
    const double prev = opts.literal_eq5 ? r.p_reverse_literal : r.p_reverse;
    if (r.p_forward <= defaults::prob_floor || prev <= defaults::prob_floor) continue;
    double claimed;
    if (mode == ResidualMode::exchange) {
      double lam_eps;
      if (opts.identity_epsilon) {
        lam_eps = detail::contract(s.lambda, r.delta_a) - detail::contract(s.lambda, r.q);
      } else {
        if (!r.eps_valid) continue;
        lam_eps = detail::contract(s.lambda, r.eps);
      }
      claimed = lam_eps + detail::contract(dlam, r.q);
    } else {
      if (!r.log_valid) continue;
      const auto &da = opts.reference_basis_delta_a ? r.delta_a_ref : r.delta_a;
      const double we = detail::contract(s.lambda, da) - detail::contract(s.lambda, r.q);
      claimed = we + detail::contract(dlam, r.q) - dfr + r.dc + r.dd;
    }
    const double delta = std::log(r.p_forward / prev) - claimed;
    out.table[idx] = delta;
    out.max_abs = std::max(out.max_abs, std::abs(delta));
  }
  return out;
}

struct EnsembleAverages {
  std::vector<double> work;          // <w>, per charge
  std::vector<double> epsilon;       // <eps>, per charge
  std::vector<double> heat;          // <q>, per charge
  double dc_stochastic = 0.0;        // <dc> over unflagged records
  double dd_stochastic = 0.0;
  double dC_endpoint = 0.0;  // C(pi^tau||ref^tau) - C(pi^0||ref^0)
  double dD_endpoint = 0.0;
  double dFr = 0.0;          // F^{r,tau} - F^{r,0}
  double dF = 0.0;           // F^tau - F^0 (system Massieu difference)
  double lam_we_eigen = 0.0;  // lambda.<delta_a - q>, eigen outcomes, full lattice
  double lam_we_ref = 0.0;    // same with reference outcomes
  double excluded_mass = 0.0; // mass outside the ratio-valid set (driven W/E columns)
};

// Probability-weighted sums. Undriven setups use the identity route for eps
// (full lattice, w = 0); driven setups average the ratio-formula eps and w
// over valid records and report the excluded mass.
inline EnsembleAverages ensemble_averages(const PathEnsemble &ens,
                                          const EstimatorOptions &opts = {}) {
  const JointSetup &s = ens.setup;
  const int nc = s.n_charges();
  EnsembleAverages av;
  av.work.assign(nc, 0.0);
  av.epsilon.assign(nc, 0.0);
  av.heat.assign(nc, 0.0);
  const bool identity = opts.identity_epsilon && !s.driven;
  for (const auto &r : ens.records) {
    for (int k = 0; k < nc; ++k) av.heat[k] += r.p_forward * r.q[k];
    av.lam_we_eigen += r.p_forward * (detail::contract(s.lambda, r.delta_a) -
                                      detail::contract(s.lambda, r.q));
    av.lam_we_ref += r.p_forward * (detail::contract(s.lambda, r.delta_a_ref) -
                                    detail::contract(s.lambda, r.q));
    if (identity) {
      for (int k = 0; k < nc; ++k) av.epsilon[k] += r.p_forward * (r.delta_a[k] - r.q[k]);
    } else if (r.eps_valid) {
      for (int k = 0; k < nc; ++k) {
        av.epsilon[k] += r.p_forward * r.eps[k];
        av.work[k] += r.p_forward * r.w[k];
      }
    } else {
      av.excluded_mass += r.p_forward;
    }
    if (r.log_valid) {
      av.dc_stochastic += r.p_forward * r.dc;
      av.dd_stochastic += r.p_forward * r.dd;
    }
  }
  av.dC_endpoint = rel_entropy_coherence(s.system_final_reference, s.reference_final) -
                   rel_entropy_coherence(s.system_initial, s.reference_initial);
  av.dD_endpoint = athermality(s.system_final_reference, s.reference_final) -
                   athermality(s.system_initial, s.reference_initial);
  av.dFr = s.reference_final.massieu - s.reference_initial.massieu;
  av.dF = s.system_final_reference.massieu - s.system_initial.massieu;
  return av;
}

struct EntropyProduction {
  double sigma = 0.0;
  std::vector<double> per_charge;
  double second_law_gap = 0.0;  // LHS - RHS of the averaged inequality
  double kl = 0.0;              // sum P ln(P/P^dag), cross-check route
};

// Exchange: sigma = lambda.E + dlambda.Q. Driven: sigma = lambda.(W+E) +
// dlambda.Q - dFcal with dFcal = dF^r + dC + dD from endpoint functionals.
inline EntropyProduction entropy_production(const PathEnsemble &ens,
                                            const EnsembleAverages &av,
                                            const EstimatorOptions &opts = {}) {
  const JointSetup &s = ens.setup;
  const std::vector<double> dlam = detail::affinity_difference(s);
  const int nc = s.n_charges();
  EntropyProduction ep;
  ep.per_charge.assign(nc, 0.0);
  const double lam_we = opts.reference_basis_delta_a ? av.lam_we_ref : av.lam_we_eigen;
  const double dFcal = av.dFr + av.dC_endpoint + av.dD_endpoint;
  if (s.driven) {
    ep.sigma = lam_we + detail::contract(dlam, av.heat) - dFcal;
    for (int k = 0; k < nc; ++k)
      ep.per_charge[k] =
          s.lambda[k] * (av.work[k] + av.epsilon[k]) + dlam[k] * av.heat[k];
  } else {
    ep.sigma = detail::contract(s.lambda, av.epsilon) + detail::contract(dlam, av.heat);
    for (int k = 0; k < nc; ++k)
      ep.per_charge[k] = s.lambda[k] * av.epsilon[k] + dlam[k] * av.heat[k];
  }
  ep.second_law_gap = lam_we + detail::contract(dlam, av.heat) - dFcal;
  for (const auto &r : ens.records) {
    const double prev = opts.literal_eq5 ? r.p_reverse_literal : r.p_reverse;
    if (r.p_forward > defaults::prob_floor && prev > defaults::prob_floor)
      ep.kl += r.p_forward * std::log(r.p_forward / prev);
  }
  return ep;
}

// Eq.(7) decomposition route under the 2x2 variant grid demanded by the
// diagnostics: Eq.(5) reading x delta_a outcome basis. The route is a forward
// average, so the reading cannot change its value; the report keeps both rows
// to document exactly that, alongside the reading-dependent normalization.
struct WorkFTVariantReport {
  struct Row {
    std::string eq5_reading;
    std::string da_basis;
    double value = 0.0;
  };
  std::vector<Row> rows;
  double normalization_default = 0.0;
  double normalization_literal = 0.0;
  double decomposition_literal_sign = 0.0;  // literal +dc+dd exponent, eigen basis
  std::string best_variant;
};

inline WorkFTVariantReport work_ft_variants(const PathEnsemble &ens) {
  const JointSetup &s = ens.setup;
  const std::vector<double> dlam = detail::affinity_difference(s);
  const double dfr = s.reference_final.massieu - s.reference_initial.massieu;
  const WorkFTResult base = integral_work_ft(ens);
  WorkFTVariantReport rep;
  rep.rows = {{"final_index_default", "eigen_outcomes", base.decomposition},
              {"final_index_default", "reference_outcomes", base.decomposition_ref},
              {"literal_initial_index", "eigen_outcomes", base.decomposition},
              {"literal_initial_index", "reference_outcomes", base.decomposition_ref}};
  rep.normalization_default = base.normalization;
  rep.normalization_literal = base.normalization_literal;
  detail::LogSpaceAccumulator lit;
  for (const auto &r : ens.records) {
    if (!r.log_valid) continue;
    const double we =
        detail::contract(s.lambda, r.delta_a) - detail::contract(s.lambda, r.q);
    lit.add(r.p_forward, -we - detail::contract(dlam, r.q) + dfr + r.dc + r.dd);
  }
  rep.decomposition_literal_sign = lit.value();
  double best = std::numeric_limits<double>::infinity();
  for (const auto &row : rep.rows) {
    const double dev = std::abs(row.value - 1.0);
    if (dev < best) {
      best = dev;
      rep.best_variant = row.eq5_reading + "/" + row.da_basis;
    }
  }
  return rep;
}

struct FTReport {
  double ft_exchange = std::numeric_limits<double>::quiet_NaN();
  double ft_work = std::numeric_limits<double>::quiet_NaN();
  double ft_normalization = 0.0;
  double max_detailed_residual = 0.0;
  std::vector<double> W, E, Q;
  double delta_C = 0.0, delta_D = 0.0;       // stochastic averages <dc>, <dd>
  double delta_C_endpoint = 0.0, delta_D_endpoint = 0.0;
  double delta_F_r = 0.0;
  double delta_F_cal = 0.0;  // dF^r + dC + dD (endpoint functionals)
  double sigma = 0.0;
  std::vector<double> sigma_per_charge;
  double sigma_kl = 0.0;
  double second_law_gap = 0.0;
  double excluded_mass = 0.0;
  bool mode_identity_epsilon = true;
  bool mode_force_epsilon_zero = false;
  bool mode_reference_basis_delta_a = false;
  bool mode_literal_eq5 = false;
  bool driven = false;
};

inline FTReport build_ft_report(const PathEnsemble &ens, const EstimatorOptions &opts = {}) {
  const JointSetup &s = ens.setup;
  FTReport rep;
  rep.driven = s.driven;
  rep.mode_identity_epsilon = opts.identity_epsilon;
  rep.mode_force_epsilon_zero = opts.force_epsilon_zero;
  rep.mode_reference_basis_delta_a = opts.reference_basis_delta_a;
  rep.mode_literal_eq5 = opts.literal_eq5;

  const EnsembleAverages av = ensemble_averages(ens, opts);
  rep.W = av.work;
  rep.E = av.epsilon;
  rep.Q = av.heat;
  rep.delta_C = av.dc_stochastic;
  rep.delta_D = av.dd_stochastic;
  rep.delta_C_endpoint = av.dC_endpoint;
  rep.delta_D_endpoint = av.dD_endpoint;
  rep.delta_F_r = av.dFr;
  rep.delta_F_cal = av.dFr + av.dC_endpoint + av.dD_endpoint;

  const WorkFTResult wft = integral_work_ft(ens, opts);
  rep.ft_normalization = opts.literal_eq5 ? wft.normalization_literal : wft.normalization;
  if (s.driven) {
    rep.ft_work = opts.reference_basis_delta_a ? wft.decomposition_ref : wft.decomposition;
    rep.max_detailed_residual = detailed_residuals(ens, ResidualMode::work, opts).max_abs;
    rep.excluded_mass = av.excluded_mass;
  } else {
    const ExchangeFTResult ex = integral_exchange_ft(ens, opts);
    rep.ft_exchange = ex.value;
    rep.ft_work = wft.decomposition;
    rep.max_detailed_residual = detailed_residuals(ens, ResidualMode::exchange, opts).max_abs;
    rep.excluded_mass = ex.excluded_mass;
  }

  const EntropyProduction ep = entropy_production(ens, av, opts);
  rep.sigma = ep.sigma;
  rep.sigma_per_charge = ep.per_charge;
  rep.sigma_kl = ep.kl;
  rep.second_law_gap = ep.second_law_gap;
  return rep;
}

inline nlohmann::json to_json(const FTReport &r) {
  nlohmann::json j;
  j["ft_exchange"] = r.ft_exchange;
  j["ft_work"] = r.ft_work;
  j["ft_normalization"] = r.ft_normalization;
  j["max_detailed_residual"] = r.max_detailed_residual;
  j["W"] = r.W;
  j["E"] = r.E;
  j["Q"] = r.Q;
  j["delta_C"] = r.delta_C;
  j["delta_D"] = r.delta_D;
  j["delta_C_endpoint"] = r.delta_C_endpoint;
  j["delta_D_endpoint"] = r.delta_D_endpoint;
  j["delta_F_r"] = r.delta_F_r;
  j["delta_F_cal"] = r.delta_F_cal;
  j["sigma"] = r.sigma;
  j["sigma_per_charge"] = r.sigma_per_charge;
  j["sigma_kl"] = r.sigma_kl;
  j["second_law_gap"] = r.second_law_gap;
  j["excluded_mass"] = r.excluded_mass;
  j["modes"] = {{"identity_epsilon", r.mode_identity_epsilon},
                {"force_epsilon_zero", r.mode_force_epsilon_zero},
                {"reference_basis_delta_a", r.mode_reference_basis_delta_a},
                {"literal_eq5", r.mode_literal_eq5},
                {"driven", r.driven}};
  return j;
}

}  // namespace ggeft
