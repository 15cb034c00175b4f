#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "ggeft/flucts.hpp"
#include "ggeft/heisenberg.hpp"

using namespace ggeft;

namespace {

PathEnsemble exchange_ensemble(double theta, double beta_r = 0.5) {
  HeisenbergParams p;
  p.theta = theta;
  p.beta_r = beta_r;
  return enumerate_ensemble(build_exchange_model(p));
}

PathEnsemble driven_ensemble(double theta, double g0, double gt, int slices = 256) {
  HeisenbergParams p;
  p.theta = theta;
  p.g0 = g0;
  p.g_tau = gt;
  p.slices = slices;
  return enumerate_ensemble(build_driven_model(p));
}

}  // namespace

TEST_CASE("integral exchange FT holds identically in identity mode") {
  for (double theta : {0.0, 0.5, 1.2, M_PI / 2.0, 2.1, 2.9, M_PI}) {
    const ExchangeFTResult r = integral_exchange_ft(exchange_ensemble(theta));
    CHECK(std::abs(r.value - 1.0) < 1e-10);
    CHECK(r.excluded_mass == 0.0);
  }
}

TEST_CASE("ratio-mode exchange FT agrees where nothing is excluded") {
  EstimatorOptions ratio;
  ratio.identity_epsilon = false;
  for (double theta : {0.4, 1.0, 2.5}) {
    const PathEnsemble ens = exchange_ensemble(theta);
    const ExchangeFTResult r = integral_exchange_ft(ens, ratio);
    CHECK(r.excluded_mass == 0.0);
    CHECK(std::abs(r.value - 1.0) < 1e-9);
  }
  // at pi/2 the diagonal records drop out and the estimator is marked approximate
  const PathEnsemble sing = exchange_ensemble(M_PI / 2.0);
  const ExchangeFTResult r = integral_exchange_ft(sing, ratio);
  CHECK(r.excluded_mass == Catch::Approx(0.42384299827393).margin(1e-9));
  CHECK(r.value < 1.0);
}

TEST_CASE("omitting the non-Abelian term breaks the exchange FT at pi/2") {
  EstimatorOptions noeps;
  noeps.force_epsilon_zero = true;
  const ExchangeFTResult r = integral_exchange_ft(exchange_ensemble(M_PI / 2.0), noeps);
  CHECK(r.value == Catch::Approx(1.0106681284323442).margin(1e-9));
  CHECK(std::abs(r.value - 1.0) > 1e-3);
  // commuting point: classical heat-exchange FT, no epsilon needed
  const ExchangeFTResult r0 = integral_exchange_ft(exchange_ensemble(0.0), noeps);
  CHECK(r0.value == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("exchange estimator rejects driven setups") {
  const PathEnsemble drv = driven_ensemble(0.7, 10.0, 0.1, 64);
  CHECK_THROWS_AS(integral_exchange_ft(drv), std::invalid_argument);
}

TEST_CASE("reverse-path normalization route") {
  for (double theta : {0.0, 1.0, M_PI / 2.0, 2.7}) {
    const WorkFTResult ex = integral_work_ft(exchange_ensemble(theta));
    CHECK(ex.normalization == Catch::Approx(1.0).margin(1e-12));
  }
  const WorkFTResult drv = integral_work_ft(driven_ensemble(1.2, 10.0, 0.1, 128));
  CHECK(drv.normalization == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("work FT decomposition equals one at the commuting undriven anchors") {
  for (double theta : {0.0, M_PI}) {
    const PathEnsemble ens = driven_ensemble(theta, 1.0, 1.0, 16);
    const WorkFTResult r = integral_work_ft(ens);
    CHECK(std::abs(r.decomposition - 1.0) < 1e-9);
    CHECK(std::abs(r.decomposition_ref - 1.0) < 1e-9);
  }
}

TEST_CASE("work FT variant report is complete and reading-independent") {
  const PathEnsemble ens = driven_ensemble(1.0, 10.0, 0.1, 128);
  const WorkFTVariantReport rep = work_ft_variants(ens);
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].value == rep.rows[2].value);  // Eq.(5) reading cannot matter
  CHECK(rep.rows[1].value == rep.rows[3].value);
  CHECK(std::isfinite(rep.decomposition_literal_sign));
  CHECK(!rep.best_variant.empty());
  CHECK(rep.normalization_default == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("detailed residuals vanish in the commuting exchange limit") {
  for (double theta : {0.0, M_PI}) {
    const DetailedResiduals dr =
        detailed_residuals(exchange_ensemble(theta), ResidualMode::exchange);
    CHECK(dr.max_abs < 1e-10);
  }
  // the record-level exchange identity holds at every angle
  for (double theta : {0.8, M_PI / 2.0, 2.6}) {
    const DetailedResiduals dr =
        detailed_residuals(exchange_ensemble(theta), ResidualMode::exchange);
    CHECK(dr.max_abs < 1e-9);
  }
}

TEST_CASE("work-mode residual table is emitted for analysis") {
  const PathEnsemble ens = driven_ensemble(1.4, 10.0, 0.1, 128);
  const DetailedResiduals dr = detailed_residuals(ens, ResidualMode::work);
  CHECK(dr.table.size() == ens.records.size());
  CHECK(std::isfinite(dr.max_abs));
}

TEST_CASE("ensemble averages: commuting endpoint values") {
  const EnsembleAverages av = ensemble_averages(exchange_ensemble(0.0));
  CHECK(std::abs(av.epsilon[2]) < 1e-10);
  CHECK(std::abs(av.heat[2]) < 1e-10);
}

TEST_CASE("ensemble averages: frozen interior values") {
  const EnsembleAverages a4 = ensemble_averages(exchange_ensemble(M_PI / 4.0));
  CHECK(a4.epsilon[2] == Catch::Approx(0.20523250655144543).margin(1e-11));
  CHECK(a4.heat[2] == Catch::Approx(-0.089486221805640795).margin(1e-11));

  const EnsembleAverages a34 = ensemble_averages(exchange_ensemble(3.0 * M_PI / 4.0));
  CHECK(a34.epsilon[2] == Catch::Approx(-0.034325371908179719).margin(1e-11));
  CHECK(a34.epsilon[2] < 0.0);  // non-Abelian term negative in (pi/2, pi)
}

TEST_CASE("V = 0 limit has no transitions and zero averages") {
  HeisenbergParams p;
  p.theta = 0.9;
  p.coupling = 0.0;
  const PathEnsemble ens = enumerate_ensemble(build_exchange_model(p));
  const EnsembleAverages av = ensemble_averages(ens);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(av.epsilon[k]) < 1e-12);
    CHECK(std::abs(av.heat[k]) < 1e-12);
    CHECK(std::abs(av.work[k]) < 1e-12);
  }
}

TEST_CASE("entropy production: positivity, KL agreement, symmetric null case") {
  for (double theta : {0.3, 1.0, M_PI / 2.0, 2.0, 3.0}) {
    const PathEnsemble ens = exchange_ensemble(theta);
    const EnsembleAverages av = ensemble_averages(ens);
    const EntropyProduction ep = entropy_production(ens, av);
    CHECK(ep.sigma >= -1e-12);
    CHECK(std::abs(ep.sigma - ep.kl) < 1e-9);
  }
  // equal affinities and identical bodies: P = P^dag record-wise
  HeisenbergParams p;
  p.theta = 0.0;
  p.beta_r = 1.0;
  const PathEnsemble sym = enumerate_ensemble(build_exchange_model(p));
  const EnsembleAverages av = ensemble_averages(sym);
  const EntropyProduction ep = entropy_production(sym, av);
  CHECK(std::abs(ep.sigma) < 1e-12);
  for (const auto &r : sym.records)
    if (r.p_forward > 1e-15) CHECK(r.p_reverse == Catch::Approx(r.p_forward).margin(1e-13));
}

TEST_CASE("second-law gap matches the averaged inequality") {
  const PathEnsemble ens = exchange_ensemble(1.1);
  const EnsembleAverages av = ensemble_averages(ens);
  const EntropyProduction ep = entropy_production(ens, av);
  // exchange case: endpoint functionals coincide, gap reduces to sigma
  CHECK(ep.second_law_gap == Catch::Approx(ep.sigma).margin(1e-12));
  CHECK(ep.second_law_gap >= -1e-12);
}

TEST_CASE("per-charge sigma decomposition sums consistently") {
  const PathEnsemble ens = exchange_ensemble(2.2);
  const EnsembleAverages av = ensemble_averages(ens);
  const EntropyProduction ep = entropy_production(ens, av);
  double total = 0.0;
  for (double s : ep.per_charge) total += s;
  CHECK(total == Catch::Approx(ep.sigma).margin(1e-12));
}

TEST_CASE("FT report JSON carries the contract field names") {
  const PathEnsemble ens = exchange_ensemble(1.7);
  const FTReport rep = build_ft_report(ens);
  const nlohmann::json j = to_json(rep);
  for (const char *key :
       {"ft_exchange", "ft_work", "ft_normalization", "max_detailed_residual", "W", "E", "Q",
        "delta_C", "delta_D", "delta_F_r", "delta_F_cal", "sigma", "sigma_per_charge",
        "excluded_mass", "modes"})
    REQUIRE(j.contains(key));
  CHECK(j["ft_exchange"].get<double>() == Catch::Approx(1.0).margin(1e-10));
  CHECK(j["modes"]["driven"].get<bool>() == false);
  CHECK(j["E"].size() == 3);
}

TEST_CASE("stochastic dC/dD averages sit next to the endpoint functionals") {
  // undriven: endpoint differences vanish; the stochastic averages need not,
  // and the report carries both so the gap is visible
  const PathEnsemble ens = exchange_ensemble(1.9);
  const EnsembleAverages av = ensemble_averages(ens);
  CHECK(std::abs(av.dC_endpoint) < 1e-12);
  CHECK(std::abs(av.dD_endpoint) < 1e-12);
  CHECK(std::isfinite(av.dc_stochastic));
  CHECK(std::isfinite(av.dd_stochastic));
}
