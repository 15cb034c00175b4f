#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggeft/eigen.hpp"
#include "ggeft/matrix.hpp"

namespace ggeft {

// Charges A_k paired with their affinities lambda_k. The generalized Gibbs
// exponent is the contraction sum_k lambda_k A_k.
struct ChargeSet {
  std::vector<HermitianOperator> charges;
  std::vector<double> affinities;
  std::string label;

  ChargeSet() = default;
  ChargeSet(std::vector<HermitianOperator> ch, std::vector<double> aff, std::string lbl = "")
      : charges(std::move(ch)), affinities(std::move(aff)), label(std::move(lbl)) {
    if (charges.empty()) throw std::invalid_argument("ChargeSet: needs at least one charge");
    if (charges.size() != affinities.size())
      throw std::invalid_argument("ChargeSet: charge/affinity length mismatch");
    for (const auto &c : charges)
      if (c.dim() != charges.front().dim())
        throw std::invalid_argument("ChargeSet: charges must share one dimension");
  }

  int dim() const { return charges.front().dim(); }
  int size() const { return static_cast<int>(charges.size()); }

  HermitianOperator contraction() const {
    ComplexMatrix m(dim());
    for (size_t k = 0; k < charges.size(); ++k) m += affinities[k] * charges[k].matrix();
    return HermitianOperator(std::move(m), label + ".contraction");
  }
};

struct ProbabilityVector {
  std::vector<double> probs;
  std::string basis_label;
};

// F = -ln Tr exp(-sum_k lambda_k A_k), evaluated on the contraction spectrum
// with a min-eigenvalue shift for stability.
inline double massieu_potential(const SpectralDecomposition &contraction_spectrum) {
  const auto &e = contraction_spectrum.eigenvalues;
  const double m = e.front();  // ascending
  for (double ek : e)
    if (std::abs(ek - m) > defaults::exp_overflow_arg)
      throw std::range_error("massieu_potential: exponent exceeds overflow guard");
  double z = 0.0;
  for (double ek : e) z += std::exp(-(ek - m));
  return m - std::log(z);
}

inline double massieu_potential(const ChargeSet &cs) {
  return massieu_potential(spectral_decompose(cs.contraction()));
}

// Generalized Gibbs density operator exp(F - lambda.A). The stored basis is
// the contraction eigenbasis (ascending contraction eigenvalue, so descending
// probability); every downstream measurement reads this basis, it is never
// recomputed.
struct GibbsState {
  ComplexMatrix density;
  double massieu = 0.0;
  SpectralDecomposition basis;  // of the contraction, not of the density
  std::vector<double> probs;    // exp(F - e_k), aligned with basis columns
  ChargeSet source;

  int dim() const { return density.dim(); }
};

inline GibbsState build_gibbs_state(const ChargeSet &cs) {
  GibbsState g;
  g.source = cs;
  g.basis = spectral_decompose(cs.contraction());
  g.massieu = massieu_potential(g.basis);
  const int n = cs.dim();
  g.probs.resize(n);
  for (int k = 0; k < n; ++k) g.probs[k] = std::exp(g.massieu - g.basis.eigenvalues[k]);
  g.density = g.basis.map_eigenvalues([&](double e) { return std::exp(g.massieu - e); });
  return g;
}

// p^d_m = <m^r| rho |m^r> over the reference eigenbasis, reference ordering.
inline ProbabilityVector dephased_distribution(const GibbsState &state,
                                               const GibbsState &reference) {
  if (state.dim() != reference.dim())
    throw std::invalid_argument("dephased_distribution: dimension mismatch");
  const int n = state.dim();
  ProbabilityVector pd;
  pd.basis_label = reference.source.label;
  pd.probs.resize(n);
  for (int m = 0; m < n; ++m) {
    const std::vector<cplx> vm = reference.basis.vector(m);
    pd.probs[m] = std::real(dot(vm, state.density.apply(vm)));
  }
  return pd;
}

// -sum p ln p, natural log; entries below the floor contribute zero.
inline double shannon_entropy(const std::vector<double> &p,
                              double floor = defaults::prob_floor) {
  double s = 0.0;
  for (double x : p)
    if (x > floor) s -= x * std::log(x);
  return s;
}

// C = S(p^d) - S(pi): entropy cost of dephasing in the reference basis.
inline double rel_entropy_coherence(const GibbsState &state, const GibbsState &reference) {
  const ProbabilityVector pd = dephased_distribution(state, reference);
  return shannon_entropy(pd.probs) - shannon_entropy(state.probs);
}

// D = KL(p^d || p^r) >= 0; requires a full-rank reference.
inline double athermality(const GibbsState &state, const GibbsState &reference) {
  const ProbabilityVector pd = dephased_distribution(state, reference);
  double d = 0.0;
  for (size_t m = 0; m < pd.probs.size(); ++m) {
    if (reference.probs[m] < defaults::prob_floor)
      throw std::domain_error("athermality: reference state is rank deficient");
    if (pd.probs[m] > defaults::prob_floor)
      d += pd.probs[m] * std::log(pd.probs[m] / reference.probs[m]);
  }
  return d;
}

// F_cal = F^r + C + D, the nonequilibrium free entropy of `state` relative to
// `reference`.
inline double noneq_free_entropy(const GibbsState &state, const GibbsState &reference) {
  return reference.massieu + rel_entropy_coherence(state, reference) +
         athermality(state, reference);
}

}  // namespace ggeft
