#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggeft/eigen.hpp"
#include "ggeft/matrix.hpp"

namespace ggeft {

// g(t) = g0 (1 - t/tau) + g_tau (t/tau); g(0) = g0, g(tau) = g_tau.
struct LinearRamp {
  double g0 = 1.0;
  double g_tau = 1.0;
  double tau = 1.0;

  double operator()(double t) const {
    if (t < 0.0 || t > tau) throw std::invalid_argument("LinearRamp: t outside [0, tau]");
    const double x = t / tau;
    return g0 * (1.0 - x) + g_tau * x;
  }
};

inline LinearRamp linear_ramp(double g0, double g_tau, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("linear_ramp: tau must be positive");
  return LinearRamp{g0, g_tau, tau};
}

// A driving protocol on the joint system (+) reservoir space. The total
// generator is G(t) = H(t) (x) 1 + 1 (x) H^R + V.
struct Protocol {
  double duration = 0.0;
  std::function<HermitianOperator(double)> system_hamiltonian;
  HermitianOperator reservoir_hamiltonian;
  HermitianOperator interaction;  // joint space
  std::function<std::vector<HermitianOperator>(double)> system_charges;
  std::vector<HermitianOperator> reservoir_charges;
  bool time_independent = true;
  double g0 = 1.0, g_tau = 1.0;  // ramp endpoints, when a ramp is in play

  int system_dim() const { return system_hamiltonian(0.0).dim(); }
  int reservoir_dim() const { return reservoir_hamiltonian.dim(); }

  void validate() const {
    if (duration <= 0.0) throw std::invalid_argument("Protocol: duration must be positive");
    const auto a0 = system_charges(0.0);
    const auto at = system_charges(duration);
    if (a0.size() != at.size() || a0.size() != reservoir_charges.size())
      throw std::invalid_argument("Protocol: charge list lengths mismatch");
    const int ds = system_dim();
    for (const auto &c : a0)
      if (c.dim() != ds) throw std::invalid_argument("Protocol: charge dimension mismatch");
    if (interaction.dim() != ds * reservoir_dim())
      throw std::invalid_argument("Protocol: interaction must live on the joint space");
  }
};

struct PropagatorConfig {
  int slices = defaults::propagator_slices;
  double target_error = defaults::propagator_target_error;
  int max_slices = defaults::propagator_max_slices;
};

inline ComplexMatrix total_generator(const Protocol &p, double t) {
  const ComplexMatrix hs = p.system_hamiltonian(t).matrix();
  const int ds = hs.dim(), dr = p.reservoir_dim();
  return tensor(hs, ComplexMatrix::identity(dr)) +
         tensor(ComplexMatrix::identity(ds), p.reservoir_hamiltonian.matrix()) +
         p.interaction.matrix();
}

// Midpoint-rule product of slice exponentials,
// U = prod_{k=N..1} exp(-i G(t_k + dt/2) dt). Fixed slice count.
inline ComplexMatrix propagate_fixed(const Protocol &p, int slices) {
  const double dt = p.duration / slices;
  const int djoint = p.system_dim() * p.reservoir_dim();
  ComplexMatrix u = ComplexMatrix::identity(djoint);
  for (int k = 0; k < slices; ++k) {
    const double tm = (k + 0.5) * dt;
    const HermitianOperator g(total_generator(p, tm), "G(t)");
    u = expm_hermitian(g, cplx(0.0, -dt)) * u;
  }
  return u;
}

namespace detail {

// Nearest unitary: U (U^dag U)^{-1/2}. Long slice products accumulate
// rounding drift ~ n_slices * eps; this projects it away.
inline ComplexMatrix polar_unitary(const ComplexMatrix &u) {
  const HermitianOperator gram(u.adjoint() * u, "gram", 1e-8);
  const SpectralDecomposition sd = spectral_decompose(gram);
  const ComplexMatrix inv_sqrt =
      sd.map_eigenvalues([](double e) { return 1.0 / std::sqrt(e); });
  return u * inv_sqrt;
}

}  // namespace detail

// Time-ordered propagator over [0, duration]. Time-independent generators get
// the single exact exponential; otherwise the slice count doubles until two
// successive refinements agree to target_error in max-norm.
inline UnitaryOperator propagate(const Protocol &p, const PropagatorConfig &cfg = {}) {
  p.validate();
  if (p.time_independent) {
    const HermitianOperator g(total_generator(p, 0.0), "G");
    return UnitaryOperator(expm_hermitian(g, cplx(0.0, -p.duration)));
  }
  if (cfg.slices < 1) throw std::invalid_argument("PropagatorConfig: slices must be >= 1");
  int n = cfg.slices;
  ComplexMatrix u = propagate_fixed(p, n);
  while (true) {
    if (2 * n > cfg.max_slices) {
      const ComplexMatrix u2 = propagate_fixed(p, cfg.max_slices);
      const double err = (u2 - u).max_abs();
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", err);
      throw std::runtime_error(
          std::string("propagate: no convergence at max_slices, last error estimate ") + buf);
    }
    n *= 2;
    ComplexMatrix u2 = propagate_fixed(p, n);
    const double err = (u2 - u).max_abs();
    u = std::move(u2);
    if (err < cfg.target_error) break;
  }
  return UnitaryOperator(detail::polar_unitary(u));
}

// Strict-conservation diagnostic: per charge k and sample time t, the
// max-norm of [V, A_k(t) (x) 1 + 1 (x) A^R_k]. Warning-level only: a driven
// charge may violate per-charge conservation while the formalism still
// applies (the work remainder absorbs it).
inline std::vector<std::vector<double>> conservation_residual(
    const Protocol &p, const std::vector<double> &t_samples) {
  const int ds = p.system_dim(), dr = p.reservoir_dim();
  const int ncharge = static_cast<int>(p.reservoir_charges.size());
  std::vector<std::vector<double>> table(ncharge);
  for (double t : t_samples) {
    const auto at = p.system_charges(t);
    for (int k = 0; k < ncharge; ++k) {
      const ComplexMatrix total = tensor(at[k].matrix(), ComplexMatrix::identity(dr)) +
                                  tensor(ComplexMatrix::identity(ds),
                                         p.reservoir_charges[k].matrix());
      table[k].push_back(commutator(p.interaction.matrix(), total).max_abs());
    }
  }
  return table;
}

}  // namespace ggeft
