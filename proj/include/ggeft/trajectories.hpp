#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggeft/dynamics.hpp"
#include "ggeft/gge.hpp"

namespace ggeft {

// Everything the trajectory lattice needs: the five measurement states, the
// joint propagator, and the charge operators at both protocol endpoints.
// States: pi^0 (lambda, A^0), pi^tau (lambda, A^tau), rho^R (lambda^R, A^R),
// pi^{r,0} (lambda^R, A^0), pi^{r,tau} (lambda^R, A^tau).
struct JointSetup {
  GibbsState system_initial;
  GibbsState system_final_reference;
  GibbsState reservoir;
  GibbsState reference_initial;
  GibbsState reference_final;
  Protocol protocol;
  UnitaryOperator propagator;
  int d_s = 0, d_r = 0;

  std::vector<double> lambda;     // system affinities
  std::vector<double> lambda_r;   // reservoir affinities
  std::vector<HermitianOperator> charges_0;    // A^0_k, system space
  std::vector<HermitianOperator> charges_tau;  // A^tau_k
  std::vector<HermitianOperator> charges_res;  // A^R_k, reservoir space
  std::vector<std::string> charge_labels;
  bool driven = false;

  int n_charges() const { return static_cast<int>(charges_0.size()); }

  void validate() const {
    if (system_initial.dim() != d_s || system_final_reference.dim() != d_s ||
        reference_initial.dim() != d_s || reference_final.dim() != d_s)
      throw std::invalid_argument("JointSetup: system-space state dimension mismatch");
    if (reservoir.dim() != d_r) throw std::invalid_argument("JointSetup: reservoir dimension mismatch");
    if (propagator.dim() != d_s * d_r)
      throw std::invalid_argument("JointSetup: propagator must live on the joint space");
    if (system_initial.source.affinities != system_final_reference.source.affinities)
      throw std::invalid_argument("JointSetup: endpoint system affinities differ");
  }
};

// One outcome tuple Gamma = (i, mu, m, j, nu, n): eigenbasis indices of
// (pi^0, rho^R, pi^{r,0}, pi^tau, rho^R, pi^{r,tau}).
struct Trajectory {
  int i = 0, mu = 0, m = 0, j = 0, nu = 0, n = 0;
};

struct TrajectoryRecord {
  Trajectory gamma;
  double p_forward = 0.0;
  double p_reverse = 0.0;          // default Eq.(5) reading: p^tau indexed by j
  double p_reverse_literal = 0.0;  // literal reading: p^tau indexed by i
  std::vector<double> delta_a;     // eigen-outcome basis (i, j)
  std::vector<double> delta_a_ref; // reference-outcome basis (m, n)
  std::vector<double> q;
  std::vector<double> eps;         // ratio formula where valid, 0 otherwise
  std::vector<double> w;           // delta_a - q - eps where eps valid, 0 otherwise
  double eps_imag_max = 0.0;       // |Im| of the ratio, diagnostic
  bool eps_valid = false;
  double v_element_mag = 0.0;
  double dc = 0.0;
  double dd = 0.0;
  bool log_valid = true;  // all probabilities entering dc/dd above the floor
};

struct PathEnsemble {
  std::vector<TrajectoryRecord> records;
  double excluded_mass = 0.0;     // forward probability on ratio-invalid records
  double log_flagged_mass = 0.0;  // forward probability on dc/dd-flagged records
  JointSetup setup;
};

// The corrected non-Abelian kernel (see epsilon_components): the operators
// multiplying V from the right and left, plus the scalar endpoint correction.
struct EpsilonKernel {
  ComplexMatrix o_0;     // right factor: V * O_0
  ComplexMatrix o_tau;   // left factor: O_tau * V
  double correction = 0.0;
};

namespace detail {

inline ComplexMatrix embed_system(const ComplexMatrix &m, int d_r) {
  return tensor(m, ComplexMatrix::identity(d_r));
}
inline ComplexMatrix embed_reservoir(const ComplexMatrix &m, int d_s) {
  return tensor(ComplexMatrix::identity(d_s), m);
}

inline ComplexMatrix rank1(const std::vector<cplx> &v) {
  const int n = static_cast<int>(v.size());
  ComplexMatrix p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p(i, j) = v[i] * std::conj(v[j]);
  return p;
}

}  // namespace detail

// Kernel for charge k on trajectory endpoints (i, mu, j, nu):
//   eps_k = Re< j,nu | V O_0 - O_tau V | i,mu > / < j,nu | V | i,mu >
//           + (<i|dA_k|i> + <j|dA_k|j>)/2,
// with Abar = (A^0 + A^tau)/2, dA = A^tau - A^0 and
//   O_0   = (1 - Pi_i) Abar + (1 - P_mu) A^R,
//   O_tau = Abar (1 - Pi_j) + A^R (1 - P_nu)
// (all operators joint-space embedded, projectors rank-1 on the measured
// eigenvectors). Exact consequence of [V, A^t + A^R] = 0 at both endpoints:
// then eps = delta_a - q identically.
inline EpsilonKernel build_epsilon_kernel(const JointSetup &s, const Trajectory &g, int k) {
  const ComplexMatrix one = ComplexMatrix::identity(s.d_s * s.d_r);
  const ComplexMatrix abar =
      detail::embed_system(0.5 * (s.charges_0[k].matrix() + s.charges_tau[k].matrix()), s.d_r);
  const ComplexMatrix ares = detail::embed_reservoir(s.charges_res[k].matrix(), s.d_s);
  const ComplexMatrix pi_i =
      detail::embed_system(detail::rank1(s.system_initial.basis.vector(g.i)), s.d_r);
  const ComplexMatrix pi_j =
      detail::embed_system(detail::rank1(s.system_final_reference.basis.vector(g.j)), s.d_r);
  const ComplexMatrix p_mu =
      detail::embed_reservoir(detail::rank1(s.reservoir.basis.vector(g.mu)), s.d_s);
  const ComplexMatrix p_nu =
      detail::embed_reservoir(detail::rank1(s.reservoir.basis.vector(g.nu)), s.d_s);

  EpsilonKernel kern;
  kern.o_0 = (one - pi_i) * abar + (one - p_mu) * ares;
  kern.o_tau = abar * (one - pi_j) + ares * (one - p_nu);

  const ComplexMatrix da = s.charges_tau[k].matrix() - s.charges_0[k].matrix();
  const std::vector<cplx> vi = s.system_initial.basis.vector(g.i);
  const std::vector<cplx> vj = s.system_final_reference.basis.vector(g.j);
  kern.correction =
      0.5 * (std::real(dot(vi, da.apply(vi))) + std::real(dot(vj, da.apply(vj))));
  return kern;
}

// Local charge change Delta a_k = <j|A^tau_k|j> - <i|A^0_k|i>.
inline std::vector<double> charge_change(const JointSetup &s, const Trajectory &g) {
  std::vector<double> da(s.n_charges());
  const std::vector<cplx> vi = s.system_initial.basis.vector(g.i);
  const std::vector<cplx> vj = s.system_final_reference.basis.vector(g.j);
  for (int k = 0; k < s.n_charges(); ++k)
    da[k] = std::real(dot(vj, s.charges_tau[k].matrix().apply(vj))) -
            std::real(dot(vi, s.charges_0[k].matrix().apply(vi)));
  return da;
}

// Heat q_k = <mu|A^R_k|mu> - <nu|A^R_k|nu>: positive when the reservoir
// charge decreases.
inline std::vector<double> heat(const JointSetup &s, const Trajectory &g) {
  std::vector<double> q(s.n_charges());
  const std::vector<cplx> vmu = s.reservoir.basis.vector(g.mu);
  const std::vector<cplx> vnu = s.reservoir.basis.vector(g.nu);
  for (int k = 0; k < s.n_charges(); ++k)
    q[k] = std::real(dot(vmu, s.charges_res[k].matrix().apply(vmu))) -
           std::real(dot(vnu, s.charges_res[k].matrix().apply(vnu)));
  return q;
}

struct EpsilonResult {
  std::vector<double> value;
  double imag_max = 0.0;
  bool valid = false;
  double v_element_mag = 0.0;
};

// Straight-from-definition evaluation (used by tests as the literal
// re-evaluation oracle; enumerate_ensemble computes the same thing through
// precomputed vectors).
inline EpsilonResult epsilon(const JointSetup &s, const Trajectory &g,
                             double v_rel_tol = defaults::v_element_rel_tol) {
  EpsilonResult r;
  r.value.assign(s.n_charges(), 0.0);
  const std::vector<cplx> ket =
      tensor_vec(s.system_initial.basis.vector(g.i), s.reservoir.basis.vector(g.mu));
  const std::vector<cplx> bra =
      tensor_vec(s.system_final_reference.basis.vector(g.j), s.reservoir.basis.vector(g.nu));
  const ComplexMatrix &v = s.protocol.interaction.matrix();
  const cplx vel = dot(bra, v.apply(ket));
  r.v_element_mag = std::abs(vel);
  r.valid = r.v_element_mag > v_rel_tol * v.max_abs();
  if (!r.valid) return r;
  for (int k = 0; k < s.n_charges(); ++k) {
    const EpsilonKernel kern = build_epsilon_kernel(s, g, k);
    const ComplexMatrix num = v * kern.o_0 - kern.o_tau * v;
    const cplx ratio = dot(bra, num.apply(ket)) / vel;
    r.value[k] = ratio.real() + kern.correction;
    r.imag_max = std::max(r.imag_max, std::abs(ratio.imag()));
  }
  return r;
}

// w_k = delta_a_k - q_k - eps_k (defined only where eps is valid).
inline std::vector<double> work_remainder(const JointSetup &s, const Trajectory &g) {
  const EpsilonResult er = epsilon(s, g);
  if (!er.valid) throw std::domain_error("work_remainder: epsilon invalid for this record");
  const std::vector<double> da = charge_change(s, g);
  const std::vector<double> qq = heat(s, g);
  std::vector<double> w(s.n_charges());
  for (int k = 0; k < s.n_charges(); ++k) w[k] = da[k] - qq[k] - er.value[k];
  return w;
}

// P^dag(Gamma^dag) under the default (j-indexed) or literal (i-indexed)
// Eq.(5) reading. The transition factor equals the forward one by unitarity.
inline double reverse_probability(const JointSetup &s, const Trajectory &g,
                                  bool literal_eq5 = false) {
  const std::vector<cplx> ket =
      tensor_vec(s.system_initial.basis.vector(g.i), s.reservoir.basis.vector(g.mu));
  const std::vector<cplx> bra =
      tensor_vec(s.system_final_reference.basis.vector(g.j), s.reservoir.basis.vector(g.nu));
  const double trans = std::norm(dot(bra, s.propagator.matrix().apply(ket)));
  const std::vector<cplx> vm = s.reference_initial.basis.vector(g.m);
  const std::vector<cplx> vn = s.reference_final.basis.vector(g.n);
  const double pmi = std::norm(dot(vm, s.system_initial.basis.vector(g.i)));
  const double pnj = std::norm(dot(vn, s.system_final_reference.basis.vector(g.j)));
  const double ptau =
      literal_eq5 ? s.system_final_reference.probs[g.i] : s.system_final_reference.probs[g.j];
  return ptau * s.reservoir.probs[g.nu] * pnj * trans * pmi;
}

struct CoherenceIncrements {
  double dc = 0.0;
  double dd = 0.0;
  bool valid = true;
};

// Stochastic relative entropy of coherence and athermality increments:
//   dc = ln(p^tau_j / p^{d,tau}_n) - ln(p^0_i / p^{d,0}_m)
//   dd = ln(p^{d,tau}_n / p^{r,tau}_n) - ln(p^{d,0}_m / p^{r,0}_m)
inline CoherenceIncrements coherence_increments(const JointSetup &s, const Trajectory &g) {
  const ProbabilityVector pd0 = dephased_distribution(s.system_initial, s.reference_initial);
  const ProbabilityVector pdt =
      dephased_distribution(s.system_final_reference, s.reference_final);
  const double vals[] = {s.system_initial.probs[g.i], s.system_final_reference.probs[g.j],
                         pd0.probs[g.m], pdt.probs[g.n], s.reference_initial.probs[g.m],
                         s.reference_final.probs[g.n]};
  CoherenceIncrements ci;
  for (double x : vals)
    if (x <= defaults::prob_floor) {
      ci.valid = false;
      return ci;
    }
  ci.dc = std::log(s.system_final_reference.probs[g.j] / pdt.probs[g.n]) -
          std::log(s.system_initial.probs[g.i] / pd0.probs[g.m]);
  ci.dd = std::log(pdt.probs[g.n] / s.reference_final.probs[g.n]) -
          std::log(pd0.probs[g.m] / s.reference_initial.probs[g.m]);
  return ci;
}

// Exhaustive lattice enumeration. Record order is fixed (i, mu, m, j, nu, n
// nested loops, innermost last) so downstream output is byte-reproducible.
inline PathEnsemble enumerate_ensemble(const JointSetup &setup) {
  setup.validate();
  const int ds = setup.d_s, dr = setup.d_r, nc = setup.n_charges();
  const int dj = ds * dr;

  PathEnsemble ens;
  ens.setup = setup;
  ens.records.reserve(static_cast<size_t>(ds) * ds * ds * ds * dr * dr);

  // bases
  std::vector<std::vector<cplx>> v0(ds), vt(ds), vr0(ds), vrt(ds), vres(dr);
  for (int i = 0; i < ds; ++i) {
    v0[i] = setup.system_initial.basis.vector(i);
    vt[i] = setup.system_final_reference.basis.vector(i);
    vr0[i] = setup.reference_initial.basis.vector(i);
    vrt[i] = setup.reference_final.basis.vector(i);
  }
  for (int mu = 0; mu < dr; ++mu) vres[mu] = setup.reservoir.basis.vector(mu);

  // conditional priors
  std::vector<std::vector<double>> pmi(ds, std::vector<double>(ds));
  std::vector<std::vector<double>> pnj(ds, std::vector<double>(ds));
  for (int m = 0; m < ds; ++m)
    for (int i = 0; i < ds; ++i) pmi[m][i] = std::norm(dot(vr0[m], v0[i]));
  for (int n = 0; n < ds; ++n)
    for (int j = 0; j < ds; ++j) pnj[n][j] = std::norm(dot(vrt[n], vt[j]));

  // charge expectations per basis
  auto expectations = [&](const std::vector<std::vector<cplx>> &vs,
                          const std::vector<HermitianOperator> &ops) {
    std::vector<std::vector<double>> e(vs.size(), std::vector<double>(ops.size()));
    for (size_t a = 0; a < vs.size(); ++a)
      for (size_t k = 0; k < ops.size(); ++k)
        e[a][k] = std::real(dot(vs[a], ops[k].matrix().apply(vs[a])));
    return e;
  };
  const auto a0_exp = expectations(v0, setup.charges_0);
  const auto at_exp = expectations(vt, setup.charges_tau);
  const auto at_in0_exp = expectations(v0, setup.charges_tau);  // <i^0|A^tau|i^0>
  const auto a0_int_exp = expectations(vt, setup.charges_0);    // <j^tau|A^0|j^tau>
  const auto ar0_exp = expectations(vr0, setup.charges_0);
  const auto art_exp = expectations(vrt, setup.charges_tau);
  const auto res_exp = expectations(vres, setup.charges_res);

  // joint kets/bras and V, U images
  const ComplexMatrix &vmat = setup.protocol.interaction.matrix();
  const ComplexMatrix &umat = setup.propagator.matrix();
  const double v_floor = defaults::v_element_rel_tol * vmat.max_abs();

  std::vector<std::vector<cplx>> ket(static_cast<size_t>(ds) * dr), bra(static_cast<size_t>(ds) * dr);
  std::vector<std::vector<cplx>> v_ket(ket.size()), u_ket(ket.size()), v_bra(bra.size());
  for (int i = 0; i < ds; ++i)
    for (int mu = 0; mu < dr; ++mu) {
      const size_t idx = static_cast<size_t>(i) * dr + mu;
      ket[idx] = tensor_vec(v0[i], vres[mu]);
      v_ket[idx] = vmat.apply(ket[idx]);
      u_ket[idx] = umat.apply(ket[idx]);
    }
  for (int j = 0; j < ds; ++j)
    for (int nu = 0; nu < dr; ++nu) {
      const size_t idx = static_cast<size_t>(j) * dr + nu;
      bra[idx] = tensor_vec(vt[j], vres[nu]);
      v_bra[idx] = vmat.apply(bra[idx]);
    }

  // epsilon kernel vectors: o0v[(i,mu),k] = O_0 |i,mu>, otv[(j,nu),k] = O_tau^dag |j,nu>
  const ComplexMatrix one = ComplexMatrix::identity(dj);
  std::vector<ComplexMatrix> abar_emb(nc), ares_emb(nc);
  for (int k = 0; k < nc; ++k) {
    abar_emb[k] = detail::embed_system(
        0.5 * (setup.charges_0[k].matrix() + setup.charges_tau[k].matrix()), dr);
    ares_emb[k] = detail::embed_reservoir(setup.charges_res[k].matrix(), ds);
  }
  std::vector<std::vector<std::vector<cplx>>> o0v(ket.size()), otv(bra.size());
  for (int i = 0; i < ds; ++i)
    for (int mu = 0; mu < dr; ++mu) {
      const size_t idx = static_cast<size_t>(i) * dr + mu;
      o0v[idx].resize(nc);
      for (int k = 0; k < nc; ++k) {
        // O_0 |i,mu> = (1 - Pi_i (x) 1) Abar |i,mu> + (1 - 1 (x) P_mu) A^R |i,mu>;
        // the embedded projectors expand over a full basis of the other factor.
        std::vector<cplx> x = abar_emb[k].apply(ket[idx]);
        std::vector<cplx> y = ares_emb[k].apply(ket[idx]);
        std::vector<cplx> px(dj, cplx(0.0)), py(dj, cplx(0.0));
        for (int r = 0; r < dr; ++r) {
          std::vector<cplx> basis_ir = tensor_vec(v0[i], vres[r]);
          const cplx ov = dot(basis_ir, x);
          for (int t = 0; t < dj; ++t) px[t] += ov * basis_ir[t];
        }
        for (int ssys = 0; ssys < ds; ++ssys) {
          std::vector<cplx> basis_sm = tensor_vec(v0[ssys], vres[mu]);
          const cplx ov = dot(basis_sm, y);
          for (int t = 0; t < dj; ++t) py[t] += ov * basis_sm[t];
        }
        std::vector<cplx> res(dj);
        for (int t = 0; t < dj; ++t) res[t] = (x[t] - px[t]) + (y[t] - py[t]);
        o0v[idx][k] = std::move(res);
      }
    }
  for (int j = 0; j < ds; ++j)
    for (int nu = 0; nu < dr; ++nu) {
      const size_t idx = static_cast<size_t>(j) * dr + nu;
      otv[idx].resize(nc);
      for (int k = 0; k < nc; ++k) {
        // O_tau^dag |j,nu> = (1 - Pi_j) Abar |j,nu> + (1 - P_nu) A^R |j,nu>
        std::vector<cplx> x = abar_emb[k].apply(bra[idx]);
        std::vector<cplx> y = ares_emb[k].apply(bra[idx]);
        std::vector<cplx> px(dj, cplx(0.0)), py(dj, cplx(0.0));
        for (int r = 0; r < dr; ++r) {
          std::vector<cplx> basis_jr = tensor_vec(vt[j], vres[r]);
          const cplx ov = dot(basis_jr, x);
          for (int t = 0; t < dj; ++t) px[t] += ov * basis_jr[t];
        }
        for (int ssys = 0; ssys < ds; ++ssys) {
          std::vector<cplx> basis_sn = tensor_vec(vt[ssys], vres[nu]);
          const cplx ov = dot(basis_sn, y);
          for (int t = 0; t < dj; ++t) py[t] += ov * basis_sn[t];
        }
        std::vector<cplx> res(dj);
        for (int t = 0; t < dj; ++t) res[t] = (x[t] - px[t]) + (y[t] - py[t]);
        otv[idx][k] = std::move(res);
      }
    }

  // dephased distributions for dc/dd
  const ProbabilityVector pd0 = dephased_distribution(setup.system_initial, setup.reference_initial);
  const ProbabilityVector pdt =
      dephased_distribution(setup.system_final_reference, setup.reference_final);

  const auto &p0 = setup.system_initial.probs;
  const auto &pt = setup.system_final_reference.probs;
  const auto &pr = setup.reservoir.probs;
  const auto &pr0 = setup.reference_initial.probs;
  const auto &prt = setup.reference_final.probs;

  for (int i = 0; i < ds; ++i)
    for (int mu = 0; mu < dr; ++mu) {
      const size_t kidx = static_cast<size_t>(i) * dr + mu;
      for (int m = 0; m < ds; ++m)
        for (int j = 0; j < ds; ++j)
          for (int nu = 0; nu < dr; ++nu) {
            const size_t bidx = static_cast<size_t>(j) * dr + nu;
            const cplx uel = dot(bra[bidx], u_ket[kidx]);
            const double trans = std::norm(uel);
            const cplx vel = dot(bra[bidx], v_ket[kidx]);

            // per-(i,mu,j,nu) quantities shared by all (m,n)
            std::vector<double> da(nc), da_ref(nc), qv(nc), epsv(nc, 0.0), wv(nc, 0.0);
            for (int k = 0; k < nc; ++k) {
              da[k] = at_exp[j][k] - a0_exp[i][k];
              qv[k] = res_exp[mu][k] - res_exp[nu][k];
            }
            const bool valid = std::abs(vel) > v_floor;
            double imag_max = 0.0;
            if (valid) {
              for (int k = 0; k < nc; ++k) {
                // <j,nu| V O_0 - O_tau V |i,mu> = <V bra, O_0 ket> - <O_tau^dag bra, V ket>
                const cplx num = dot(v_bra[bidx], o0v[kidx][k]) - dot(otv[bidx][k], v_ket[kidx]);
                const cplx ratio = num / vel;
                const double corr = 0.5 * ((at_in0_exp[i][k] - a0_exp[i][k]) +
                                           (at_exp[j][k] - a0_int_exp[j][k]));
                epsv[k] = ratio.real() + corr;
                wv[k] = da[k] - qv[k] - epsv[k];
                imag_max = std::max(imag_max, std::abs(ratio.imag()));
              }
            }

            for (int n = 0; n < ds; ++n) {
              for (int k = 0; k < nc; ++k) da_ref[k] = art_exp[n][k] - ar0_exp[m][k];
              TrajectoryRecord rec;
              rec.gamma = Trajectory{i, mu, m, j, nu, n};
              rec.p_forward = p0[i] * pr[mu] * pmi[m][i] * trans * pnj[n][j];
              rec.p_reverse = pt[j] * pr[nu] * pnj[n][j] * trans * pmi[m][i];
              rec.p_reverse_literal = pt[i] * pr[nu] * pnj[n][j] * trans * pmi[m][i];
              rec.delta_a = da;
              rec.delta_a_ref = da_ref;
              rec.q = qv;
              rec.eps = epsv;
              rec.w = wv;
              rec.eps_imag_max = imag_max;
              rec.eps_valid = valid;
              rec.v_element_mag = std::abs(vel);

              const double log_vals[] = {p0[i], pt[j], pd0.probs[m], pdt.probs[n],
                                         pr0[m], prt[n]};
              rec.log_valid = true;
              for (double x : log_vals)
                if (x <= defaults::prob_floor) rec.log_valid = false;
              if (rec.log_valid) {
                rec.dc = std::log(pt[j] / pdt.probs[n]) - std::log(p0[i] / pd0.probs[m]);
                rec.dd = std::log(pdt.probs[n] / prt[n]) - std::log(pd0.probs[m] / pr0[m]);
              }

              if (!rec.eps_valid) ens.excluded_mass += rec.p_forward;
              if (!rec.log_valid) ens.log_flagged_mass += rec.p_forward;
              ens.records.push_back(std::move(rec));
            }
          }
    }
  return ens;
}

// CSV dump: fixed column order, 17 significant digits, LF line endings.
inline void write_trajectory_csv(const PathEnsemble &ens, std::ostream &os) {
  const auto &labels = ens.setup.charge_labels;
  os << "i,mu,m,j,nu,n,p_fwd,p_rev";
  for (const auto &l : labels) os << ",da_" << l;
  for (const auto &l : labels) os << ",q_" << l;
  for (const auto &l : labels) os << ",eps_" << l;
  for (const auto &l : labels) os << ",w_" << l;
  os << ",dc,dd,eps_valid\n";
  char buf[32];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << ',' << buf;
  };
  for (const auto &r : ens.records) {
    os << r.gamma.i << ',' << r.gamma.mu << ',' << r.gamma.m << ',' << r.gamma.j << ','
       << r.gamma.nu << ',' << r.gamma.n;
    num(r.p_forward);
    num(r.p_reverse);
    for (double x : r.delta_a) num(x);
    for (double x : r.q) num(x);
    for (double x : r.eps) num(x);
    for (double x : r.w) num(x);
    num(r.dc);
    num(r.dd);
    os << ',' << (r.eps_valid ? 1 : 0) << '\n';
  }
}

}  // namespace ggeft
