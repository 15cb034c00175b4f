#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "ggeft/gge.hpp"
#include "ggeft/pauli.hpp"
#include "test_util.hpp"

using namespace ggeft;
using ggeft_test::pauli;

namespace {

ChargeSet qubit_z(double lam_z, const std::string &label = "z") {
  return ChargeSet({HermitianOperator(pauli('Z'), "sz")}, {lam_z}, label);
}

// system state of the two-qubit example at angle theta: charges (sx, sz),
// affinities (w b sin/2, w b cos/2)
ChargeSet tilted(double theta, double beta, double omega) {
  return ChargeSet(
      {HermitianOperator(pauli('X'), "sx"), HermitianOperator(pauli('Z'), "sz")},
      {omega * beta * std::sin(theta) / 2.0, omega * beta * std::cos(theta) / 2.0}, "tilted");
}

}  // namespace

TEST_CASE("massieu potential closed forms") {
  // all affinities zero: F = -ln d
  ChargeSet zero({HermitianOperator(pauli('Z'), "sz"), HermitianOperator(pauli('X'), "sx")},
                 {0.0, 0.0});
  CHECK(massieu_potential(zero) == Catch::Approx(-std::log(2.0)).margin(1e-14));

  // single qubit, lambda.A = (1/2) sz: F = -ln(2 cosh(1/2))
  CHECK(massieu_potential(qubit_z(0.5)) ==
        Catch::Approx(-0.81326168751822281).margin(1e-14));

  // charges (sx, sz) with lambda = (1/2, 1/2): eigenvalues +-|lambda| = +-sqrt(2)/2
  ChargeSet two({HermitianOperator(pauli('X'), "sx"), HermitianOperator(pauli('Z'), "sz")},
                {0.5, 0.5});
  CHECK(massieu_potential(two) == Catch::Approx(-0.92472850276829133).margin(1e-14));
}

TEST_CASE("gibbs state closed forms") {
  // lambda = 0: maximally mixed
  const GibbsState mixed = build_gibbs_state(
      ChargeSet({HermitianOperator(pauli('Z'), "sz")}, {0.0}, "mixed"));
  CHECK(mixed.density.approx_equal(0.5 * ComplexMatrix::identity(2), 1e-14));

  // beta = omega = 1, H = sz/2: density = diag(p0, p1), p0 = e^{-1/2}/(2cosh(1/2))
  const GibbsState th = build_gibbs_state(qubit_z(0.5));
  CHECK(std::abs(th.density(0, 0) - cplx(0.26894142136999516)) < 1e-14);
  CHECK(std::abs(th.density(1, 1) - cplx(1.0 - 0.26894142136999516)) < 1e-14);
  CHECK(std::abs(th.density(0, 1)) < 1e-15);
  CHECK(std::abs(th.density.trace() - cplx(1.0)) < 1e-12);
  // eigen order: ascending contraction eigenvalue => descending probability
  CHECK(th.probs[0] > th.probs[1]);

  // theta = pi/2 rotation leaves the spectrum invariant, eigenvectors rotate
  const GibbsState rot = build_gibbs_state(tilted(M_PI / 2.0, 1.0, 1.0));
  CHECK(rot.probs[0] == Catch::Approx(th.probs[0]).margin(1e-14));
  CHECK(rot.probs[1] == Catch::Approx(th.probs[1]).margin(1e-14));
  // sx eigenstates: |<0|v>|^2 = 1/2
  CHECK(std::norm(rot.basis.vectors(0, 0)) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("gibbs state satisfies its logarithmic invariant") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    ChargeSet cs({ggeft_test::random_hermitian(rng, n), ggeft_test::random_hermitian(rng, n)},
                 {u(rng), u(rng)}, "rand");
    const GibbsState g = build_gibbs_state(cs);
    // ln(rho) + lambda.A - F = 0 evaluated spectrally
    const ComplexMatrix lhs =
        g.basis.map_eigenvalues([&](double e) { return g.massieu - e; })  // ln rho
        + cs.contraction().matrix() - g.massieu * ComplexMatrix::identity(n);
    CHECK(lhs.max_abs() < 1e-8);
    CHECK(std::abs(g.density.trace() - cplx(1.0)) < 1e-10);
    for (double p : g.probs) CHECK(p >= -1e-12);
    // density reproduces exp(F - lambda.A)
    const ComplexMatrix direct = expm_hermitian(cs.contraction(), -1.0) * std::exp(g.massieu);
    CHECK((g.density - direct).max_abs() < 1e-9);
  }
}

TEST_CASE("dephased distribution") {
  const GibbsState ref = build_gibbs_state(qubit_z(0.25));  // beta_r = 0.5, omega = 1

  // commuting case: p^d equals the state's eigenvalues in reference order
  const GibbsState stz = build_gibbs_state(qubit_z(0.5));
  const ProbabilityVector pd_comm = dephased_distribution(stz, ref);
  CHECK(pd_comm.probs[0] == Catch::Approx(stz.probs[0]).margin(1e-13));
  CHECK(pd_comm.probs[1] == Catch::Approx(stz.probs[1]).margin(1e-13));

  // theta = pi/2: sx-Gibbs state has a uniform sz diagonal
  const GibbsState stx = build_gibbs_state(tilted(M_PI / 2.0, 1.0, 1.0));
  const ProbabilityVector pd_x = dephased_distribution(stx, ref);
  CHECK(pd_x.probs[0] == Catch::Approx(0.5).margin(1e-13));
  CHECK(pd_x.probs[1] == Catch::Approx(0.5).margin(1e-13));

  // theta = pi/4 Bloch projection closed form
  const GibbsState st4 = build_gibbs_state(tilted(M_PI / 4.0, 1.0, 1.0));
  const ProbabilityVector pd4 = dephased_distribution(st4, ref);
  // reference order: ground of 0.25 sz is |1> (sz = -1) first
  CHECK(pd4.probs[0] == Catch::Approx(1.0 - 0.33661691219939849).margin(1e-12));
  CHECK(pd4.probs[1] == Catch::Approx(0.33661691219939849).margin(1e-12));
  double sum = pd4.probs[0] + pd4.probs[1];
  CHECK(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("relative entropy of coherence closed forms") {
  const GibbsState ref = build_gibbs_state(qubit_z(0.25));
  const GibbsState stz = build_gibbs_state(qubit_z(0.5));
  CHECK(rel_entropy_coherence(stz, ref) == Catch::Approx(0.0).margin(1e-12));

  const GibbsState stx = build_gibbs_state(tilted(M_PI / 2.0, 1.0, 1.0));
  CHECK(rel_entropy_coherence(stx, ref) ==
        Catch::Approx(0.11094407167172737).margin(1e-12));
}

TEST_CASE("athermality closed forms") {
  const GibbsState ref = build_gibbs_state(qubit_z(0.25));
  CHECK(athermality(ref, ref) == Catch::Approx(0.0).margin(1e-13));

  const GibbsState stx = build_gibbs_state(tilted(M_PI / 2.0, 1.0, 1.0));
  CHECK(athermality(stx, ref) == Catch::Approx(0.030929803620161456).margin(1e-12));

  // uniform vs uniform
  ChargeSet zero({HermitianOperator(pauli('Z'), "sz")}, {0.0});
  const GibbsState u = build_gibbs_state(zero);
  CHECK(athermality(u, u) == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("massieu overflow guard") {
  CHECK_THROWS_AS(massieu_potential(qubit_z(800.0)), std::range_error);
}

TEST_CASE("athermality demands a full-rank reference") {
  // lambda so large the reference ground-state probability underflows
  const GibbsState ref = build_gibbs_state(qubit_z(20.0));
  const GibbsState st = build_gibbs_state(qubit_z(0.5));
  CHECK_THROWS_AS(athermality(st, ref), std::domain_error);
}

TEST_CASE("nonequilibrium free entropy") {
  const GibbsState ref = build_gibbs_state(qubit_z(0.25));
  CHECK(noneq_free_entropy(ref, ref) == Catch::Approx(ref.massieu).margin(1e-12));

  // equal affinities: F_cal reduces to the state's own F
  const GibbsState st = build_gibbs_state(qubit_z(0.5));
  const GibbsState ref_same = build_gibbs_state(qubit_z(0.5));
  CHECK(noneq_free_entropy(st, ref_same) == Catch::Approx(st.massieu).margin(1e-10));

  const GibbsState stx = build_gibbs_state(tilted(M_PI / 2.0, 1.0, 1.0));
  CHECK(noneq_free_entropy(stx, ref) ==
        Catch::Approx(ref.massieu + 0.11094407167172737 + 0.030929803620161456)
            .margin(1e-11));
}

TEST_CASE("coherence and athermality are nonnegative on random ensembles") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = (rep % 2) ? 2 : 3;  // qubit and qutrit cases
    ChargeSet cs_state({ggeft_test::random_hermitian(rng, n)}, {u(rng)}, "s");
    ChargeSet cs_ref({ggeft_test::random_hermitian(rng, n)}, {u(rng)}, "r");
    const GibbsState st = build_gibbs_state(cs_state);
    const GibbsState ref = build_gibbs_state(cs_ref);
    const double c = rel_entropy_coherence(st, ref);
    const double d = athermality(st, ref);
    REQUIRE(c >= -1e-12);
    REQUIRE(d >= -1e-12);
    // majorization sanity: S(p^d) >= S(pi)
    const ProbabilityVector pd = dephased_distribution(st, ref);
    double sum = 0.0;
    for (double p : pd.probs) sum += p;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(shannon_entropy(pd.probs) >= shannon_entropy(st.probs) - 1e-12);
  }
}

TEST_CASE("massieu potential is invariant under joint unitary conjugation") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 3;
    const HermitianOperator a = ggeft_test::random_hermitian(rng, n);
    const HermitianOperator b = ggeft_test::random_hermitian(rng, n);
    const double la = u(rng), lb = u(rng);
    const ChargeSet cs({a, b}, {la, lb}, "orig");
    const ComplexMatrix rot =
        expm_hermitian(ggeft_test::random_hermitian(rng, n), cplx(0.0, 1.0));
    auto conj = [&](const HermitianOperator &h) {
      return HermitianOperator(rot * h.matrix() * rot.adjoint(), h.label() + "'",
                               1e-10);
    };
    const ChargeSet cs2({conj(a), conj(b)}, {la, lb}, "conj");
    CHECK(massieu_potential(cs2) == Catch::Approx(massieu_potential(cs)).margin(1e-9));
  }
}
