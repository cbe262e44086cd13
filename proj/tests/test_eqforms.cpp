#include <doctest.h>

#include <cmath>
#include <random>

#include "pwave/eqforms.hpp"
#include "pwave/jets.hpp"

using namespace pwave;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
}

SecondJet random_jet(std::mt19937_64& rng) {
  SecondJet j;
  j.psi1 = uniform(rng, -0.5, 0.5);
  j.psi2 = uniform(rng, -0.4, 0.4);
  j.p = uniform(rng, -0.3, 0.3);
  j.q = uniform(rng, -0.3, 0.3);
  j.puu = uniform(rng, -0.5, 0.5);
  j.pub = uniform(rng, -0.5, 0.5);
  j.qubub = uniform(rng, -0.5, 0.5);
  return j;
}

// Independent assembly of d_mu(gring^{mu nu} d_nu phi gring / sqrt g) by chain
// rule from the raw scaled-gradient formulas.
double divergence_oracle(const SecondJet& j) {
  const Jet2 P = detail::seed_psi1(j);
  const Jet2 p = detail::seed_p(j);
  const Jet2 q = detail::seed_q(j);
  const Jet2 one(1.0);
  const Jet2 g = one - Jet2(2.0) * p * q - Jet2(2.0) * P * q + P * q * P * q;
  const Jet2 isg = one / sqrt(g);
  const Jet2 rU = -q + P * q * q;
  const Jet2 rUb = -p - P * p * q;
  const Jet2 fu = rU * isg;
  const Jet2 fub = rUb * isg;
  return fu.du + fub.db;
}

}  // namespace

TEST_CASE("flux-form residual EL0") {
  // phi = 0 on any background
  SecondJet j;
  j.psi1 = 0.3;
  j.psi2 = 0.2;
  CHECK(el_flux_residual(j) == doctest::Approx(0.0).epsilon(1e-15));

  // pure left-mover f(u): q = qubub = pub = 0
  j.p = 0.25;
  j.puu = -0.4;
  CHECK(std::abs(el_flux_residual(j)) < 1e-15);

  // pure right-mover g(ub): EL0 = -psi'' q^2 / (1 - psi' q)^2
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    SecondJet r;
    r.psi1 = uniform(rng, -0.5, 0.5);
    r.psi2 = uniform(rng, -0.4, 0.4);
    r.q = uniform(rng, -0.3, 0.3);
    r.qubub = uniform(rng, -0.5, 0.5);
    const double denom = 1.0 - r.psi1 * r.q;
    const double expected = -r.psi2 * r.q * r.q / (denom * denom);
    CHECK(el_flux_residual(r) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("S0: term-by-term zeros and divergence oracle") {
  {
    SecondJet j;
    j.psi1 = 0.4;
    j.psi2 = 0.3;
    j.p = 0.2;
    j.puu = 0.7;  // q = pub = qubub = 0
    CHECK(std::abs(s0_source(j)) < 1e-15);
  }
  {
    SecondJet j;
    j.p = 0.2;
    j.puu = 0.5;
    j.pub = 0.0;
    CHECK(std::abs(s0_source(j)) < 1e-15);  // psi' = psi'' = 0, q = 0
  }
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const SecondJet j = random_jet(rng);
    const MetricScalars ms = metric_scalars(j.first());
    const double sg = std::sqrt(ms.g);
    const double oracle = (divergence_oracle(j) - ms.gring * el_flux_residual(j)) / sg;
    const double got = s0_source(j);
    CHECK(std::abs(got - oracle) < 1e-12 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("R0: zeros and frozen hand value") {
  {
    SecondJet j;
    j.psi1 = 0.5;
    j.q = 0.2;
    j.p = 0.1;
    CHECK(r0_source(j) == 0.0);  // psi'' = 0
  }
  {
    SecondJet j;
    j.psi1 = 0.5;
    j.psi2 = 0.1;
    j.p = 0.3;
    CHECK(r0_source(j) == 0.0);  // q = 0
  }
  {
    SecondJet j;
    j.psi1 = 0.5;
    j.psi2 = 0.1;
    j.p = 0.3;
    j.q = 0.2;
    const double expected = 0.1 * 0.04 * (1.0 - 0.3 + 0.01 - 0.001) / (0.81 * 0.69);
    CHECK(r0_source(j) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("tilde S0 and Remark-A.2 difference identity") {
  {
    SecondJet j;
    j.psi1 = 0.4;
    j.psi2 = 0.1;
    j.p = 0.25;
    j.puu = 0.3;  // q = pub = qubub = 0
    CHECK(std::abs(tilde_s0_source(j)) < 1e-15);
  }
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    SecondJet j = random_jet(rng);
    j.psi1 = 0.0;
    j.psi2 = 0.0;  // gring = 1: both formulas collapse
    CHECK(tilde_s0_source(j) ==
          doctest::Approx(s0_source(j)).epsilon(1e-13));
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const SecondJet j = random_jet(rng);
    const MetricScalars ms = metric_scalars(j.first());
    const double lhs = tilde_s0_source(j) - s0_source(j);
    const double rhs = (ms.gring - 1.0) / std::sqrt(ms.g) * el_flux_residual(j);
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("tilde R0: zeros and exact off-solution relation") {
  {
    SecondJet j;
    j.psi1 = 0.4;
    j.psi2 = 0.1;
    j.p = 0.2;
    j.puu = 0.6;  // q and all ub-jets zero
    CHECK(std::abs(tilde_r0_source(j)) < 1e-15);
  }
  {
    SecondJet j;
    j.psi1 = 0.4;
    j.p = 0.2;
    j.q = 0.15;  // psi'' = 0, second jets zero
    CHECK(std::abs(tilde_r0_source(j)) < 1e-15);
  }
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const SecondJet j = random_jet(rng);
    const MetricScalars ms = metric_scalars(j.first());
    const double lhs = ms.gring * (quasilinear_principal(j) - tilde_r0_source(j));
    const double rhs = std::sqrt(ms.g) * el_flux_residual(j);
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("box and principal part") {
  {
    SecondJet j;
    j.psi1 = 0.3;
    j.psi2 = 0.1;
    CHECK(box_g(j) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(quasilinear_principal(j) == 0.0);
  }
  {
    // flat background left-mover: everything constant-coefficient
    SecondJet j;
    j.p = 0.2;
    j.puu = 0.4;
    CHECK(std::abs(box_g(j)) < 1e-15);
  }
  {
    SecondJet j;
    j.pub = 0.37;
    CHECK(quasilinear_principal(j) == doctest::Approx(-2.0 * 0.37).epsilon(1e-15));
  }
  {
    // right-mover: principal vanishes and the residual equals -R0 there
    SecondJet j;
    j.psi1 = 0.4;
    j.psi2 = 0.2;
    j.q = 0.25;
    j.qubub = 0.5;
    CHECK(std::abs(quasilinear_principal(j)) < 1e-15);
    CHECK(quasilinear_principal(j) - r0_source(j) ==
          doctest::Approx(-r0_source(j)).epsilon(1e-14));
    // and the ID-B relation holds there too
    const MetricScalars ms = metric_scalars(j.first());
    CHECK(std::sqrt(ms.g) * (box_g(j) - s0_source(j)) ==
          doctest::Approx(ms.gring * el_flux_residual(j)).epsilon(1e-12));
  }
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const SecondJet j = random_jet(rng);
    const MetricScalars ms = metric_scalars(j.first());
    const double oracle = divergence_oracle(j) / (ms.gring * std::sqrt(ms.g)) * ms.g;
    // g g^{mu nu} d_nu phi = gring gring^{mu nu} d_nu phi makes the full flux
    // divergence equal gring^{-1} sqrt(g) ... assemble independently instead:
    const Jet2 P = detail::seed_psi1(j);
    const Jet2 p = detail::seed_p(j);
    const Jet2 q = detail::seed_q(j);
    const auto m = detail::metric_jets(P, p, q);
    const Jet2 fu = m.sg * (m.guu * p + m.guub * q);
    const Jet2 fub = m.sg * (m.guub * p + m.gubub * q);
    const double box_oracle = (fu.du + fub.db) / m.sg.v;
    (void)oracle;
    CHECK(std::abs(box_g(j) - box_oracle) < 1e-11 * std::max(1.0, std::abs(box_oracle)));
  }
}

TEST_CASE("commute residual is pure rounding") {
  const auto profile = PlaneWaveProfile::gaussian(0.2, 2.0);
  const auto catalog = analytic_catalog(profile);
  std::mt19937_64 rng(17);
  for (const auto& field : catalog) {
    for (int trial = 0; trial < 50; ++trial) {
      const double u = uniform(rng, -3, 3), ub = uniform(rng, -3, 3);
      CHECK(higher_order_commute_residual(field, 1, u, ub) < 1e-11);
      CHECK(higher_order_commute_residual(field, 2, u, ub) < 1e-10);
    }
  }
  // constant field: exactly zero
  const auto& c = catalog.front();
  CHECK(higher_order_commute_residual(c, 1, 0.3, -0.7) == 0.0);
}

TEST_CASE("identity suite holds on power and zero backgrounds") {
  IdentitySuiteConfig cfg;
  cfg.n_points = 140;
  for (const auto& prof :
       {PlaneWaveProfile::power(0.25, 2.05), PlaneWaveProfile::zero()}) {
    const ResidualReport rep = run_identity_suite(analytic_catalog(prof), cfg);
    for (const auto& r : rep.rows) {
      INFO(r.name, " max_rel=", r.max_rel);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("identity suite: empty, zero field, full catalog") {
  const auto profile = PlaneWaveProfile::gaussian(0.2, 2.0);
  IdentitySuiteConfig cfg;
  cfg.n_points = 140;  // per the full suite below; smoke-level here

  {
    const ResidualReport rep = run_identity_suite({}, cfg);
    CHECK(rep.rows.empty() == false);  // rows exist but carry no samples
    for (const auto& r : rep.rows) CHECK(r.n_points == 0);
    CHECK(!rep.all_pass());  // vacuous data cannot pass the gate
  }
  {
    AnalyticTestField zero_field{
        "zero", [](int, int, double, double) { return 0.0; }, profile, true};
    const ResidualReport rep = run_identity_suite({zero_field}, cfg);
    for (const auto& r : rep.rows) {
      CHECK(r.max_abs == 0.0);
    }
  }
  {
    const ResidualReport rep = run_identity_suite(analytic_catalog(profile), cfg);
    for (const auto& r : rep.rows) {
      INFO(r.name, " max_rel=", r.max_rel);
      CHECK(r.pass);
    }
    CHECK(rep.all_pass());
    const std::string csv = rep.to_csv();
    CHECK(csv.find("ID-A-s0-difference") != std::string::npos);
  }
}
