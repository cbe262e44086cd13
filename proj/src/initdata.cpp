#include "pwave/initdata.hpp"

#include <cmath>

#include "pwave/diagnostics.hpp"
#include "pwave/geometry.hpp"
#include "pwave/quadrature.hpp"

namespace pwave {

double SeedProfile::deriv(int n, double x) const {
  switch (kind) {
    case SeedKind::kZero:
      return 0.0;
    case SeedKind::kGaussian:
      return detail::gaussian_nth_derivative(amplitude, sigma, n, x - center);
  }
  return 0.0;
}

namespace {

double fprime_of(const SeedProfiles& s, const PlaneWaveProfile& prof, double x) {
  const double s1 = psi_derivative(prof, 1, -x);
  return 0.5 * (s.delta * s.f(x) - 2.0 * s.fbar(x) + s.delta * s1 * s1 * s.f(x));
}

double g_of(const SeedProfiles& s, const PlaneWaveProfile& prof, double x) {
  const double s1 = psi_derivative(prof, 1, -x);
  return 0.5 * (s.delta * s.f(x) + 2.0 * s.fbar(x) - s.delta * s1 * s1 * s.f(x));
}

}  // namespace

InitialData build_data(const SeedProfiles& seeds, const PlaneWaveProfile& profile,
                       const Grid& grid) {
  const double edge =
      std::abs(seeds.f(grid.x(0))) + std::abs(seeds.fbar(grid.x(0))) +
      std::abs(seeds.f(grid.x(grid.n - 1))) + std::abs(seeds.fbar(grid.x(grid.n - 1)));
  if (edge > 1e-12) {
    throw SupportOverflowError("seed profiles not negligible at grid edges (" +
                               std::to_string(edge) + ")");
  }
  InitialData data;
  data.grid = grid;
  data.provenance = seeds;
  data.F.resize(grid.n);
  data.Fprime.resize(grid.n);
  data.G.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    data.Fprime[i] = fprime_of(seeds, profile, grid.x(i));
    data.G[i] = g_of(seeds, profile, grid.x(i));
  }
  // F by cumulative quadrature of the analytic F', anchored F(x_min) = 0
  data.F[0] = 0.0;
  for (int i = 1; i < grid.n; ++i) {
    data.F[i] = data.F[i - 1] +
                integrate_gk15([&](double x) { return fprime_of(seeds, profile, x); },
                               grid.x(i - 1), grid.x(i), 1e-14);
  }
  return data;
}

GridState to_state(const InitialData& data, const PlaneWaveProfile& profile) {
  GridState s;
  s.grid = data.grid;
  s.grid.t = 0.0;
  const int n = data.grid.n;
  s.phi.resize(n);
  s.v.resize(n);
  s.w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = data.grid.x(i);
    const double s1 = psi_derivative(profile, 1, -x);
    s.phi[i] = data.F[i] + psi_value(profile, -x);
    s.v[i] = data.G[i] + s1;
    s.w[i] = data.Fprime[i] - s1;
  }
  return s;
}

double weighted_sobolev_norm(const SeedProfile& f, const SeedProfile& fbar, int k_max,
                             double gamma) {
  WeightParams wp;
  wp.gamma = gamma;
  const double reach = 14.0 * std::max(f.sigma, fbar.sigma) +
                       std::max(std::abs(f.center), std::abs(fbar.center)) + 1.0;
  double worst = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const auto integrand = [&](double x) {
      const double a = f.deriv(k, x);
      const double b = fbar.deriv(k, x);
      return lambda_weight(x, wp) * (a * a + b * b);
    };
    worst = std::max(worst, integrate_gk15(integrand, -reach, reach, 1e-10));
  }
  return worst;
}

JetField initial_jets(const SeedProfiles& seeds, const PlaneWaveProfile& profile,
                      const Grid& grid) {
  JetField j;
  j.grid = grid;
  j.grid.t = 0.0;
  j.order = 2;
  j.halo = 0;
  const int n = grid.n;
  j.u.resize(n);
  j.ub.resize(n);
  j.psi1.resize(n);
  j.psi2.resize(n);
  j.phi0.resize(n);
  j.p.resize(n);
  j.q.resize(n);
  j.puu.resize(n);
  j.pub.resize(n);
  j.qubub.resize(n);

  // F(x) values for the (0,0) entry
  std::vector<double> F(n, 0.0);
  for (int i = 1; i < n; ++i) {
    F[i] = F[i - 1] + integrate_gk15([&](double x) { return fprime_of(seeds, profile, x); },
                                     grid.x(i - 1), grid.x(i), 1e-14);
  }

  for (int i = 0; i < n; ++i) {
    const double x = grid.x(i);
    const double u = -x;
    j.u[i] = u;
    j.ub[i] = 0.5 * x - 0.5 * psi_integral_sq(profile, u);
    j.psi1[i] = psi_derivative(profile, 1, u);
    j.psi2[i] = psi_derivative(profile, 2, u);
    j.phi0[i] = F[i];
    // frame identities at t=0
    j.q[i] = seeds.delta * seeds.f(x);
    j.p[i] = seeds.fbar(x);
    // second order: d_x of the first-order fields plus the quasilinear equation
    const double dq_dx = seeds.delta * seeds.f.deriv(1, x);
    const double dp_dx = seeds.fbar.deriv(1, x);
    const SecondJet probe{j.psi1[i], j.psi2[i], j.p[i], j.q[i], 0.0, 0.0, 0.0};
    const MetricScalars ms = metric_scalars(probe.first());
    const double t = j.psi1[i] * j.q[i];
    const double r0 = j.psi2[i] * j.q[i] * j.q[i] *
                      (1.0 - 3.0 * t + t * t - t * t * t) / (ms.gring * ms.g);
    // d_x h = c d_ub h - d_u h with c = (psi'^2+1)/2:
    //   dp_dx = c*pub - puu, dq_dx = c*qubub - pub,
    //   guu puu + 2 guub pub + gubub qubub = R0
    const double c = 0.5 * (j.psi1[i] * j.psi1[i] + 1.0);
    const double coeff = ms.guu * c * c + 2.0 * ms.guub * c + ms.gubub;
    // substitute puu = c*(c*qubub - dq_dx... solve in terms of qubub:
    //   pub = c*qubub - dq_dx, puu = c*pub - dp_dx = c^2 qubub - c dq_dx - dp_dx
    const double rhs = r0 + ms.guu * (c * dq_dx + dp_dx) + 2.0 * ms.guub * dq_dx;
    const double qubub = rhs / coeff;
    j.qubub[i] = qubub;
    j.pub[i] = c * qubub - dq_dx;
    j.puu[i] = c * j.pub[i] - dp_dx;
  }
  return j;
}

InitialEnergyReport initial_energy_check(const SeedProfiles& seeds,
                                         const PlaneWaveProfile& profile, const Grid& grid,
                                         const WeightParams& params, int k_max) {
  const JetField j = initial_jets(seeds, profile, grid);
  InitialEnergyReport rep;
  for (int k = 0; k <= k_max; ++k) {
    rep.E2 += slice_energy(j, params, RegionSpec::full_slice(), k, EnergyFamily::kE);
    rep.Eb2 += slice_energy(j, params, RegionSpec::full_slice(), k, EnergyFamily::kEb);
  }
  rep.I = weighted_sobolev_norm(seeds.f, seeds.fbar, k_max + 1, params.gamma);
  const double I2 = rep.I * rep.I;
  rep.ratio_E = (seeds.delta > 0.0 && I2 > 0.0) ? rep.E2 / (seeds.delta * seeds.delta * I2)
                                                : 0.0;
  rep.ratio_Eb = I2 > 0.0 ? rep.Eb2 / I2 : 0.0;
  return rep;
}

}  // namespace pwave
