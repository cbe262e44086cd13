#pragma once

#include <vector>

#include "pwave/background.hpp"
#include "pwave/solver.hpp"

namespace pwave {

enum class SeedKind { kZero, kGaussian };

// Seed profile with closed-form derivatives of every order.
struct SeedProfile {
  SeedKind kind = SeedKind::kZero;
  double amplitude = 0.0;
  double sigma = 1.0;
  double center = 0.0;

  double deriv(int n, double x) const;  // n-th derivative, n >= 0
  double operator()(double x) const { return deriv(0, x); }

  static SeedProfile zero() { return {}; }
  static SeedProfile gaussian(double amp, double sigma, double center = 0.0) {
    return {SeedKind::kGaussian, amp, sigma, center};
  }
};

struct SeedProfiles {
  SeedProfile f, fbar;
  double delta = 0.0;
};

struct InitialData {
  Grid grid;
  std::vector<double> F;       // position data (perturbation at t=0)
  std::vector<double> Fprime;  // analytic F'
  std::vector<double> G;       // velocity data
  SeedProfiles provenance;
};

// F' = (delta f - 2 fbar + delta (psi'(-x))^2 f)/2,
// G  = (delta f + 2 fbar - delta (psi'(-x))^2 f)/2,
// F by cumulative quadrature anchored F(x_min) = 0.
InitialData build_data(const SeedProfiles& seeds, const PlaneWaveProfile& profile,
                       const Grid& grid);

// Total-field solver state at t=0 for the built data.
GridState to_state(const InitialData& data, const PlaneWaveProfile& profile);

// max over k <= k_max of Integral Lambda(x) (|f^(k)|^2 + |fbar^(k)|^2) dx.
double weighted_sobolev_norm(const SeedProfile& f, const SeedProfile& fbar, int k_max,
                             double gamma);

// Analytic null jets of the perturbation at t=0 (order 2); second-order
// entries are produced from the data plus the quasilinear equation, so no
// finite differencing enters.
JetField initial_jets(const SeedProfiles& seeds, const PlaneWaveProfile& profile,
                      const Grid& grid);

struct InitialEnergyReport {
  double E2 = 0.0;       // sum over k <= k_max of E^2_(k+1)(0)
  double Eb2 = 0.0;      // same for Ebar
  double I = 0.0;        // weighted data norm
  double ratio_E = 0.0;  // E2 / (delta^2 I^2)
  double ratio_Eb = 0.0; // Eb2 / I^2
};

InitialEnergyReport initial_energy_check(const SeedProfiles& seeds,
                                         const PlaneWaveProfile& profile, const Grid& grid,
                                         const WeightParams& params, int k_max);

}  // namespace pwave
