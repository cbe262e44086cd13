#pragma once

#include <map>
#include <string>
#include <vector>

#include "pwave/errors.hpp"

namespace pwave {

struct WeightParams {
  double gamma = 0.5;    // exponent in (0,1)
  double epsilon = 0.1;  // decay margin > 0

  bool valid() const { return gamma > 0.0 && gamma < 1.0 && epsilon > 0.0; }
};

// Lambda(x) = (1+x^2)^(1+gamma); even, >= 1, increasing in |x|.
double lambda_weight(double x, const WeightParams& params);
// d/dx Lambda(x), needed by the multiplier deformation terms.
double lambda_weight_deriv(double x, const WeightParams& params);

enum class ProfileKind { kZero, kPower, kGaussian };

// Analytic right-travelling background, defined through psi'(u):
//   zero:      psi'(u) = 0
//   power:     psi'(u) = A * (1+u^2)^(-p/2)
//   gaussian:  psi'(u) = A * exp(-u^2 / (2 sigma^2))
struct PlaneWaveProfile {
  ProfileKind kind = ProfileKind::kGaussian;
  double amplitude = 0.2;
  double param = 2.0;  // p for power, sigma for gaussian

  static PlaneWaveProfile zero() { return {ProfileKind::kZero, 0.0, 0.0}; }
  static PlaneWaveProfile power(double a, double p) { return {ProfileKind::kPower, a, p}; }
  static PlaneWaveProfile gaussian(double a, double sigma) {
    return {ProfileKind::kGaussian, a, sigma};
  }
};

// Exact i-th derivative of psi at u, i >= 1 (psi^(1) = psi').
// Closed form for each kind via polynomial recurrences; any order is available.
double psi_derivative(const PlaneWaveProfile& profile, int i, double u);

// psi(u) anchored at psi(0) = 0 (additive constants are gauge).
double psi_value(const PlaneWaveProfile& profile, double u);

// H2(u) = Integral_0^u psi'(tau)^2 dtau. Closed form for zero/gaussian,
// adaptive quadrature (abs tol 1e-12) for the power family.
double psi_integral_sq(const PlaneWaveProfile& profile, double u);

// C_i = max over u_grid of Lambda^(1/2)(u) <u>^((1+eps)/2) |psi^(i+1)(u)|, 0 <= i <= i_max.
std::map<int, double> check_decay_assumption(const PlaneWaveProfile& profile,
                                             const WeightParams& params, int i_max,
                                             const std::vector<double>& u_grid);

namespace detail {
// n-th derivative (n >= 0) of amp * exp(-x^2/(2 sigma^2)), exact polynomial recurrence.
double gaussian_nth_derivative(double amp, double sigma, int n, double x);
// n-th derivative (n >= 0) of amp * (1+x^2)^(-p/2).
double power_nth_derivative(double amp, double p, int n, double x);
}  // namespace detail

}  // namespace pwave
