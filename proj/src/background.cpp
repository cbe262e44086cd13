#include "pwave/background.hpp"

#include <cmath>

#include "pwave/quadrature.hpp"

namespace pwave {
namespace {

// Dense polynomial with double coefficients, index = power.
using Poly = std::vector<double>;

Poly poly_derivative(const Poly& c) {
  if (c.size() <= 1) return {0.0};
  Poly d(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = c[k] * static_cast<double>(k);
  return d;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

double poly_eval(const Poly& c, double u) {
  double r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * u + c[k];
  return r;
}

// d^(i-1)/du^(i-1) [A (1+u^2)^(-p/2)] written as (1+u^2)^(-p/2 - (i-1)) * P(u):
// d/du [(1+u^2)^a P] = (1+u^2)^(a-1) [ (1+u^2) P' + 2 a u P ].
double power_deriv(double amp, double p, int i, double u) {
  Poly poly = {amp};
  double a = -0.5 * p;
  for (int step = 1; step < i; ++step) {
    Poly t1 = poly_mul({1.0, 0.0, 1.0}, poly_derivative(poly));
    Poly t2 = poly_mul({0.0, 2.0 * a}, poly);
    poly = poly_add(t1, t2);
    a -= 1.0;
  }
  return std::pow(1.0 + u * u, a) * poly_eval(poly, u);
}

// d^(i-1)/du^(i-1) [A exp(-u^2/(2 s^2))] = exp(-u^2/(2 s^2)) * P(u):
// d/du [e^g P] = e^g (P' - u/s^2 P).
double gaussian_deriv(double amp, double sigma, int i, double u) {
  Poly poly = {amp};
  const double inv_s2 = 1.0 / (sigma * sigma);
  for (int step = 1; step < i; ++step) {
    poly = poly_add(poly_derivative(poly), poly_mul({0.0, -inv_s2}, poly));
  }
  return std::exp(-0.5 * u * u * inv_s2) * poly_eval(poly, u);
}

}  // namespace

namespace detail {
double gaussian_nth_derivative(double amp, double sigma, int n, double x) {
  return gaussian_deriv(amp, sigma, n + 1, x);
}
double power_nth_derivative(double amp, double p, int n, double x) {
  return power_deriv(amp, p, n + 1, x);
}
}  // namespace detail

double lambda_weight(double x, const WeightParams& params) {
  return std::pow(1.0 + x * x, 1.0 + params.gamma);
}

double lambda_weight_deriv(double x, const WeightParams& params) {
  return (1.0 + params.gamma) * 2.0 * x * std::pow(1.0 + x * x, params.gamma);
}

double psi_derivative(const PlaneWaveProfile& profile, int i, double u) {
  if (i < 1) throw OrderNotImplementedError("psi_derivative requires order i >= 1");
  switch (profile.kind) {
    case ProfileKind::kZero:
      return 0.0;
    case ProfileKind::kPower:
      return power_deriv(profile.amplitude, profile.param, i, u);
    case ProfileKind::kGaussian:
      return gaussian_deriv(profile.amplitude, profile.param, i, u);
  }
  throw OrderNotImplementedError("unknown profile kind");
}

double psi_value(const PlaneWaveProfile& profile, double u) {
  switch (profile.kind) {
    case ProfileKind::kZero:
      return 0.0;
    case ProfileKind::kGaussian: {
      // Integral_0^u A exp(-t^2/(2 s^2)) dt = A s sqrt(pi/2) erf(u/(s sqrt 2))
      const double s = profile.param;
      return profile.amplitude * s * std::sqrt(M_PI / 2.0) * std::erf(u / (s * M_SQRT2));
    }
    case ProfileKind::kPower:
      return integrate_gk15([&](double t) { return psi_derivative(profile, 1, t); }, 0.0, u,
                            1e-13);
  }
  return 0.0;
}

double psi_integral_sq(const PlaneWaveProfile& profile, double u) {
  switch (profile.kind) {
    case ProfileKind::kZero:
      return 0.0;
    case ProfileKind::kGaussian: {
      // (psi')^2 = A^2 exp(-u^2/s^2); Integral_0^u = A^2 s sqrt(pi)/2 erf(u/s)
      const double s = profile.param;
      const double a2 = profile.amplitude * profile.amplitude;
      return a2 * s * 0.5 * std::sqrt(M_PI) * std::erf(u / s);
    }
    case ProfileKind::kPower: {
      auto f = [&](double t) {
        const double d = psi_derivative(profile, 1, t);
        return d * d;
      };
      return integrate_gk15(f, 0.0, u, 1e-12);
    }
  }
  return 0.0;
}

std::map<int, double> check_decay_assumption(const PlaneWaveProfile& profile,
                                             const WeightParams& params, int i_max,
                                             const std::vector<double>& u_grid) {
  double lo = 0.0, hi = 0.0;
  for (double u : u_grid) {
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  if (lo > -100.0 || hi < 100.0) {
    throw std::invalid_argument("decay check grid must span at least [-100, 100]");
  }
  std::map<int, double> out;
  for (int i = 0; i <= i_max; ++i) {
    double ci = 0.0;
    for (double u : u_grid) {
      const double w = std::sqrt(lambda_weight(u, params)) *
                       std::pow(1.0 + u * u, 0.25 * (1.0 + params.epsilon));
      ci = std::max(ci, w * std::abs(psi_derivative(profile, i + 1, u)));
    }
    out[i] = ci;
  }
  return out;
}

}  // namespace pwave
