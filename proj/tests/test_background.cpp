#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "pwave/background.hpp"

using namespace pwave;

namespace {

// Independent oracle: adaptive Simpson, used only in tests.
double simpson_adaptive(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth > 60 || std::abs(left + right - whole) < 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return simpson_adaptive(f, a, m, fa, flm, fm, 0.5 * tol, depth + 1) +
         simpson_adaptive(f, m, b, fm, frm, fb, 0.5 * tol, depth + 1);
}

double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return simpson_adaptive(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol, 0);
}

double richardson_derivative(const std::function<double(double)>& f, double u, double h) {
  const auto d = [&](double hh) { return (f(u + hh) - f(u - hh)) / (2.0 * hh); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

}  // namespace

TEST_CASE("lambda weight basics") {
  WeightParams wp;
  wp.gamma = 0.5;
  CHECK(lambda_weight(0.0, wp) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambda_weight(1.0, wp) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-15));
  CHECK(lambda_weight(-1.0, wp) == doctest::Approx(lambda_weight(1.0, wp)).epsilon(1e-15));
  double prev = 1.0;
  for (double x = 0.25; x < 8.0; x += 0.25) {
    const double v = lambda_weight(x, wp);
    CHECK(v >= 1.0);
    CHECK(v > prev);
    CHECK(lambda_weight(-x, wp) == doctest::Approx(v).epsilon(1e-15));
    prev = v;
  }
  // derivative against Richardson FD
  for (double x : {-2.3, -0.4, 0.7, 3.1}) {
    const double fd =
        richardson_derivative([&](double t) { return lambda_weight(t, wp); }, x, 1e-3);
    CHECK(lambda_weight_deriv(x, wp) == doctest::Approx(fd).epsilon(1e-9));
  }
}

TEST_CASE("psi derivatives: closed forms vs finite differences") {
  const auto zero = PlaneWaveProfile::zero();
  for (int i = 1; i <= 5; ++i) CHECK(psi_derivative(zero, i, 0.7) == 0.0);

  const auto gauss = PlaneWaveProfile::gaussian(0.2, 2.0);
  CHECK(psi_derivative(gauss, 1, 0.0) == doctest::Approx(0.2).epsilon(1e-15));

  // [DERIVED] power kind, i=2 at u=1 against Richardson FD of i=1
  const auto pow_prof = PlaneWaveProfile::power(0.3, 2.05);
  {
    const double fd = richardson_derivative(
        [&](double u) { return psi_derivative(pow_prof, 1, u); }, 1.0, 1e-3);
    CHECK(psi_derivative(pow_prof, 2, 1.0) == doctest::Approx(fd).epsilon(1e-9));
  }

  // property: FD consistency for all kinds, i <= 3, random u
  std::mt19937_64 rng(7);
  for (const auto& prof : {gauss, pow_prof}) {
    for (int trial = 0; trial < 100; ++trial) {
      const double u = 8.0 * (double(rng() >> 11) * 0x1.0p-53 - 0.5);
      for (int i = 1; i <= 3; ++i) {
        const double fd = richardson_derivative(
            [&](double t) { return psi_derivative(prof, i, t); }, u, 1e-3);
        const double exact = psi_derivative(prof, i + 1, u);
        CHECK(std::abs(exact - fd) < 1e-8 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("psi value anchored at zero") {
  const auto gauss = PlaneWaveProfile::gaussian(0.2, 2.0);
  CHECK(psi_value(gauss, 0.0) == 0.0);
  const double oracle =
      simpson([&](double t) { return psi_derivative(gauss, 1, t); }, 0.0, 1.7, 1e-15);
  CHECK(psi_value(gauss, 1.7) == doctest::Approx(oracle).epsilon(1e-13));

  const auto pw = PlaneWaveProfile::power(0.3, 2.05);
  const double oracle2 =
      simpson([&](double t) { return psi_derivative(pw, 1, t); }, 0.0, -2.2, 1e-15);
  CHECK(psi_value(pw, -2.2) == doctest::Approx(oracle2).epsilon(1e-12));
}

TEST_CASE("psi integral of (psi')^2") {
  CHECK(psi_integral_sq(PlaneWaveProfile::zero(), 3.0) == 0.0);
  const auto gauss = PlaneWaveProfile::gaussian(0.1, 1.0);
  CHECK(psi_integral_sq(gauss, 0.0) == 0.0);

  // [DERIVED] gaussian closed form against independent quadrature at 1e-14
  const double oracle = simpson(
      [&](double t) {
        const double d = psi_derivative(gauss, 1, t);
        return d * d;
      },
      0.0, 2.0, 1e-16);
  CHECK(psi_integral_sq(gauss, 2.0) == doctest::Approx(oracle).epsilon(1e-13));
  // erf-based value
  const double erf_val = 0.01 * 1.0 * 0.5 * std::sqrt(M_PI) * std::erf(2.0);
  CHECK(psi_integral_sq(gauss, 2.0) == doctest::Approx(erf_val).epsilon(1e-14));

  // power family via adaptive quadrature path
  const auto pw = PlaneWaveProfile::power(0.25, 2.05);
  const double oracle_pw = simpson(
      [&](double t) {
        const double d = psi_derivative(pw, 1, t);
        return d * d;
      },
      0.0, -5.0, 1e-16);
  CHECK(psi_integral_sq(pw, -5.0) == doctest::Approx(oracle_pw).epsilon(1e-11));

  // property: d/du H2 = (psi')^2
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const double u = 6.0 * (double(rng() >> 11) * 0x1.0p-53 - 0.5);
    for (const auto& prof : {gauss, pw}) {
      const double fd = richardson_derivative(
          [&](double t) { return psi_integral_sq(prof, t); }, u, 1e-3);
      const double d1 = psi_derivative(prof, 1, u);
      CHECK(fd == doctest::Approx(d1 * d1).epsilon(1e-7));
    }
  }
}

TEST_CASE("H2 is nondecreasing") {
  for (const auto& prof :
       {PlaneWaveProfile::gaussian(0.2, 2.0), PlaneWaveProfile::power(0.3, 2.05)}) {
    double prev = psi_integral_sq(prof, -6.0);
    for (double u = -5.5; u <= 6.0; u += 0.5) {
      const double v = psi_integral_sq(prof, u);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
    CHECK(psi_integral_sq(prof, 0.0) == 0.0);
  }
}

TEST_CASE("decay assumption constants") {
  WeightParams wp;
  wp.gamma = 0.5;
  wp.epsilon = 0.1;
  std::vector<double> grid;
  for (double u = -120.0; u <= 120.0; u += 0.125) grid.push_back(u);

  const auto zero = check_decay_assumption(PlaneWaveProfile::zero(), wp, 3, grid);
  for (const auto& [i, c] : zero) CHECK(c == 0.0);

  // p = (3 + 2 gamma + eps)/2 makes the weighted |psi'| exactly constant = A
  const double p_crit = 0.5 * (3.0 + 2.0 * wp.gamma + wp.epsilon);
  const auto crit =
      check_decay_assumption(PlaneWaveProfile::power(0.3, p_crit), wp, 0, grid);
  CHECK(crit.at(0) == doctest::Approx(0.3).epsilon(1e-12));

  // too-slow decay: C0 grows with grid extent
  double prev = 0.0;
  for (double extent : {100.0, 1000.0, 10000.0}) {
    std::vector<double> g2;
    for (double u = -extent; u <= extent; u += extent / 400.0) g2.push_back(u);
    const auto res = check_decay_assumption(PlaneWaveProfile::power(0.3, 1.0), wp, 0, g2);
    CHECK(res.at(0) > prev);
    prev = res.at(0);
  }

  // the span precondition is enforced
  CHECK_THROWS_AS(
      check_decay_assumption(PlaneWaveProfile::gaussian(0.2, 2.0), wp, 0, {-10.0, 10.0}),
      std::invalid_argument);

  // compliant gaussian: finite constants for all orders
  const auto g = check_decay_assumption(PlaneWaveProfile::gaussian(0.2, 2.0), wp, 4, grid);
  for (const auto& [i, c] : g) CHECK(std::isfinite(c));
}
