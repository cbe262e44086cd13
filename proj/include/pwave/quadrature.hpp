#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include "pwave/errors.hpp"

namespace pwave {

// Adaptive Gauss-Kronrod (G7,K15) integration of a smooth integrand.
// Bisects until the K15-G7 error estimate meets the absolute tolerance.
double integrate_gk15(const std::function<double(double)>& f, double a, double b,
                      double abs_tol = 1e-12, int max_depth = 48);

// Composite closed-rule integration of node samples on a uniform grid,
// Simpson where the interval count allows, 3/8 rule for the odd tail.
// Falls back to trapezoid for fewer than 3 intervals.
double integrate_uniform(const double* y, std::size_t n, double dx);

}  // namespace pwave
