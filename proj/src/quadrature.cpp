#include "pwave/quadrature.hpp"

#include <array>
#include <cmath>

namespace pwave {
namespace {

// K15 abscissae (positive half) and weights; G7 weights on the shared nodes.
constexpr std::array<double, 8> kXgk = {
    0.000000000000000000000000000000000e+00, 2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01, 5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01, 8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01, 9.914553711208126392068546975263285e-01};
constexpr std::array<double, 8> kWk = {
    2.094821410847278280129991748917143e-01, 2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01, 1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01, 1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02, 2.293532201052922496373200805896959e-02};
constexpr std::array<double, 4> kWg = {
    4.179591836734693877551020408163265e-01, 3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01, 1.294849661688696932706114326790820e-01};

struct GkResult {
  double integral;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_k = kWk[0] * fc;
  double res_g = kWg[0] * fc;
  for (int i = 1; i < 8; ++i) {
    const double fp = f(c + h * kXgk[i]);
    const double fm = f(c - h * kXgk[i]);
    res_k += kWk[i] * (fp + fm);
    if (i % 2 == 0) res_g += kWg[i / 2] * (fp + fm);
  }
  const double integral = res_k * h;
  const double err = std::abs((res_k - res_g) * h);
  return {integral, err};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol,
             int depth, int max_depth) {
  const GkResult r = gk15(f, a, b);
  if (r.error <= tol) return r.integral;
  if (depth >= max_depth || b - a < 1e-14 * (1.0 + std::abs(a))) {
    throw QuadratureError("adaptive quadrature did not reach tolerance within budget");
  }
  const double c = 0.5 * (a + b);
  return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth) +
         adapt(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_gk15(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  return sign * adapt(f, a, b, abs_tol, 0, max_depth);
}

double integrate_uniform(const double* y, std::size_t n, double dx) {
  if (n < 2) return 0.0;
  const std::size_t m = n - 1;  // interval count
  if (m == 1) return 0.5 * dx * (y[0] + y[1]);
  if (m == 2) return dx / 3.0 * (y[0] + 4.0 * y[1] + y[2]);
  std::size_t head = m;
  double tail_sum = 0.0;
  if (m % 2 != 0) {
    // 3/8 rule on the last three intervals, Simpson on the even remainder
    head = m - 3;
    const double* t = y + head;
    tail_sum = 3.0 * dx / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
  }
  double s = 0.0;
  if (head >= 2) {
    s = y[0] + y[head];
    for (std::size_t i = 1; i < head; i += 2) s += 4.0 * y[i];
    for (std::size_t i = 2; i < head; i += 2) s += 2.0 * y[i];
    s *= dx / 3.0;
  } else if (head == 1) {
    s = 0.5 * dx * (y[0] + y[1]);
  }
  return s + tail_sum;
}

}  // namespace pwave
