#pragma once

#include <cmath>

namespace pwave {

// Forward-mode jet of order 2 in the two null directions (d_u, d_ub).
// Arithmetic propagates exact first and second derivatives, so any pointwise
// algebraic expression of seeded quantities carries its own chain rule.
// Seeds whose curvature slots are unknown may leave them zero; first-order
// slots of results stay exact in that case.
struct Jet2 {
  double v = 0.0;
  double du = 0.0, db = 0.0;
  double duu = 0.0, dub = 0.0, dbb = 0.0;

  constexpr Jet2() = default;
  constexpr Jet2(double value) : v(value) {}
  constexpr Jet2(double value, double d_u, double d_b, double d_uu = 0.0, double d_ub = 0.0,
                 double d_bb = 0.0)
      : v(value), du(d_u), db(d_b), duu(d_uu), dub(d_ub), dbb(d_bb) {}
};

constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.du + b.du, a.db + b.db, a.duu + b.duu, a.dub + b.dub, a.dbb + b.dbb};
}
constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.du - b.du, a.db - b.db, a.duu - b.duu, a.dub - b.dub, a.dbb - b.dbb};
}
constexpr Jet2 operator-(const Jet2& a) { return {-a.v, -a.du, -a.db, -a.duu, -a.dub, -a.dbb}; }
constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.du * b.v + a.v * b.du,
          a.db * b.v + a.v * b.db,
          a.duu * b.v + 2.0 * a.du * b.du + a.v * b.duu,
          a.dub * b.v + a.du * b.db + a.db * b.du + a.v * b.dub,
          a.dbb * b.v + 2.0 * a.db * b.db + a.v * b.dbb};
}
constexpr Jet2 operator/(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.v = a.v / b.v;
  r.du = (a.du - r.v * b.du) / b.v;
  r.db = (a.db - r.v * b.db) / b.v;
  r.duu = (a.duu - 2.0 * r.du * b.du - r.v * b.duu) / b.v;
  r.dub = (a.dub - r.du * b.db - r.db * b.du - r.v * b.dub) / b.v;
  r.dbb = (a.dbb - 2.0 * r.db * b.db - r.v * b.dbb) / b.v;
  return r;
}
inline Jet2 sqrt(const Jet2& a) {
  Jet2 r;
  r.v = std::sqrt(a.v);
  const double inv = 0.5 / r.v;
  r.du = a.du * inv;
  r.db = a.db * inv;
  r.duu = (0.5 * a.duu - r.du * r.du) / r.v;
  r.dub = (0.5 * a.dub - r.du * r.db) / r.v;
  r.dbb = (0.5 * a.dbb - r.db * r.db) / r.v;
  return r;
}

}  // namespace pwave
