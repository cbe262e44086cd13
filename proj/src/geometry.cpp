#include "pwave/geometry.hpp"

#include <cmath>
#include <string>

namespace pwave {
namespace {

// Metric assembly shared between double and Jet2 evaluation.
template <class T>
struct Metric {
  T gring, g, sg, guu, guub, gubub;
};

template <class T>
Metric<T> assemble_metric(const T& psi1, const T& p, const T& q) {
  using std::sqrt;
  Metric<T> m;
  const T one(1.0);
  const T pq = psi1 * q;
  m.gring = (one - pq) * (one - pq);
  m.g = one - T(2.0) * p * q - T(2.0) * pq + pq * pq;
  m.sg = sqrt(m.g);
  m.guu = -(q * q) / m.g;
  m.guub = -(one - pq - p * q) / m.g;
  m.gubub = -(T(2.0) * psi1 + p) * p / m.g;
  return m;
}

template <class T>
struct Tmix {
  T Tuu, Tuub, Tubu, Tubub, acal;
};

template <class T>
Tmix<T> assemble_T(const Metric<T>& m, const T& a, const T& b) {
  Tmix<T> t;
  const T grad_u = m.guu * a + m.guub * b;    // (D psi)^u
  const T grad_ub = m.guub * a + m.gubub * b;  // (D psi)^ub
  const T s = m.guu * a * a + T(2.0) * m.guub * a * b + m.gubub * b * b;
  t.Tuu = grad_u * a - T(0.5) * s;
  t.Tuub = grad_u * b;
  t.Tubu = grad_ub * a;
  t.Tubub = grad_ub * b - T(0.5) * s;
  t.acal = T(0.5) * (m.guu * a * a - m.gubub * b * b);
  return t;
}

void check_metric(double g, double g_floor) {
  if (!(g > g_floor)) {
    throw DegenerateMetricError("induced metric determinant g = " + std::to_string(g) +
                                " at or below floor " + std::to_string(g_floor) +
                                "; timelike condition lost");
  }
}

}  // namespace

NullCoords to_null(double t, double x, const PlaneWaveProfile& profile) {
  const double u = t - x;
  return {u, 0.5 * (t + x) - 0.5 * psi_integral_sq(profile, u)};
}

std::pair<double, double> from_null(const NullCoords& nc, const PlaneWaveProfile& profile) {
  const double s = nc.ub + 0.5 * psi_integral_sq(profile, nc.u);  // (t+x)/2
  return {s + 0.5 * nc.u, s - 0.5 * nc.u};
}

FrameCoeffs frame_coeffs(double psi1) {
  const double s2 = psi1 * psi1;
  FrameCoeffs f;
  f.du_dt = 0.5 * (s2 + 1.0);
  f.du_dx = 0.5 * (s2 - 1.0);
  f.dub_dt = 1.0;
  f.dub_dx = 1.0;
  f.du_t = 1.0;
  f.du_x = -1.0;
  f.dub_t = 0.5 * (1.0 - s2);
  f.dub_x = 0.5 * (1.0 + s2);
  // d_t = (1-s2)/2 d_ub + d_u ; d_x = (1+s2)/2 d_ub - d_u
  f.dt_du = 1.0;
  f.dt_dub = 0.5 * (1.0 - s2);
  f.dx_du = -1.0;
  f.dx_dub = 0.5 * (1.0 + s2);
  return f;
}

double MetricScalars::gring_abs_gubub() const { return gring * std::abs(gubub); }
double MetricScalars::minus_gring_guu() const { return rU * rU / g; }

MetricScalars metric_scalars(const FirstJet& jet, double g_floor) {
  const auto m = assemble_metric<double>(jet.psi1, jet.p, jet.q);
  check_metric(m.g, g_floor);
  MetricScalars out;
  out.gring = m.gring;
  out.g = m.g;
  out.guu = m.guu;
  out.guub = m.guub;
  out.gubub = m.gubub;
  out.rU = -jet.q + jet.psi1 * jet.q * jet.q;
  out.rUb = -jet.p - jet.psi1 * jet.p * jet.q;
  out.psi1 = jet.psi1;
  return out;
}

EnergyMomentum energy_momentum(const MetricScalars& ms, double a, double b) {
  Metric<double> m{ms.gring, ms.g, std::sqrt(ms.g), ms.guu, ms.guub, ms.gubub};
  const auto t = assemble_T<double>(m, a, b);
  return {t.Tuu, t.Tuub, t.Tubu, t.Tubub, t.acal};
}

MultiplierVec multipliers(const MetricScalars& ms, double lam_u, double lamb_ub) {
  MultiplierVec v;
  v.tL_u = -lamb_ub * ms.guu;
  v.tL_ub = -lamb_ub * ms.guub;
  v.tLb_u = -lam_u * ms.guub;
  v.tLb_ub = -lam_u * ms.gubub;
  return v;
}

double energy_density(const MetricScalars& ms, double a, double b, Pairing pairing,
                      double lam_u, double lamb_ub) {
  const EnergyMomentum t = energy_momentum(ms, a, b);
  const MultiplierVec xi = multipliers(ms, lam_u, lamb_ub);
  const auto minus_Pu = [&](double xu, double xub) { return -(t.Tuu * xu + t.Tuub * xub); };
  const auto minus_Pub = [&](double xu, double xub) { return -(t.Tubu * xu + t.Tubub * xub); };
  const double ct = 0.5 * (1.0 + ms.psi1 * ms.psi1);  // Dt = ct*Du + Dub
  switch (pairing) {
    case Pairing::kDuTL:
      return minus_Pu(xi.tL_u, xi.tL_ub);
    case Pairing::kDubTLb:
      return minus_Pub(xi.tLb_u, xi.tLb_ub);
    case Pairing::kDtTL:
      return ct * minus_Pu(xi.tL_u, xi.tL_ub) + minus_Pub(xi.tL_u, xi.tL_ub);
    case Pairing::kDtTLb:
      return ct * minus_Pu(xi.tLb_u, xi.tLb_ub) + minus_Pub(xi.tLb_u, xi.tLb_ub);
  }
  return 0.0;
}

namespace detail {
MetricJets metric_jets(const Jet2& psi1, const Jet2& p, const Jet2& q) {
  const auto m = assemble_metric<Jet2>(psi1, p, q);
  return {m.gring, m.g, m.sg, m.guu, m.guub, m.gubub};
}
}  // namespace detail

DeformationPair deformation_direct(const SecondJet& phi, double a, double b, Multiplier xi,
                                   const WeightJet& w, double g_floor) {
  const Jet2 P = detail::seed_psi1(phi);
  const Jet2 p = detail::seed_p(phi);
  const Jet2 q = detail::seed_q(phi);
  const auto m = assemble_metric<Jet2>(P, p, q);
  check_metric(m.g.v, g_floor);
  const Jet2 lam(w.lam, w.lam1, 0.0);
  const Jet2 lab(w.lab, 0.0, w.lab1);

  Jet2 xu, xub;  // multiplier components as jets
  if (xi == Multiplier::kTL) {
    xu = -lab * m.guu;
    xub = -lab * m.guub;
  } else {
    xu = -lam * m.guub;
    xub = -lam * m.gubub;
  }

  const auto t = assemble_T<double>(
      Metric<double>{m.gring.v, m.g.v, m.sg.v, m.guu.v, m.guub.v, m.gubub.v}, a, b);
  DeformationPair out;
  out.t_dxi = t.Tuu * xu.du + t.Tubu * xu.db + t.Tuub * xub.du + t.Tubub * xub.db;

  // xi(sqrt g g^{gamma rho}) d_gamma psi d_rho psi, contracted by chain rule
  const Jet2 c_uu = m.sg * m.guu;
  const Jet2 c_uub = m.sg * m.guub;
  const Jet2 c_ubub = m.sg * m.gubub;
  const double xi_uu = xu.v * c_uu.du + xub.v * c_uu.db;
  const double xi_uub = xu.v * c_uub.du + xub.v * c_uub.db;
  const double xi_ubub = xu.v * c_ubub.du + xub.v * c_ubub.db;
  out.xi_metric = 0.5 / m.sg.v * (xi_uu * a * a + 2.0 * xi_uub * a * b + xi_ubub * b * b);
  return out;
}

namespace {

// Hand-written directional derivatives of the metric building blocks.
struct Dir {  // derivatives along d_u and d_ub of a scalar
  double u, ub;
};

struct Blocks {
  double P, P2, p, q, puu, pub, qq;
  double gr, g;
  Dir d_Pq, d_Pp, d_pq, d_g, d_gr, d_igg;  // igg = 1/(gr g)
  Dir d_rU, d_rUb;
  double rU, rUb;
  Dir dX_uu, dX_ubu, dX_ubub;  // rU^2, rUb*rU, rUb^2
};

Blocks make_blocks(const SecondJet& j) {
  Blocks z;
  z.P = j.psi1;
  z.P2 = j.psi2;
  z.p = j.p;
  z.q = j.q;
  z.puu = j.puu;
  z.pub = j.pub;
  z.qq = j.qubub;
  z.gr = (1.0 - z.P * z.q) * (1.0 - z.P * z.q);
  z.g = 1.0 - 2.0 * z.p * z.q - 2.0 * z.P * z.q + z.P * z.q * z.P * z.q;
  z.d_Pq = {z.P2 * z.q + z.P * z.pub, z.P * z.qq};
  z.d_Pp = {z.P2 * z.p + z.P * z.puu, z.P * z.pub};
  z.d_pq = {z.puu * z.q + z.p * z.pub, z.pub * z.q + z.p * z.qq};
  const double pq = z.P * z.q;
  z.d_g = {-2.0 * z.d_pq.u - 2.0 * z.d_Pq.u + 2.0 * pq * z.d_Pq.u,
           -2.0 * z.d_pq.ub - 2.0 * z.d_Pq.ub + 2.0 * pq * z.d_Pq.ub};
  z.d_gr = {-2.0 * (1.0 - pq) * z.d_Pq.u, -2.0 * (1.0 - pq) * z.d_Pq.ub};
  const double igg2 = 1.0 / (z.gr * z.g * z.gr * z.g);
  z.d_igg = {-(z.d_gr.u * z.g + z.gr * z.d_g.u) * igg2,
             -(z.d_gr.ub * z.g + z.gr * z.d_g.ub) * igg2};
  z.rU = -z.q + z.P * z.q * z.q;
  z.rUb = -z.p - z.P * z.p * z.q;
  z.d_rU = {-z.pub + z.d_Pq.u * z.q + pq * z.pub, -z.qq + z.d_Pq.ub * z.q + pq * z.qq};
  z.d_rUb = {-z.puu - (z.d_Pq.u * z.p + pq * z.puu), -z.pub - (z.d_Pq.ub * z.p + pq * z.pub)};
  z.dX_uu = {2.0 * z.rU * z.d_rU.u, 2.0 * z.rU * z.d_rU.ub};
  z.dX_ubu = {z.d_rUb.u * z.rU + z.rUb * z.d_rU.u, z.d_rUb.ub * z.rU + z.rUb * z.d_rU.ub};
  z.dX_ubub = {2.0 * z.rUb * z.d_rUb.u, 2.0 * z.rUb * z.d_rUb.ub};
  return z;
}

}  // namespace

DeformationPair deformation_closed(const SecondJet& phi, double a, double b, Multiplier xi,
                                   const WeightJet& w, double g_floor) {
  const Blocks z = make_blocks(phi);
  check_metric(z.g, g_floor);
  const MetricScalars ms = metric_scalars(phi.first(), g_floor);
  const double guu = ms.guu, guub = ms.guub, gubub = ms.gubub;
  const double grad_u = guu * a + guub * b;    // g^{u mu} dmu psi
  const double grad_ub = guub * a + gubub * b;  // g^{ub mu} dmu psi
  const double acal = 0.5 * (guu * a * a - gubub * b * b);
  const double igg = 1.0 / (z.gr * z.g);
  const double X_uu = z.rU * z.rU;
  const double X_ubu = z.rUb * z.rU;
  const double X_ubub = z.rUb * z.rUb;

  DeformationPair out;
  if (xi == Multiplier::kTL) {
    out.t_dxi =
        -0.5 * w.lab1 * guub * (guu * a * a + gubub * b * b) - w.lab1 * gubub * b * guu * a +
        igg * w.lab * (z.dX_uu.u - z.g * z.P * z.qq - z.dX_ubu.ub) * acal +
        w.lab / z.gr * (guu * a * b + guub * b * b) * z.d_Pq.u +
        igg * w.lab * (grad_u * b) * z.dX_ubu.u + igg * w.lab * (grad_ub * a) * z.dX_uu.ub +
        w.lab * (z.d_igg.u * X_uu - z.d_igg.ub * X_ubu) * acal +
        w.lab * (grad_u * b) * z.d_igg.u * X_ubu + w.lab * (grad_ub * a) * z.d_igg.ub * X_uu;
  } else {
    out.t_dxi =
        -0.5 * w.lam1 * guub * (guu * a * a + gubub * b * b) - w.lam1 * gubub * b * guu * a +
        w.lam / z.gr * (z.d_Pq.u - 2.0 * z.d_Pp.ub) * acal +
        4.0 * w.lam / (z.gr * z.gr) * z.P * z.P *
            (z.P * z.p * z.q * z.qq - z.p * z.qq) * acal +
        igg * w.lam * (z.dX_ubu.u - z.dX_ubub.ub) * acal +
        w.lam / z.gr * (guub * a * a + gubub * b * a) * z.P * z.qq +
        2.0 * w.lam / z.gr * (grad_u * b) * z.d_Pp.u -
        4.0 * w.lam / (z.gr * z.gr) * (grad_u * b) * z.d_Pq.u * z.P * z.P * z.p * z.q +
        4.0 * w.lam / (z.gr * z.gr) * (grad_u * b) * z.d_Pq.u * z.P * z.p +
        igg * w.lam * (grad_u * b) * z.dX_ubub.u + igg * w.lam * (grad_ub * a) * z.dX_ubu.ub +
        w.lam * (z.d_igg.u * X_ubu - z.d_igg.ub * X_ubub) * acal +
        w.lam * (grad_u * b) * z.d_igg.u * X_ubub +
        w.lam * (grad_ub * a) * z.d_igg.ub * X_ubu;
  }

  // second scalar: (1/(2 sqrt g)) xi(sqrt g g^{gamma rho}) d psi d psi
  const double pq = z.P * z.q;
  const double dq_u = z.pub, dq_ub = z.qq;
  const double dp_u = z.puu, dp_ub = z.pub;
  const auto gen_dir = [&](int dir) {
    const double dPq = dir == 0 ? z.d_Pq.u : z.d_Pq.ub;
    const double dPp = dir == 0 ? z.d_Pp.u : z.d_Pp.ub;
    const double dpq = dir == 0 ? z.d_pq.u : z.d_pq.ub;
    const double dg = dir == 0 ? z.d_g.u : z.d_g.ub;
    const double dgr = dir == 0 ? z.d_gr.u : z.d_gr.ub;
    const double dq = dir == 0 ? dq_u : dq_ub;
    const double dp = dir == 0 ? dp_u : dp_ub;
    const double t1 = (2.0 * dPq * a * b - 2.0 * dPp * b * b) / z.gr;
    const double t2 =
        -dgr * (2.0 * (-1.0 + pq) * a * b - 2.0 * z.P * z.p * b * b) / (z.gr * z.gr);
    const double t3 = -dg * z.P * z.p * b * b * igg;
    const double d_q2gr = 2.0 * z.q * dq * z.gr + z.q * z.q * dgr;
    const double opq = 1.0 + pq;
    const double d_p2opq2 = 2.0 * z.p * dp * opq * opq + z.p * z.p * 2.0 * opq * dPq;
    const double t4 = -d_q2gr * a * a * igg;
    const double t5 = -d_p2opq2 * b * b * igg;
    const double mixed =
        2.0 * a * b * igg * (dPq * (z.gr + 2.0 * z.p * z.q * pq) - pq * (1.0 - pq) * dpq);
    const double quad = (z.rU * a + z.rUb * b) * (z.rU * a + z.rUb * b) / (z.gr * z.gr);
    const double t8 = z.gr / (2.0 * z.g * z.g) * dg * quad;
    const double t9 = dgr * quad / z.g;
    return t1 + t2 + t3 + t4 + t5 + mixed + t8 + t9;
  };
  double xu, xub;
  if (xi == Multiplier::kTL) {
    xu = -w.lab * guu;
    xub = -w.lab * guub;
  } else {
    xu = -w.lam * guub;
    xub = -w.lam * gubub;
  }
  out.xi_metric = 0.5 * (xu * gen_dir(0) + xub * gen_dir(1));
  return out;
}

double current_divergence(const SecondJet& phi, Multiplier xi, const WeightJet& w) {
  const Jet2 P = detail::seed_psi1(phi);
  const Jet2 p = detail::seed_p(phi);
  const Jet2 q = detail::seed_q(phi);
  const auto m = assemble_metric<Jet2>(P, p, q);
  check_metric(m.g.v, kDefaultGFloor);
  const Jet2 lam(w.lam, w.lam1, 0.0);
  const Jet2 lab(w.lab, 0.0, w.lab1);
  Jet2 xu, xub;
  if (xi == Multiplier::kTL) {
    xu = -lab * m.guu;
    xub = -lab * m.guub;
  } else {
    xu = -lam * m.guub;
    xub = -lam * m.gubub;
  }
  const auto t = assemble_T<Jet2>(m, p, q);  // psi = phi itself
  const Jet2 Pu = (t.Tuu * xu + t.Tuub * xub) * m.sg;
  const Jet2 Pub = (t.Tubu * xu + t.Tubub * xub) * m.sg;
  return (Pu.du + Pub.db) / m.sg.v;
}

}  // namespace pwave
