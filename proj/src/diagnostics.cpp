#include "pwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwave/quadrature.hpp"

namespace pwave {
namespace {

struct KPair {
  double L;     // d_ub phi_K
  double Lbar;  // d_u  phi_K
};

// (L phi_K, Lbar phi_K) for all |K| = k at node i.
void kpairs(const JetField& j, int k, int i, KPair out[2], int* count) {
  if (k == 0) {
    out[0] = {j.q[i], j.p[i]};
    *count = 1;
  } else if (k == 1) {
    out[0] = {j.pub[i], j.puu[i]};    // K = (1,0)
    out[1] = {j.qubub[i], j.pub[i]};  // K = (0,1)
    *count = 2;
  } else {
    throw OrderNotImplementedError("energies implemented for k in {0,1}");
  }
}

double sqrt_g(const JetField& j, int i) {
  const MetricScalars ms = metric_scalars({j.psi1[i], j.p[i], j.q[i]});
  return std::sqrt(ms.g);
}

// E-family integrand at node i (without the x-measure).
double slice_integrand(const JetField& j, const WeightParams& params, int k, int i,
                       EnergyFamily family) {
  KPair kp[2];
  int m = 0;
  kpairs(j, k, i, kp, &m);
  const double psi1 = j.psi1[i], p = j.p[i], q = j.q[i];
  const double sg = sqrt_g(j, i);
  double total = 0.0;
  if (family == EnergyFamily::kE) {
    const double w = lambda_weight(j.ub[i], params);
    const double c = 1.0 + (psi1 + p) * (psi1 + p);
    for (int s = 0; s < m; ++s) {
      total += w * (c * kp[s].L * kp[s].L + q * q * kp[s].Lbar * kp[s].Lbar) * sg;
    }
  } else {
    const double w = lambda_weight(j.u[i], params);
    const MetricScalars ms = metric_scalars({psi1, p, q});
    const double c = (1.0 + psi1 * psi1) * p * p + ms.gubub * ms.gubub;
    for (int s = 0; s < m; ++s) {
      total += w * (kp[s].Lbar * kp[s].Lbar + c * kp[s].L * kp[s].L) * sg;
    }
  }
  return total;
}

struct CutRange {
  int i_lo, i_hi;        // whole nodes inside the region
  double frac_lo = 0.0;  // partial-cell fraction before i_lo (toward i_lo-1)
  double frac_hi = 0.0;  // partial-cell fraction after i_hi (toward i_hi+1)
};

// Region to node range on the slice; cuts snapped with partial end cells.
// Cuts beyond one end give the full valid range, beyond the other an empty
// range (i_hi < i_lo), so ladder sweeps are defined for every cut value.
CutRange region_range(const JetField& j, const RegionSpec& region) {
  const int lo = j.first_valid(), hi = j.last_valid();
  CutRange r{lo, hi, 0.0, 0.0};
  if (region.kind == RegionKind::kFullSlice) return r;
  if (region.kind == RegionKind::kSigmaPlus) {
    // u(t,x) <= u0  <=>  x >= t - u0
    const double x_cut = j.grid.t - region.cut;
    if (x_cut <= j.grid.x(lo)) return r;
    if (x_cut >= j.grid.x(hi)) {
      r.i_lo = hi + 1;
      return r;
    }
    const double s = (x_cut - j.grid.x0) / j.grid.dx;
    r.i_lo = static_cast<int>(std::ceil(s - 1e-12));
    r.frac_lo = r.i_lo - s;
    if (r.i_lo < lo) {
      r.i_lo = lo;
      r.frac_lo = 0.0;
    }
    return r;
  }
  if (region.kind == RegionKind::kSigmaMinus) {
    // ub(t,x) <= ub0; ub is strictly increasing in x
    if (region.cut <= j.ub[lo]) {
      r.i_hi = lo - 1;
      return r;
    }
    if (region.cut >= j.ub[hi]) return r;
    int a = lo, b = hi;
    while (b - a > 1) {
      const int mid = (a + b) / 2;
      (j.ub[mid] <= region.cut ? a : b) = mid;
    }
    r.i_hi = a;
    r.frac_hi = (region.cut - j.ub[a]) / (j.ub[a + 1] - j.ub[a]);
    return r;
  }
  throw RegionError("slice energy requires a slice region");
}

double integrate_region(const JetField& j, const CutRange& r,
                        const std::function<double(int)>& f) {
  if (r.i_hi < r.i_lo) return 0.0;
  std::vector<double> vals(r.i_hi - r.i_lo + 1);
  for (int i = r.i_lo; i <= r.i_hi; ++i) vals[i - r.i_lo] = f(i);
  double total = integrate_uniform(vals.data(), vals.size(), j.grid.dx);
  // partial end cells, linear in the integrand
  if (r.frac_lo > 0.0 && r.i_lo - 1 >= j.first_valid()) {
    const double f_in = vals.front();
    const double f_out = f(r.i_lo - 1);
    const double f_cut = f_in + (f_out - f_in) * r.frac_lo;
    total += 0.5 * (f_cut + f_in) * r.frac_lo * j.grid.dx;
  }
  if (r.frac_hi > 0.0 && r.i_hi + 1 <= j.last_valid()) {
    const double f_in = vals.back();
    const double f_out = f(r.i_hi + 1);
    const double f_cut = f_in + (f_out - f_in) * r.frac_hi;
    total += 0.5 * (f_in + f_cut) * r.frac_hi * j.grid.dx;
  }
  return total;
}

// 4-point Lagrange interpolation of a node array at fractional index s.
double cubic_at(const std::vector<double>& y, double s, int n) {
  int i1 = static_cast<int>(std::floor(s));
  i1 = std::clamp(i1, 1, n - 3);
  const double r = s - i1;
  const double ym = y[i1 - 1], y0 = y[i1], y1 = y[i1 + 1], y2 = y[i1 + 2];
  const double c_m = -r * (r - 1.0) * (r - 2.0) / 6.0;
  const double c_0 = (r * r - 1.0) * (r - 2.0) / 2.0;
  const double c_1 = -r * (r + 1.0) * (r - 2.0) / 2.0;
  const double c_2 = r * (r * r - 1.0) / 6.0;
  return c_m * ym + c_0 * y0 + c_1 * y1 + c_2 * y2;
}

struct CurveSample {
  SecondJet jet;
  double u, ub;
  bool ok = false;
};

CurveSample sample_on_slice(const JetField& j, double x) {
  CurveSample cs;
  const double s = (x - j.grid.x0) / j.grid.dx;
  const int lo = j.first_valid() + 1, hi = j.last_valid() - 2;
  if (s < lo || s > hi) return cs;
  const int n = j.grid.n;
  cs.jet.psi1 = cubic_at(j.psi1, s, n);
  cs.jet.psi2 = cubic_at(j.psi2, s, n);
  cs.jet.p = cubic_at(j.p, s, n);
  cs.jet.q = cubic_at(j.q, s, n);
  if (j.order >= 2) {
    cs.jet.puu = cubic_at(j.puu, s, n);
    cs.jet.pub = cubic_at(j.pub, s, n);
    cs.jet.qubub = cubic_at(j.qubub, s, n);
  }
  cs.u = cubic_at(j.u, s, n);
  cs.ub = cubic_at(j.ub, s, n);
  cs.ok = true;
  return cs;
}

// x on the incoming curve ub(t, x) = ub0 at slice time t (ub increasing in x).
double incoming_x(const JetField& j, double ub0) {
  const int lo = j.first_valid(), hi = j.last_valid();
  if (ub0 < j.ub[lo] || ub0 > j.ub[hi]) throw RegionError("segment outside history");
  int a = lo, b = hi;
  while (b - a > 1) {
    const int mid = (a + b) / 2;
    (j.ub[mid] <= ub0 ? a : b) = mid;
  }
  const double r = (ub0 - j.ub[a]) / (j.ub[a + 1] - j.ub[a]);
  return j.grid.x(a) + r * j.grid.dx;
}

}  // namespace

double slice_energy(const JetField& jets, const WeightParams& params,
                    const RegionSpec& region, int k, EnergyFamily family) {
  if (k == 1 && jets.order < 2) {
    throw OrderNotImplementedError("k = 1 energies need order-2 jets");
  }
  const CutRange r = region_range(jets, region);
  return integrate_region(jets, r,
                          [&](int i) { return slice_integrand(jets, params, k, i, family); });
}

double flux_energy(const History& h, const WeightParams& params, const RegionSpec& segment,
                   int k) {
  if (segment.kind != RegionKind::kNullOut && segment.kind != RegionKind::kNullIn) {
    throw RegionError("flux_energy requires a null segment");
  }
  double prev_t = 0.0, prev_f = 0.0;
  bool have_prev = false;
  double total = 0.0;
  for (const auto& snap : h.snaps) {
    const double t = snap.grid.t;
    if (t > segment.tau + 1e-9) break;
    const JetField j = extract_jets(snap, h.profile, k == 0 ? 1 : 2, h.cfg.fd_order);
    double x;
    if (segment.kind == RegionKind::kNullOut) {
      x = t - segment.cut;
    } else {
      x = incoming_x(j, segment.cut);
    }
    const CurveSample cs = sample_on_slice(j, x);
    if (!cs.ok) throw RegionError("segment outside history window");
    double f = 0.0;
    const double psi1 = cs.jet.psi1, p = cs.jet.p, q = cs.jet.q;
    const MetricScalars ms = metric_scalars({psi1, p, q});
    const double sg = std::sqrt(ms.g);
    KPair pairs[2];
    int m = 0;
    if (k == 0) {
      pairs[0] = {q, p};
      m = 1;
    } else {
      pairs[0] = {cs.jet.pub, cs.jet.puu};
      pairs[1] = {cs.jet.qubub, cs.jet.pub};
      m = 2;
    }
    if (segment.kind == RegionKind::kNullOut) {
      const double w = lambda_weight(cs.ub, params);
      for (int s = 0; s < m; ++s) {
        f += w * (pairs[s].L * pairs[s].L + std::pow(q, 4) * pairs[s].Lbar * pairs[s].Lbar) *
             sg;
      }
      // du_bar = dt along u = const
    } else {
      const double w = lambda_weight(cs.u, params);
      const double c = (2.0 * psi1 + p) * (2.0 * psi1 + p) * p * p;
      for (int s = 0; s < m; ++s) {
        f += w * (pairs[s].Lbar * pairs[s].Lbar + c * pairs[s].L * pairs[s].L) * sg;
      }
      f *= 2.0 / (1.0 + psi1 * psi1);  // du = 2 dt / (1 + psi'^2)
    }
    if (have_prev) total += 0.5 * (prev_f + f) * (t - prev_t);
    prev_t = t;
    prev_f = f;
    have_prev = true;
  }
  if (!have_prev || prev_t < segment.tau - 1e-9) {
    throw RegionError("segment extends beyond the computed history");
  }
  return total;
}

namespace {

// Third-order jets obtained from x-derivatives of the second-jet fields plus
// the u-commuted quasilinear equation.
struct Jets3 {
  std::vector<double> puuu, puub, pubb, qbbb;
  int halo = 0;
};

Jets3 extend_jets(const JetField& j, const PlaneWaveProfile& profile, int fd_order) {
  const int n = j.grid.n;
  Jets3 e;
  e.halo = j.halo + (fd_order == 2 ? 1 : 2);
  e.puuu.assign(n, 0.0);
  e.puub.assign(n, 0.0);
  e.pubb.assign(n, 0.0);
  e.qbbb.assign(n, 0.0);
  const double dx = j.grid.dx;
  const auto d1 = [&](const std::vector<double>& f, int i) {
    if (fd_order == 2) return (f[i + 1] - f[i - 1]) / (2.0 * dx);
    return (8.0 * (f[i + 1] - f[i - 1]) - (f[i + 2] - f[i - 2])) / (12.0 * dx);
  };
  for (int i = e.halo; i < n - e.halo; ++i) {
    const double psi3 = psi_derivative(profile, 3, j.u[i]);
    const SecondJet sj{j.psi1[i], j.psi2[i], j.p[i], j.q[i], j.puu[i], j.pub[i], j.qubub[i]};
    const Jet2 P = detail::seed_psi1(sj);
    const Jet2 P2(j.psi2[i], psi3, 0.0);
    const Jet2 p = detail::seed_p(sj);
    const Jet2 q = detail::seed_q(sj);
    const auto m = detail::metric_jets(P, p, q);
    const Jet2 pqj = P * q;
    const Jet2 r0 = P2 * q * q *
                    (Jet2(1.0) - Jet2(3.0) * pqj + pqj * pqj - pqj * pqj * pqj) /
                    (m.gring * m.g);
    // W_u = d_u R0 - d_u g^{mu nu} dd phi
    const double Wu = r0.du - (m.guu.du * j.puu[i] + 2.0 * m.guub.du * j.pub[i] +
                               m.gubub.du * j.qubub[i]);
    const double c = 0.5 * (j.psi1[i] * j.psi1[i] + 1.0);
    const double Dxpuu = d1(j.puu, i), Dxpub = d1(j.pub, i), Dxqq = d1(j.qubub, i);
    const double coeff = m.guu.v * c + 2.0 * m.guub.v + m.gubub.v / c;
    const double rhsv = Wu + m.guu.v * Dxpuu - m.gubub.v * Dxpub / c;
    const double x2 = rhsv / coeff;
    const double x1 = c * x2 - Dxpuu;
    const double x3 = (x2 + Dxpub) / c;
    const double x4 = (x3 + Dxqq) / c;
    e.puuu[i] = x1;
    e.puub[i] = x2;
    e.pubb[i] = x3;
    e.qbbb[i] = x4;
  }
  return e;
}

// -P^f = T(-Df, xi) for f in {u, ub, t}; any multiplier.
struct Contraction {
  double minus_Pu, minus_Pub, minus_Pt;
};
Contraction contract(const MetricScalars& ms, double a, double b, Multiplier xi,
                     const WeightJet& w) {
  const EnergyMomentum T = energy_momentum(ms, a, b);
  const MultiplierVec mv = multipliers(ms, w.lam, w.lab);
  const double xu = (xi == Multiplier::kTL) ? mv.tL_u : mv.tLb_u;
  const double xub = (xi == Multiplier::kTL) ? mv.tL_ub : mv.tLb_ub;
  Contraction c;
  c.minus_Pu = -(T.Tuu * xu + T.Tuub * xub);
  c.minus_Pub = -(T.Tubu * xu + T.Tubub * xub);
  const double ct = 0.5 * (1.0 + ms.psi1 * ms.psi1);
  c.minus_Pt = ct * c.minus_Pu + c.minus_Pub;
  return c;
}

struct BulkCtx {
  JetField jets;
  Jets3 thirds;
  bool has_thirds = false;
};

// sqrt(g) * [ Box_g phi_K xi(phi_K) + T[phi_K] d xi - xi(sqrt g g)/2 sqrt g ]
double bulk_integrand(const BulkCtx& c, const WeightParams& params, Multiplier xi, int k,
                      int i) {
  const JetField& j = c.jets;
  const SecondJet phi{j.psi1[i], j.psi2[i], j.p[i], j.q[i], j.puu[i], j.pub[i], j.qubub[i]};
  const MetricScalars ms = metric_scalars(phi.first());
  WeightJet w;
  w.lam = lambda_weight(j.u[i], params);
  w.lam1 = lambda_weight_deriv(j.u[i], params);
  w.lab = lambda_weight(j.ub[i], params);
  w.lab1 = lambda_weight_deriv(j.ub[i], params);
  const MultiplierVec mv = multipliers(ms, w.lam, w.lab);
  const double xu = (xi == Multiplier::kTL) ? mv.tL_u : mv.tLb_u;
  const double xub = (xi == Multiplier::kTL) ? mv.tL_ub : mv.tLb_ub;
  const double sg = std::sqrt(ms.g);

  // divergence pieces of Box, shared by all K
  const Jet2 P = detail::seed_psi1(phi);
  const Jet2 p = detail::seed_p(phi);
  const Jet2 q = detail::seed_q(phi);
  const auto m = detail::metric_jets(P, p, q);
  const Jet2 cu_u = m.guu * m.sg, cub_u = m.guub * m.sg;
  const Jet2 cu_ub = m.guub * m.sg, cub_ub = m.gubub * m.sg;
  const double div_u = cu_u.du + cub_u.db;
  const double div_ub = cu_ub.du + cub_ub.db;

  struct KJet {
    double a, b, suu, sub, sbb;
  };
  KJet list[2];
  int mcount = 0;
  if (k == 0) {
    list[0] = {j.p[i], j.q[i], j.puu[i], j.pub[i], j.qubub[i]};
    mcount = 1;
  } else {
    const Jets3& t3 = c.thirds;
    list[0] = {j.puu[i], j.pub[i], t3.puuu[i], t3.puub[i], t3.pubb[i]};
    list[1] = {j.pub[i], j.qubub[i], t3.puub[i], t3.pubb[i], t3.qbbb[i]};
    mcount = 2;
  }
  double total = 0.0;
  for (int s = 0; s < mcount; ++s) {
    const KJet& kj = list[s];
    const double box =
        ms.guu * kj.suu + 2.0 * ms.guub * kj.sub + ms.gubub * kj.sbb +
        (kj.a * div_u + kj.b * div_ub) / sg;
    const double xiphi = xu * kj.a + xub * kj.b;
    const DeformationPair d = deformation_direct(phi, kj.a, kj.b, xi, w);
    total += sg * (box * xiphi + d.t_dxi - d.xi_metric);
  }
  return total;
}

}  // namespace

double energy_identity_residual(const History& h, const WeightParams& params, Multiplier xi,
                                RegionKind region, double cut, double tau0, double tau,
                                int k) {
  if (region != RegionKind::kSigmaMinus && region != RegionKind::kSigmaPlus) {
    throw RegionError("identity regions are sigma_minus / sigma_plus");
  }
  // collect snapshots in [tau0, tau]
  std::vector<const GridState*> snaps;
  for (const auto& s : h.snaps) {
    if (s.grid.t >= tau0 - 1e-9 && s.grid.t <= tau + 1e-9) snaps.push_back(&s);
  }
  if (snaps.size() < 2 || std::abs(snaps.front()->grid.t - tau0) > 1e-9 ||
      std::abs(snaps.back()->grid.t - tau) > 1e-9) {
    throw RegionError("insufficient history for identity endpoints");
  }

  const int order = 2;
  std::vector<BulkCtx> ctx(snaps.size());
  for (std::size_t si = 0; si < snaps.size(); ++si) {
    ctx[si].jets = extract_jets(*snaps[si], h.profile, order, h.cfg.fd_order);
    if (k >= 1) {
      ctx[si].thirds = extend_jets(ctx[si].jets, h.profile, h.cfg.fd_order);
      ctx[si].has_thirds = true;
    }
  }

  const auto slice_term = [&](const BulkCtx& c) {
    const JetField& j = c.jets;
    RegionSpec rs = (region == RegionKind::kSigmaMinus) ? RegionSpec::sigma_minus(cut)
                                                        : RegionSpec::sigma_plus(cut);
    CutRange r = region_range(j, rs);
    if (k >= 1) {
      const int h3 = c.thirds.halo;
      r.i_lo = std::max(r.i_lo, h3);
      r.i_hi = std::min(r.i_hi, j.grid.n - 1 - h3);
    }
    return integrate_region(j, r, [&](int i) {
      const SecondJet phi{j.psi1[i], j.psi2[i], j.p[i],
                          j.q[i],    j.puu[i],  j.pub[i], j.qubub[i]};
      const MetricScalars ms = metric_scalars(phi.first());
      WeightJet w;
      w.lam = lambda_weight(j.u[i], params);
      w.lab = lambda_weight(j.ub[i], params);
      const double sg = std::sqrt(ms.g);
      double val = 0.0;
      KPair kp[2];
      int m = 0;
      kpairs(j, k, i, kp, &m);
      for (int s = 0; s < m; ++s) {
        val += contract(ms, kp[s].Lbar, kp[s].L, xi, w).minus_Pt * sg;
      }
      return val;
    });
  };

  // null segment integral over [tau0, tau]
  double flux = 0.0;
  {
    double prev_t = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (std::size_t si = 0; si < snaps.size(); ++si) {
      const JetField& j = ctx[si].jets;
      const double t = snaps[si]->grid.t;
      double x;
      if (region == RegionKind::kSigmaPlus) {
        x = t - cut;
      } else {
        x = incoming_x(j, cut);
      }
      const CurveSample cs = sample_on_slice(j, x);
      if (!cs.ok) throw RegionError("identity segment outside window");
      const MetricScalars ms = metric_scalars(cs.jet.first());
      WeightJet w;
      w.lam = lambda_weight(cs.u, params);
      w.lab = lambda_weight(cs.ub, params);
      const double sg = std::sqrt(ms.g);
      KPair pairs[2];
      int m = 0;
      if (k == 0) {
        pairs[0] = {cs.jet.q, cs.jet.p};
        m = 1;
      } else {
        pairs[0] = {cs.jet.pub, cs.jet.puu};
        pairs[1] = {cs.jet.qubub, cs.jet.pub};
        m = 2;
      }
      double f = 0.0;
      for (int s = 0; s < m; ++s) {
        const Contraction cc = contract(ms, pairs[s].Lbar, pairs[s].L, xi, w);
        if (region == RegionKind::kSigmaPlus) {
          f += cc.minus_Pu * sg;  // du_bar = dt
        } else {
          f += cc.minus_Pub * sg * 2.0 / (1.0 + cs.jet.psi1 * cs.jet.psi1);  // du = 2dt/(1+s^2)
        }
      }
      if (have_prev) flux += 0.5 * (prev_f + f) * (t - prev_t);
      prev_t = t;
      prev_f = f;
      have_prev = true;
    }
  }

  // bulk integral of d_alpha(sqrt g P^alpha) over the region, du dub = dt dx
  double bulk = 0.0;
  {
    double prev_t = 0.0, prev_val = 0.0;
    bool have_prev = false;
    for (std::size_t si = 0; si < snaps.size(); ++si) {
      const BulkCtx& c = ctx[si];
      const double t = snaps[si]->grid.t;
      RegionSpec rs = (region == RegionKind::kSigmaMinus) ? RegionSpec::sigma_minus(cut)
                                                          : RegionSpec::sigma_plus(cut);
      CutRange r = region_range(c.jets, rs);
      if (k >= 1) {
        r.i_lo = std::max(r.i_lo, c.thirds.halo);
        r.i_hi = std::min(r.i_hi, c.jets.grid.n - 1 - c.thirds.halo);
      }
      const double val =
          integrate_region(c.jets, r, [&](int i) { return bulk_integrand(c, params, xi, k, i); });
      if (have_prev) bulk += 0.5 * (prev_val + val) * (t - prev_t);
      prev_t = t;
      prev_val = val;
      have_prev = true;
    }
  }

  const double lhs = slice_term(ctx.back()) + flux;
  const double rhs = slice_term(ctx.front()) - bulk;
  return lhs - rhs;
}

DecayProfile decay_profile(const History& h, const WeightParams& params, double delta,
                           int window_margin) {
  DecayProfile out;
  out.rows = {{0, 0, {}, {}, 0, 0}, {1, 0, {}, {}, 0, 0}, {0, 1, {}, {}, 0, 0}};
  const double scale = delta > 0.0 ? delta : 1.0;
  for (const auto& snap : h.snaps) {
    const JetField j = extract_jets(snap, h.profile, 2, h.cfg.fd_order);
    out.times.push_back(snap.grid.t);
    const int lo = j.first_valid() + window_margin;
    const int hi = j.last_valid() - window_margin;
    for (auto& row : out.rows) {
      double sb = 0.0, sl = 0.0;
      for (int i = lo; i <= hi; ++i) {
        double lbar, lcomp;
        if (row.i == 0 && row.j == 0) {
          lbar = j.p[i];
          lcomp = j.q[i];
        } else if (row.i == 1) {
          lbar = j.puu[i];
          lcomp = j.pub[i];
        } else {
          lbar = j.pub[i];
          lcomp = j.qubub[i];
        }
        sb = std::max(sb, std::sqrt(lambda_weight(j.u[i], params)) * std::abs(lbar));
        sl = std::max(sl, std::sqrt(lambda_weight(j.ub[i], params)) * std::abs(lcomp));
      }
      row.sup_Lbar.push_back(sb);
      row.sup_L_over_delta.push_back(sl / scale);
      row.max_Lbar = std::max(row.max_Lbar, sb);
      row.max_L = std::max(row.max_L, sl / scale);
    }
  }
  return out;
}

double sobolev_ratio(const std::vector<double>& values, double dx, int fd_order) {
  const int n = static_cast<int>(values.size());
  if (n < 5) return 0.0;
  double sup = 0.0;
  for (double v : values) sup = std::max(sup, std::abs(v));
  if (sup == 0.0) return 0.0;
  const int halo = fd_order == 2 ? 1 : 2;
  std::vector<double> f2(n, 0.0), d2(n, 0.0);
  for (int i = 0; i < n; ++i) f2[i] = values[i] * values[i];
  for (int i = halo; i < n - halo; ++i) {
    const double d =
        fd_order == 2
            ? (values[i + 1] - values[i - 1]) / (2.0 * dx)
            : (8.0 * (values[i + 1] - values[i - 1]) - (values[i + 2] - values[i - 2])) /
                  (12.0 * dx);
    d2[i] = d * d;
  }
  const double l2 = std::sqrt(integrate_uniform(f2.data(), f2.size(), dx));
  const double dl2 = std::sqrt(integrate_uniform(d2.data(), d2.size(), dx));
  return sup / (l2 + dl2);
}

PersistenceReport persistence_check(const History& h,
                                    const std::function<double(double)>& threshold_psi_of_u,
                                    int window_margin) {
  PersistenceReport rep;
  rep.min_margin = 1e300;
  const JetField j0 = extract_jets(h.snaps.front(), h.profile, 1, h.cfg.fd_order);
  const int n = j0.grid.n;
  const double t_end = h.snaps.back().grid.t;
  const int shift = static_cast<int>(std::ceil(t_end / j0.grid.dx)) + j0.halo + 3;
  const int lo = j0.first_valid() + window_margin;
  const int hi = std::min(j0.last_valid() - window_margin, n - 1 - shift);
  if (hi <= lo) throw RegionError("window too small for persistence curves");

  std::vector<double> base(n, 0.0);
  for (int i = lo; i <= hi; ++i) base[i] = j0.p[i] * j0.p[i];

  for (const auto& snap : h.snaps) {
    const JetField j = extract_jets(snap, h.profile, 1, h.cfg.fd_order);
    const double t = snap.grid.t;
    double worst = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double x = j0.grid.x(i) + t;  // u = -x0 constant along the curve
      const CurveSample cs = sample_on_slice(j, x);
      if (!cs.ok) continue;
      const double p2 = cs.jet.p * cs.jet.p;
      worst = std::max(worst, std::abs(p2 - base[i]));
      const double psi = threshold_psi_of_u(-j0.grid.x(i));
      rep.min_margin = std::min(rep.min_margin, p2 - psi * psi);
    }
    rep.times.push_back(t);
    rep.drift.push_back(worst);
    rep.max_drift = std::max(rep.max_drift, worst);
  }
  return rep;
}

ScalingTable scaling_study(const std::function<History(double)>& runner,
                           const std::vector<double>& deltas, const WeightParams& params,
                           int k_max, const std::vector<double>& flux_ladder) {
  ScalingTable table;
  for (double d : deltas) {
    const History h = runner(d);
    ScalingRow row;
    row.delta = d;
    for (int k = 0; k <= k_max; ++k) {
      double supE = 0.0, supEb = 0.0;
      for (const auto& snap : h.snaps) {
        const JetField j = extract_jets(snap, h.profile, k == 0 ? 1 : 2, h.cfg.fd_order);
        supE = std::max(supE,
                        slice_energy(j, params, RegionSpec::full_slice(), k, EnergyFamily::kE));
        supEb = std::max(
            supEb, slice_energy(j, params, RegionSpec::full_slice(), k, EnergyFamily::kEb));
      }
      row.supE2.push_back(supE);
      row.supEb2.push_back(supEb);
      const double tau = h.snaps.back().grid.t;
      double supF = 0.0, supFb = 0.0;
      for (double cut : flux_ladder) {
        supF = std::max(supF, flux_energy(h, params, RegionSpec::null_out(cut, tau), k));
        supFb = std::max(supFb, flux_energy(h, params, RegionSpec::null_in(cut, tau), k));
      }
      row.supF2.push_back(supF);
      row.supFb2.push_back(supFb);
    }
    table.rows.push_back(row);
  }
  const auto fit = [&](const std::vector<double> ScalingRow::*member, int k) {
    std::vector<double> exps;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const double q1 = (table.rows[i].*member)[k];
      const double q2 = (table.rows[i + 1].*member)[k];
      const double d1 = table.rows[i].delta, d2 = table.rows[i + 1].delta;
      if (q1 > 0.0 && q2 > 0.0) {
        exps.push_back(std::log(q1 / q2) / std::log(d1 / d2));
      } else {
        exps.push_back(0.0);
      }
    }
    return exps;
  };
  if (table.rows.size() >= 2) {
    for (int k = 0; k <= k_max; ++k) {
      const auto e1 = fit(&ScalingRow::supE2, k);
      const auto e2 = fit(&ScalingRow::supEb2, k);
      const auto e3 = fit(&ScalingRow::supF2, k);
      const auto e4 = fit(&ScalingRow::supFb2, k);
      table.exp_E2.insert(table.exp_E2.end(), e1.begin(), e1.end());
      table.exp_Eb2.insert(table.exp_Eb2.end(), e2.begin(), e2.end());
      table.exp_F2.insert(table.exp_F2.end(), e3.begin(), e3.end());
      table.exp_Fb2.insert(table.exp_Fb2.end(), e4.begin(), e4.end());
    }
  }
  return table;
}

std::vector<EnergySample> energy_report(const History& h, const WeightParams& params,
                                        const std::vector<double>& ladder_in, int k_max) {
  std::vector<EnergySample> out;
  // an infinite cut gives the supremum over the region parameter (full slice)
  std::vector<double> ladder = ladder_in;
  ladder.push_back(std::numeric_limits<double>::infinity());
  const double tau = h.snaps.back().grid.t;
  for (const auto& snap : h.snaps) {
    const JetField j = extract_jets(snap, h.profile, k_max == 0 ? 1 : 2, h.cfg.fd_order);
    for (int k = 0; k <= k_max; ++k) {
      for (double cut : ladder) {
        EnergySample s;
        s.t = snap.grid.t;
        s.k = k;
        s.region_param = cut;
        s.E2 = slice_energy(j, params, RegionSpec::sigma_plus(cut), k, EnergyFamily::kE);
        s.Eb2 = slice_energy(j, params, RegionSpec::sigma_minus(cut), k, EnergyFamily::kEb);
        out.push_back(s);
      }
    }
  }
  // fluxes once, over the full history
  for (int k = 0; k <= k_max; ++k) {
    for (double cut : ladder_in) {
      EnergySample s;
      s.t = tau;
      s.k = k;
      s.region_param = cut;
      try {
        s.F2 = flux_energy(h, params, RegionSpec::null_out(cut, tau), k);
      } catch (const RegionError&) {
        s.F2 = 0.0;
      }
      try {
        s.Fb2 = flux_energy(h, params, RegionSpec::null_in(cut, tau), k);
      } catch (const RegionError&) {
        s.Fb2 = 0.0;
      }
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace pwave
