#include "pwave/eqforms.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pwave/errors.hpp"

namespace pwave {
namespace {

struct JetCtx {
  Jet2 P, p, q;
  detail::MetricJets m;
  Jet2 isg;  // 1/sqrt(g)
  double gr, g, sg;
};

JetCtx make_ctx(const SecondJet& j, double g_floor) {
  JetCtx c;
  c.P = detail::seed_psi1(j);
  c.p = detail::seed_p(j);
  c.q = detail::seed_q(j);
  c.m = detail::metric_jets(c.P, c.p, c.q);
  if (!(c.m.g.v > g_floor)) {
    throw DegenerateMetricError("g = " + std::to_string(c.m.g.v) + " at or below floor");
  }
  c.isg = Jet2(1.0) / c.m.sg;
  c.gr = c.m.gring.v;
  c.g = c.m.g.v;
  c.sg = c.m.sg.v;
  return c;
}

}  // namespace

double el_flux_residual(const SecondJet& j, double g_floor) {
  const JetCtx c = make_ctx(j, g_floor);
  const Jet2 A = -c.q * c.isg;
  const Jet2 B = -c.p * c.isg - c.P * c.isg + c.P * c.P * c.q * c.isg;
  return A.du + B.db;
}

double s0_source(const SecondJet& j, double g_floor) {
  const JetCtx c = make_ctx(j, g_floor);
  const double P = j.psi1, P2 = j.psi2, p = j.p, q = j.q;
  const double pub = j.pub, qq = j.qubub;
  const double gr = c.gr, g = c.g, sg = c.sg;
  const double dsg_u = c.isg.du, dsg_ub = c.isg.db;  // d (1/sqrt g)
  return gr / (g * g) * (1.0 - g) * P * P * qq + (gr - g) / (g * g) * P * p * qq -
         gr / (g * g) * P * P * P * q * qq + gr / (g * g) * P * q * pub +
         (gr - 1.0) / g * 2.0 * pub + P * q * pub / g + P2 * q * q / g -
         gr / sg * P * P * q * dsg_ub + (gr - 1.0) / sg * q * dsg_u +
         (gr - 1.0) / sg * p * dsg_ub + P * q * q / sg * dsg_u - P * q * p / sg * dsg_ub;
}

double tilde_s0_source(const SecondJet& j, double g_floor) {
  const JetCtx c = make_ctx(j, g_floor);
  const double P = j.psi1, P2 = j.psi2, p = j.p, q = j.q;
  const double pub = j.pub, qq = j.qubub;
  const double g = c.g, sg = c.sg;
  const double dsg_u = c.isg.du, dsg_ub = c.isg.db;
  return (1.0 - g) / (g * g) * P * P * qq + (1.0 - g) / (g * g) * P * p * qq -
         P * P * P * q * qq / (g * g) + P * q * pub / (g * g) + P * q * pub / g -
         P * P * q * dsg_ub / sg + P2 * q * q / g + P * q * q * dsg_u / sg -
         P * q * p * dsg_ub / sg;
}

double r0_source(const SecondJet& j, double g_floor) {
  const FirstJet f = j.first();
  const MetricScalars ms = metric_scalars(f, g_floor);
  const double t = j.psi1 * j.q;
  return j.psi2 * j.q * j.q * (1.0 - 3.0 * t + t * t - t * t * t) / (ms.gring * ms.g);
}

double tilde_r0_source(const SecondJet& j, double g_floor) {
  const FirstJet f = j.first();
  const MetricScalars ms = metric_scalars(f, g_floor);
  const double P = j.psi1, P2 = j.psi2, p = j.p, q = j.q;
  const double puu = j.puu, pub = j.pub, qq = j.qubub;
  const double ig = 1.0 / (ms.gring * ms.g);
  const double g = ms.g;
  return 2.0 * ig * (2.0 * P + p) * p * P * q * qq -
         ig * (2.0 * P + p) * p * P * P * q * q * qq + ig * (1.0 + 3.0 * g) * P * q * pub +
         2.0 * ig * P * p * q * q * pub + ig * (2.0 * p - P) * P * P * q * q * q * pub +
         2.0 * ig * P * q * q * q * puu - ig * P * P * q * q * q * q * puu +
         ig * (1.0 - P * q) * P2 * q * q;
}

double quasilinear_principal(const SecondJet& j, double g_floor) {
  const MetricScalars ms = metric_scalars(j.first(), g_floor);
  return ms.guu * j.puu + 2.0 * ms.guub * j.pub + ms.gubub * j.qubub;
}

double box_g(const SecondJet& j, double g_floor) {
  const JetCtx c = make_ctx(j, g_floor);
  const Jet2 cu_u = c.m.guu * c.m.sg;    // g^{uu} sqrt g
  const Jet2 cub_u = c.m.guub * c.m.sg;  // g^{ub u} sqrt g
  const Jet2 cu_ub = c.m.guub * c.m.sg;
  const Jet2 cub_ub = c.m.gubub * c.m.sg;
  const double div_u = cu_u.du + cub_u.db;     // d_mu (g^{mu u} sqrt g)
  const double div_ub = cu_ub.du + cub_ub.db;  // d_mu (g^{mu ub} sqrt g)
  return quasilinear_principal(j, g_floor) + (j.p * div_u + j.q * div_ub) / c.sg;
}

// ---------------------------------------------------------------------------

std::vector<AnalyticTestField> analytic_catalog(const PlaneWaveProfile& profile) {
  using detail::gaussian_nth_derivative;
  std::vector<AnalyticTestField> out;

  out.push_back({"constant",
                 [](int i, int j, double, double) { return (i == 0 && j == 0) ? 0.1 : 0.0; },
                 profile, true});

  out.push_back({"linear-u",
                 [](int i, int j, double u, double) {
                   if (j != 0) return 0.0;
                   if (i == 0) return 0.25 * u;
                   return i == 1 ? 0.25 : 0.0;
                 },
                 profile, true});

  out.push_back({"linear-ub",
                 [](int i, int j, double, double ub) {
                   if (i != 0) return 0.0;
                   if (j == 0) return 0.2 * ub;
                   return j == 1 ? 0.2 : 0.0;
                 },
                 profile, false});

  out.push_back({"sin-sin",
                 [](int i, int j, double u, double ub) {
                   const double au = 0.9, bu = 1.1, amp = 0.18;
                   const double su = std::sin(au * u + 0.5 * M_PI * i);
                   const double sb = std::sin(bu * ub + 0.5 * M_PI * j);
                   return amp * std::pow(au, i) * std::pow(bu, j) * su * sb;
                 },
                 profile, false});

  out.push_back({"u-gauss",
                 [](int i, int j, double u, double ub) {
                   // 0.15 * u * exp(-ub^2) ; sigma^2 = 1/2
                   const double s = 1.0 / std::sqrt(2.0);
                   const double y = gaussian_nth_derivative(0.15, s, j, ub);
                   if (i == 0) return u * y;
                   return i == 1 ? y : 0.0;
                 },
                 profile, false});

  out.push_back({"gauss-sum",
                 [](int i, int j, double u, double ub) {
                   double v = 0.0;
                   if (j == 0) v += gaussian_nth_derivative(0.3, 1.0, i, u);
                   if (i == 0) v += gaussian_nth_derivative(0.2, 1.5, j, ub);
                   return v;
                 },
                 profile, false});

  out.push_back({"gauss-u",
                 [](int i, int j, double u, double) {
                   if (j != 0) return 0.0;
                   return gaussian_nth_derivative(0.3, 1.25, i, u);
                 },
                 profile, true});

  return out;
}

JetTable jet_table(const AnalyticTestField& field, double u, double ub) {
  JetTable t;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) t.d[i][j] = field.deriv(i, j, u, ub);
  for (int n = 1; n <= 4; ++n) t.psi[n] = psi_derivative(field.profile, n, u);
  return t;
}

SecondJet second_jet(const JetTable& t) {
  SecondJet j;
  j.psi1 = t.psi[1];
  j.psi2 = t.psi[2];
  j.p = t.d[1][0];
  j.q = t.d[0][1];
  j.puu = t.d[2][0];
  j.pub = t.d[1][1];
  j.qubub = t.d[0][2];
  return j;
}

namespace {

double jet_slot(const Jet2& x, int i, int j) {
  if (i == 0 && j == 0) return x.v;
  if (i == 1 && j == 0) return x.du;
  if (i == 0 && j == 1) return x.db;
  if (i == 2 && j == 0) return x.duu;
  if (i == 1 && j == 1) return x.dub;
  if (i == 0 && j == 2) return x.dbb;
  throw OrderNotImplementedError("jet slot beyond order 2");
}

double binom2(int n, int k) {
  static const double c[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
  return c[n][k];
}

}  // namespace

double higher_order_commute_residual(const AnalyticTestField& field, int k, double u,
                                     double ub) {
  if (k < 1 || k > 2) throw OrderNotImplementedError("commute residual needs k in {1,2}");
  const JetTable t = jet_table(field, u, ub);
  const auto& d = t.d;

  const Jet2 P(t.psi[1], t.psi[2], 0.0, t.psi[3], 0.0, 0.0);
  const Jet2 p(d[1][0], d[2][0], d[1][1], d[3][0], d[2][1], d[1][2]);
  const Jet2 q(d[0][1], d[1][1], d[0][2], d[2][1], d[1][2], d[0][3]);
  const auto m = detail::metric_jets(P, p, q);

  const Jet2 puu(d[2][0], d[3][0], d[2][1], d[4][0], d[3][1], d[2][2]);
  const Jet2 pub(d[1][1], d[2][1], d[1][2], d[3][1], d[2][2], d[1][3]);
  const Jet2 qbb(d[0][2], d[1][2], d[0][3], d[2][2], d[1][3], d[0][4]);
  const Jet2 h = m.guu * puu + Jet2(2.0) * m.guub * pub + m.gubub * qbb;

  // principal contraction of phi_J (J = (j1, j2)) with a given g-derivative slot
  const auto contract = [&](int gi, int gj, int j1, int j2) {
    return jet_slot(m.guu, gi, gj) * d[j1 + 2][j2] +
           2.0 * jet_slot(m.guub, gi, gj) * d[j1 + 1][j2 + 1] +
           jet_slot(m.gubub, gi, gj) * d[j1][j2 + 2];
  };

  double worst = 0.0;
  for (int k1 = 0; k1 <= k; ++k1) {
    const int k2 = k - k1;
    const double lhs = jet_slot(h, k1, k2);
    double rhs = contract(0, 0, k1, k2);  // g^{mu nu} dd phi_K
    for (int i1 = 0; i1 <= k1; ++i1) {
      for (int i2 = 0; i2 <= k2; ++i2) {
        if (i1 == 0 && i2 == 0) continue;
        rhs += binom2(k1, i1) * binom2(k2, i2) * contract(i1, i2, k1 - i1, k2 - i2);
      }
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

// ---------------------------------------------------------------------------

bool ResidualReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return !rows.empty();
}

std::string ResidualReport::to_csv() const {
  std::ostringstream os;
  os << "identity,n_points,max_abs,max_rel,pass\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%d\n", r.name.c_str(), r.n_points,
                  r.max_abs, r.max_rel, r.pass ? 1 : 0);
    os << buf;
  }
  return os.str();
}

namespace {

struct Accum {
  std::string name;
  double threshold;
  int n = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;

  void add(double lhs, double rhs) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    const double res = std::abs(lhs - rhs);
    max_abs = std::max(max_abs, res);
    max_rel = std::max(max_rel, res / scale);
    ++n;
  }
  ResidualRow row() const {
    return {name, n, max_abs, max_rel, threshold, n > 0 && max_rel <= threshold};
  }
};

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

ResidualReport run_identity_suite(const std::vector<AnalyticTestField>& fields,
                                  const IdentitySuiteConfig& cfg) {
  const double ta = cfg.rel_tol_algebraic, tc = cfg.rel_tol_chain;
  Accum inv{"geom-metric-inverse", ta};
  Accum sgrad{"geom-scaled-gradient", ta};
  Accum detrel{"geom-det-relation", ta};
  Accum ida{"ID-A-s0-difference", ta};
  Accum idb{"ID-B-box-s0", tc};
  Accum idb2{"ID-B2-principal-rt0", tc};
  Accum idc_tl{"ID-C-divergence-TL", tc};
  Accum idc_tlb{"ID-C-divergence-TLb", tc};
  Accum idd{"ID-D-exact-solutions", ta};
  Accum ide{"ID-E-energy-expansions", ta};
  Accum idf_tl{"ID-F-deformation-TL", ta};
  Accum idf_tlb{"ID-F-deformation-TLb", ta};
  Accum idg1{"ID-G-commute-k1", ta};
  Accum idg2{"ID-G-commute-k2", ta};

  std::mt19937_64 rng(cfg.seed);
  const int per_field =
      fields.empty() ? 0 : (cfg.n_points + static_cast<int>(fields.size()) - 1) /
                               static_cast<int>(fields.size());

  for (const auto& field : fields) {
    int accepted = 0, tries = 0;
    while (accepted < per_field && tries < 100 * per_field) {
      ++tries;
      const double u = cfg.box_halfwidth * (2.0 * uniform01(rng) - 1.0);
      const double ub = cfg.box_halfwidth * (2.0 * uniform01(rng) - 1.0);
      JetTable tab;
      SecondJet j;
      try {
        tab = jet_table(field, u, ub);
        j = second_jet(tab);
        const MetricScalars probe = metric_scalars(j.first(), cfg.g_min);
        (void)probe;
      } catch (const DegenerateMetricError&) {
        continue;
      }
      ++accepted;

      const MetricScalars ms = metric_scalars(j.first());
      const double P = j.psi1, p = j.p, q = j.q;

      // covariant metric inversion
      const double c_uu = 2.0 * P * p + p * p;
      const double c_uub = -1.0 + P * q + p * q;
      const double c_ubub = q * q;
      inv.add(ms.guu * c_uu + ms.guub * c_uub, 1.0);
      inv.add(ms.guu * c_uub + ms.guub * c_ubub, 0.0);
      inv.add(ms.guub * c_uub + ms.gubub * c_ubub, 1.0);

      // g g^{mu nu} d_nu phi = gring gring^{mu nu} d_nu phi
      sgrad.add(ms.g * (ms.guu * p + ms.guub * q), ms.rU);
      sgrad.add(ms.g * (ms.guub * p + ms.gubub * q), ms.rUb);

      // g = gring (1 + gring^{-1}(dphi, dphi))
      const double tr_quad = (2.0 * (-1.0 + P * q) * p * q - 2.0 * P * p * q * q) / ms.gring;
      detrel.add(ms.g, ms.gring * (1.0 + tr_quad));

      const double el0 = el_flux_residual(j);
      const double s0 = s0_source(j);
      const double st0 = tilde_s0_source(j);
      const double box = box_g(j);
      const double princ = quasilinear_principal(j);
      const double rt0 = tilde_r0_source(j);
      const double sg = std::sqrt(ms.g);

      ida.add(st0 - s0, (ms.gring - 1.0) / sg * el0);
      idb.add(sg * (box - s0), ms.gring * el0);
      idb2.add(ms.gring * (princ - rt0), sg * el0);

      // Lemma 2.4 both multipliers
      WeightJet w;
      w.lam = lambda_weight(u, cfg.weights);
      w.lam1 = lambda_weight_deriv(u, cfg.weights);
      w.lab = lambda_weight(ub, cfg.weights);
      w.lab1 = lambda_weight_deriv(ub, cfg.weights);
      const MultiplierVec xi = multipliers(ms, w.lam, w.lab);
      {
        const auto d = deformation_direct(j, p, q, Multiplier::kTL, w);
        const double xiphi = xi.tL_u * p + xi.tL_ub * q;
        idc_tl.add(current_divergence(j, Multiplier::kTL, w),
                   box * xiphi + d.t_dxi - d.xi_metric);
        const auto dc = deformation_closed(j, p, q, Multiplier::kTL, w);
        idf_tl.add(d.t_dxi, dc.t_dxi);
        idf_tl.add(d.xi_metric, dc.xi_metric);
      }
      {
        const auto d = deformation_direct(j, p, q, Multiplier::kTLb, w);
        const double xiphi = xi.tLb_u * p + xi.tLb_ub * q;
        idc_tlb.add(current_divergence(j, Multiplier::kTLb, w),
                    box * xiphi + d.t_dxi - d.xi_metric);
        const auto dc = deformation_closed(j, p, q, Multiplier::kTLb, w);
        idf_tlb.add(d.t_dxi, dc.t_dxi);
        idf_tlb.add(d.xi_metric, dc.xi_metric);
      }

      if (field.pure_left_mover) {
        idd.add(el0, 0.0);
        idd.add(sg * (box - s0), 0.0);
        idd.add(princ - r0_source(j), 0.0);
        idd.add(princ - rt0, 0.0);
      }

      // Lemma 3.3 pointwise expansions with psi = phi_K, |K| <= 1
      const double psi_pairs[3][2] = {{j.p, j.q}, {j.puu, j.pub}, {j.pub, j.qubub}};
      for (const auto& ab : psi_pairs) {
        const double a = ab[0];
        const double b = ab[1];
        const double guu = ms.guu, guub = ms.guub, gubub = ms.gubub;
        const EnergyMomentum T = energy_momentum(ms, a, b);
        const double TDuDu = guub * b * guub * b + 0.5 * guu * a * guu * a +
                             guu * guub * a * b - 0.5 * guu * gubub * b * b;
        const double TDubDub = guub * a * guub * a + 0.5 * gubub * b * gubub * b +
                               gubub * guub * b * a - 0.5 * gubub * guu * a * a;
        const double TDuDub = 0.5 * guub * guu * a * a + 0.5 * guub * gubub * b * b +
                              guu * gubub * a * b;
        ide.add(guu * T.Tuu + guub * T.Tuub, TDuDu);
        ide.add(guub * T.Tubu + gubub * T.Tubub, TDubDub);
        ide.add(guu * T.Tubu + guub * T.Tubub, TDuDub);
        ide.add(energy_density(ms, a, b, Pairing::kDuTL, w.lam, w.lab), w.lab * TDuDu);
        ide.add(energy_density(ms, a, b, Pairing::kDubTLb, w.lam, w.lab), w.lam * TDubDub);

        // five-line decomposition of T(-Dt, tL)
        const double ruP = ms.rU / ms.gring;
        const double rubP = ms.rUb / ms.gring;
        const double lb = w.lab, la = w.lam;
        const double dec_tl =
            0.5 * lb * guub * b * guub * b +
            0.25 * (1.0 + P * P) * lb * guu * a * guu * a -
            0.5 * lb * (ms.gring / ms.g) * guub * ruP * ruP * a * a +
            lb *
                (0.5 * P * P * guub * guub - 0.5 * (ms.gring / ms.g) * guub * rubP * rubP -
                 guub * P * p / ms.gring) *
                b * b +
            0.5 * (1.0 + P * P) * lb * (guu * guub * a * b - 0.5 * guu * gubub * b * b) +
            lb * guu * gubub * a * b;
        ide.add(energy_density(ms, a, b, Pairing::kDtTL, w.lam, w.lab), dec_tl);

        const double dec_tlb =
            la * guub * a * guub * a + 0.25 * (1.0 + P * P) * la * guub * guu * a * a +
            0.5 * la * gubub * b * gubub * b -
            0.25 * (1.0 + P * P) * (ms.gring / ms.g) * la * guub * rubP * rubP * b * b -
            0.5 * (1.0 + P * P) / ms.gring * la * guub * P * p * b * b +
            la * (0.5 * (1.0 + P * P) * guu * gubub * a * b + gubub * guub * b * a -
                  0.5 * gubub * guu * a * a);
        ide.add(energy_density(ms, a, b, Pairing::kDtTLb, w.lam, w.lab), dec_tlb);
      }

      idg1.add(higher_order_commute_residual(field, 1, u, ub), 0.0);
      idg2.add(higher_order_commute_residual(field, 2, u, ub), 0.0);
    }
  }

  ResidualReport rep;
  for (const Accum* a :
       {&inv, &sgrad, &detrel, &ida, &idb, &idb2, &idc_tl, &idc_tlb, &idd, &ide, &idf_tl,
        &idf_tlb, &idg1, &idg2}) {
    ResidualRow r = a->row();
    if (a == &idd && r.n_points == 0) continue;  // no left-mover fields selected
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace pwave
