#pragma once

#include <utility>

#include "pwave/background.hpp"
#include "pwave/jets.hpp"

namespace pwave {

struct NullCoords {
  double u = 0.0;
  double ub = 0.0;
};

// u = t - x, ub = (t+x)/2 - H2(t-x)/2.
NullCoords to_null(double t, double x, const PlaneWaveProfile& profile);
// Inverse chart: t = ub + H2(u)/2 + u/2, x = ub + H2(u)/2 - u/2.
std::pair<double, double> from_null(const NullCoords& nc, const PlaneWaveProfile& profile);

// Change of frame between (d_t, d_x) and (d_u, d_ub) at given psi'(u).
struct FrameCoeffs {
  // d_u = du_dt * d_t + du_dx * d_x ; d_ub = d_t + d_x
  double du_dt = 0.5, du_dx = -0.5;
  double dub_dt = 1.0, dub_dx = 1.0;
  // covectors: du = dt - dx ; dub = dub_t dt + dub_x dx
  double du_t = 1.0, du_x = -1.0;
  double dub_t = 0.5, dub_x = 0.5;

  // Inverse relations: d_t = dt_du * d_u + dt_dub * d_ub, same for d_x.
  double dt_du = 1.0, dt_dub = 0.5;
  double dx_du = -1.0, dx_dub = 0.5;
};
FrameCoeffs frame_coeffs(double psi1);

// First-order null data of the perturbation at a point.
struct FirstJet {
  double psi1 = 0.0;  // psi'(u)
  double p = 0.0;     // d_u phi
  double q = 0.0;     // d_ub phi
};

// Second-order null data; input to every equation form.
struct SecondJet {
  double psi1 = 0.0, psi2 = 0.0;  // psi'(u), psi''(u)
  double p = 0.0, q = 0.0;
  double puu = 0.0;    // d_u^2 phi
  double pub = 0.0;    // d_u d_ub phi
  double qubub = 0.0;  // d_ub^2 phi

  FirstJet first() const { return {psi1, p, q}; }
};

// Pointwise induced-metric package. All components carry the exact closed
// forms; rU, rUb are the gring-scaled raised gradients used throughout.
struct MetricScalars {
  double gring = 1.0;  // (1 - psi' q)^2
  double g = 1.0;      // 1 - 2pq - 2 psi' q + (psi' q)^2
  double guu = 0.0;    // g^{uu}   = -q^2/g
  double guub = -1.0;  // g^{u ub} = -(1 - psi' q - p q)/g
  double gubub = 0.0;  // g^{ub ub}= -(2 psi' + p) p / g
  double rU = 0.0;     // gring d^u phi  = -q + psi' q^2
  double rUb = 0.0;    // gring d^ub phi = -p - psi' p q
  double psi1 = 0.0;

  // Remark combinations, exact: gring*|g^{ubub}| = |(2psi'+p)p| * gring / g
  double gring_abs_gubub() const;
  // -gring g^{uu} = rU^2 / g
  double minus_gring_guu() const;
};

inline constexpr double kDefaultGFloor = 1e-6;

MetricScalars metric_scalars(const FirstJet& jet, double g_floor = kDefaultGFloor);

// Mixed energy-momentum components T^alpha_beta[psi] for a field jet
// (a, b) = (d_u psi, d_ub psi), plus the scalar A(psi).
struct EnergyMomentum {
  double Tuu = 0.0;    // T^u_u  ( = acal )
  double Tuub = 0.0;   // T^u_ub
  double Tubu = 0.0;   // T^ub_u
  double Tubub = 0.0;  // T^ub_ub ( = -acal )
  double acal = 0.0;   // (g^{uu} a^2 - g^{ubub} b^2)/2
};
EnergyMomentum energy_momentum(const MetricScalars& ms, double a, double b);

// Components of the weighted geometric multipliers in the (d_u, d_ub) basis.
struct MultiplierVec {
  double tL_u = 0.0, tL_ub = 0.0;    // tilde L    = -Lambdab(ub) Du
  double tLb_u = 0.0, tLb_ub = 0.0;  // tilde Lbar = -Lambda(u)  Dub
};
MultiplierVec multipliers(const MetricScalars& ms, double lam_u, double lamb_ub);

enum class Pairing { kDuTL, kDubTLb, kDtTL, kDtTLb };

// T(-Df, xi) for the four exposed pairings; (a,b) are the psi jets.
double energy_density(const MetricScalars& ms, double a, double b, Pairing pairing,
                      double lam_u, double lamb_ub);

enum class Multiplier { kTL, kTLb };

// Weight values and their derivatives at the point: Lambda(u), Lambda'(u),
// Lambdab(ub), Lambdab'(ub).
struct WeightJet {
  double lam = 1.0, lam1 = 0.0;
  double lab = 1.0, lab1 = 0.0;
};

// The two deformation scalars of Lemma 2.4's right hand side:
//   t_dxi     = T^alpha_beta[psi] d_alpha xi^beta
//   xi_metric = (1/(2 sqrt g)) xi(sqrt g g^{gamma rho}) d_gamma psi d_rho psi
struct DeformationPair {
  double t_dxi = 0.0;
  double xi_metric = 0.0;
};

// Path (a): chain-rule differentiation of the assembled components.
DeformationPair deformation_direct(const SecondJet& phi, double a, double b, Multiplier xi,
                                   const WeightJet& w, double g_floor = kDefaultGFloor);
// Path (b): the closed-form expressions.
DeformationPair deformation_closed(const SecondJet& phi, double a, double b, Multiplier xi,
                                   const WeightJet& w, double g_floor = kDefaultGFloor);

// (1/sqrt g) d_alpha( sqrt g P^alpha[phi, xi] ) with psi = phi itself,
// assembled by exact chain rule. Left side of Lemma 2.4.
double current_divergence(const SecondJet& phi, Multiplier xi, const WeightJet& w);

// Seeded jets of the metric inputs, shared with eqforms.
namespace detail {
inline Jet2 seed_psi1(const SecondJet& j, double psi3 = 0.0) {
  return {j.psi1, j.psi2, 0.0, psi3, 0.0, 0.0};
}
inline Jet2 seed_p(const SecondJet& j) { return {j.p, j.puu, j.pub}; }
inline Jet2 seed_q(const SecondJet& j) { return {j.q, j.pub, j.qubub}; }

struct MetricJets {
  Jet2 gring, g, sg, guu, guub, gubub;
};
MetricJets metric_jets(const Jet2& psi1, const Jet2& p, const Jet2& q);
}  // namespace detail

}  // namespace pwave
