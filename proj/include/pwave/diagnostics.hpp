#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pwave/geometry.hpp"
#include "pwave/solver.hpp"

namespace pwave {

enum class RegionKind { kSigmaMinus, kSigmaPlus, kFullSlice, kNullOut, kNullIn };

struct RegionSpec {
  RegionKind kind = RegionKind::kFullSlice;
  double cut = 0.0;  // u0 (plus/out) or ub0 (minus/in)
  double tau = 0.0;  // upper time of a null segment

  static RegionSpec sigma_minus(double ub0) { return {RegionKind::kSigmaMinus, ub0, 0.0}; }
  static RegionSpec sigma_plus(double u0) { return {RegionKind::kSigmaPlus, u0, 0.0}; }
  static RegionSpec full_slice() { return {RegionKind::kFullSlice, 0.0, 0.0}; }
  static RegionSpec null_out(double u0, double tau) { return {RegionKind::kNullOut, u0, tau}; }
  static RegionSpec null_in(double ub0, double tau) { return {RegionKind::kNullIn, ub0, tau}; }
};

enum class EnergyFamily { kE, kEb };

// Weighted slice energy E^2_(k+1) (family kE, regions plus/full) or
// Ebar^2_(k+1) (family kEb, regions minus/full) on a jet slice.
double slice_energy(const JetField& jets, const WeightParams& params,
                    const RegionSpec& region, int k, EnergyFamily family);

// Null-segment flux F^2_(k+1) (kNullOut) or Fbar^2_(k+1) (kNullIn), integrated
// along the characteristic over snapshot times in [0, tau]. Field values on
// the curve by cubic interpolation in x, linear in t between snapshots.
double flux_energy(const History& h, const WeightParams& params, const RegionSpec& segment,
                   int k);

// LHS - RHS of the energy identity over the slab [tau0, tau]:
//   kSigmaMinus: slice term on Sigma^-_{ub=cut}, incoming segment, region D^-
//   kSigmaPlus : slice term on Sigma^+_{u=cut},  outgoing segment, region D^+
double energy_identity_residual(const History& h, const WeightParams& params, Multiplier xi,
                                RegionKind region, double cut, double tau0, double tau,
                                int k);

struct DecayProfile {
  std::vector<double> times;
  struct Row {
    int i = 0, j = 0;
    std::vector<double> sup_Lbar;          // sup_x Lambda^(1/2)(u) |d_u phi_ij|
    std::vector<double> sup_L_over_delta;  // sup_x Lambdab^(1/2)(ub) |d_ub phi_ij| / delta
    double max_Lbar = 0.0, max_L = 0.0;
  };
  std::vector<Row> rows;  // (0,0), (1,0), (0,1)
};
DecayProfile decay_profile(const History& h, const WeightParams& params, double delta,
                           int window_margin = 0);

// ||h||_inf / (||h||_L2 + ||d_x h||_L2); 0 for the zero field.
double sobolev_ratio(const std::vector<double>& values, double dx, int fd_order = 4);

struct PersistenceReport {
  double max_drift = 0.0;   // max |p^2(t) - p^2(0)| along d_ub curves
  double min_margin = 0.0;  // min of p^2 - psi(u)^2 over curves and times
  std::vector<double> times;
  std::vector<double> drift;  // max drift per time
};
// Tracks (d_u phi)^2 along the integral curves x = x0 + t of d_ub.
PersistenceReport persistence_check(const History& h,
                                    const std::function<double(double)>& threshold_psi_of_u,
                                    int window_margin = 0);

struct ScalingRow {
  double delta = 0.0;
  std::vector<double> supE2, supEb2;  // per inner order k
  std::vector<double> supF2, supFb2;
};
struct ScalingTable {
  std::vector<ScalingRow> rows;
  // fitted exponents between consecutive deltas (log ratio / log delta ratio)
  std::vector<double> exp_E2, exp_Eb2, exp_F2, exp_Fb2;  // per k
};
ScalingTable scaling_study(const std::function<History(double)>& runner,
                           const std::vector<double>& deltas, const WeightParams& params,
                           int k_max, const std::vector<double>& flux_ladder);

struct EnergySample {
  double t = 0.0;
  int k = 0;
  double region_param = 0.0;
  double E2 = 0.0, Eb2 = 0.0, F2 = 0.0, Fb2 = 0.0;
};
// Ladder evaluation of all four families; region_param is the u (resp. ub) cut.
std::vector<EnergySample> energy_report(const History& h, const WeightParams& params,
                                        const std::vector<double>& ladder, int k_max);

}  // namespace pwave
