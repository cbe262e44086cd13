#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pwave/geometry.hpp"

namespace pwave {

// ---- pointwise residual functionals of second-order jets --------------------

// Flux (divergence) form of the Euler-Lagrange equation; zero on solutions.
double el_flux_residual(const SecondJet& j, double g_floor = kDefaultGFloor);

// Source terms of the equivalent formulations.
double s0_source(const SecondJet& j, double g_floor = kDefaultGFloor);
double tilde_s0_source(const SecondJet& j, double g_floor = kDefaultGFloor);
double r0_source(const SecondJet& j, double g_floor = kDefaultGFloor);
double tilde_r0_source(const SecondJet& j, double g_floor = kDefaultGFloor);

// Box_g phi = g^{mu nu} d_mu d_nu phi + (1/sqrt g) d_nu phi d_mu(g^{mu nu} sqrt g).
double box_g(const SecondJet& j, double g_floor = kDefaultGFloor);

// g^{uu} d_u^2 phi + 2 g^{u ub} d_u d_ub phi + g^{ub ub} d_ub^2 phi.
double quasilinear_principal(const SecondJet& j, double g_floor = kDefaultGFloor);

// ---- analytic fields with exact derivatives ---------------------------------

// Closed-form test field phi(u, ub) with exact mixed partials up to total
// order 4, bound to a background profile.
struct AnalyticTestField {
  std::string name;
  std::function<double(int i, int j, double u, double ub)> deriv;
  PlaneWaveProfile profile;
  bool pure_left_mover = false;  // phi = f(u): exact solution family
};

// The fixed catalog; amplitudes small enough to stay timelike with margin.
std::vector<AnalyticTestField> analytic_catalog(const PlaneWaveProfile& profile);

// All derivatives d_u^i d_ub^j phi for i+j <= 4 at a point.
struct JetTable {
  std::array<std::array<double, 5>, 5> d{};  // d[i][j]
  double psi[5] = {0, 0, 0, 0, 0};           // psi^(1..4) at u (index 1..4)
};
JetTable jet_table(const AnalyticTestField& field, double u, double ub);
SecondJet second_jet(const JetTable& t);

// Residual of the commuted high-order equation, exact Leibniz bookkeeping.
// Returns max |LHS - RHS| over all multi-indices of total order k (k in {1,2}).
double higher_order_commute_residual(const AnalyticTestField& field, int k, double u,
                                     double ub);

// ---- identity verification harness ------------------------------------------

struct ResidualRow {
  std::string name;
  int n_points = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  bool all_pass() const;
  std::string to_csv() const;  // identity,n_points,max_abs,max_rel,threshold,pass
};

struct IdentitySuiteConfig {
  int n_points = 1000;
  double rel_tol_algebraic = 1e-10;  // pointwise-algebraic identities
  double rel_tol_chain = 1e-9;       // chain-rule-heavy identities
  double g_min = 0.1;                // sample admissibility
  double box_halfwidth = 3.0;        // (u, ub) sampling box
  unsigned long long seed = 20240901ull;
  WeightParams weights{};
};

// Runs every identity over random timelike sample points of the given fields.
// Per-point failures are aggregated as failing rows, never thrown.
ResidualReport run_identity_suite(const std::vector<AnalyticTestField>& fields,
                                  const IdentitySuiteConfig& cfg);

}  // namespace pwave
