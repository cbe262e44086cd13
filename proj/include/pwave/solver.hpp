#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pwave/background.hpp"
#include "pwave/errors.hpp"

namespace pwave {

struct Grid {
  double x0 = 0.0;
  double dx = 0.0;
  int n = 0;
  double t = 0.0;

  double x(int i) const { return x0 + dx * i; }
  static Grid uniform(double x_min, double x_max, int n) {
    return {x_min, (x_max - x_min) / (n - 1), n, 0.0};
  }
};

// (t, x)-slice of the total field phi_total = psi(t-x) + perturbation.
struct GridState {
  Grid grid;
  std::vector<double> phi;  // total field
  std::vector<double> v;    // d_t phi_total
  std::vector<double> w;    // d_x phi_total
};

struct SolverConfig {
  int fd_order = 4;          // 2 or 4
  double cfl = 0.4;          // in (0,1)
  double t_end = 1.0;
  int snapshot_stride = 32;  // steps between stored snapshots
  double d_floor = 1e-3;     // timelike guard on D = 1 + w^2 - v^2
  int threads = 1;
};

struct StateDerivative {
  std::vector<double> phi_t, v_t, w_t;
};

// Right-hand side of the method-of-lines system:
//   phi_t = v, w_t = D_x v, v_t = (2 v w D_x v + (1 - v^2) D_x w) / (1 + w^2).
// Ghost nodes are filled with the exact background at the state's time.
StateDerivative rhs(const GridState& state, const PlaneWaveProfile& profile,
                    const SolverConfig& cfg);

struct History {
  PlaneWaveProfile profile;
  SolverConfig cfg;
  std::vector<GridState> snaps;
  double min_D = 1.0;          // worst timelike margin seen over the run
  double max_speed = 0.0;      // largest |characteristic speed| seen
  double compat_residual = 0.0;  // max rms |w - D_x phi| seen on snapshots
  double dt = 0.0;
};

// Classic 4-stage explicit integration with dt = cfl * dx (final step
// shortened to land on t_end). Snapshots every `snapshot_stride` steps plus
// the final slice. Throws TimelikeViolationError when D < d_floor.
History evolve(const GridState& initial, const PlaneWaveProfile& profile,
               const SolverConfig& cfg);

// Null-frame jets of the perturbation phi_pert = phi_total - psi on a slice.
struct JetField {
  Grid grid;
  int order = 1;  // max i+j available (1 or 2)
  int halo = 0;   // nodes at each end with invalid derivative data
  std::vector<double> u, ub;            // null coordinates at nodes
  std::vector<double> psi1, psi2;       // psi', psi'' at u
  std::vector<double> phi0;             // (0,0): phi_pert
  std::vector<double> p, q;             // (1,0), (0,1)
  std::vector<double> puu, pub, qubub;  // (2,0), (1,1), (0,2), order >= 2

  int first_valid() const { return halo; }
  int last_valid() const { return grid.n - 1 - halo; }
};

JetField extract_jets(const GridState& snapshot, const PlaneWaveProfile& profile, int order,
                      int fd_order = 4);

// Flux-form residual d_t(v/sqrt D) - d_x(w/sqrt D) at an interior snapshot,
// assembled by FD across snapshots (4th order in t and x; needs 2 neighbors
// on each side). Returns the max abs value over the measurement window.
double flux_form_residual(const History& h, int snap_index, int x_lo, int x_hi);

struct ConvergenceRow {
  std::string quantity;
  std::vector<double> values;  // one per refinement level
  double observed_order = 0.0;
  bool exact = false;  // errors at rounding level; order undefined
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
};

// Runs the same recipe on refinements in 2x node refinement (n_k = (n0-1) 2^k + 1)
// and reports Richardson-style observed orders. `build_initial` must produce
// the t=0 state for the given grid. Extra functionals are evaluated on each
// history and treated as self-convergent quantities (expected -> 0).
ConvergenceResult convergence_study(
    const std::function<GridState(const Grid&)>& build_initial,
    const PlaneWaveProfile& profile, double x_min, double x_max, int n0,
    const SolverConfig& cfg, int refinements,
    const std::vector<std::pair<std::string, std::function<double(const History&)>>>&
        extra_functionals = {});

}  // namespace pwave
