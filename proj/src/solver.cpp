#include "pwave/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "pwave/geometry.hpp"

namespace pwave {
namespace {

void parallel_for(int n, int threads, const std::function<void(int, int)>& body) {
  if (threads <= 1 || n < 4 * threads) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

// Ghost nodes: exact background plus the constant extension of the edge
// perturbation. For data supported well inside the domain this is the plain
// background pad; it also continues linear and travelling graphs exactly.
struct GhostSource {
  const PlaneWaveProfile* profile;
  const GridState* state;

  double bg(int i) const {
    return psi_derivative(*profile, 1, state->grid.t - state->grid.x(i));
  }
  double v(int i) const {
    const int edge = i < 0 ? 0 : state->grid.n - 1;
    return bg(i) + (state->v[edge] - bg(edge));
  }
  double w(int i) const {
    const int edge = i < 0 ? 0 : state->grid.n - 1;
    return -bg(i) + (state->w[edge] + bg(edge));
  }
};

// First x-derivative of a field with ghost access.
template <class F>
double dx1(const F& f, int i, double dx, int fd_order) {
  if (fd_order == 2) return (f(i + 1) - f(i - 1)) / (2.0 * dx);
  return (8.0 * (f(i + 1) - f(i - 1)) - (f(i + 2) - f(i - 2))) / (12.0 * dx);
}

}  // namespace

StateDerivative rhs(const GridState& state, const PlaneWaveProfile& profile,
                    const SolverConfig& cfg) {
  const Grid& g = state.grid;
  const int n = g.n;
  StateDerivative d;
  d.phi_t = state.v;
  d.v_t.resize(n);
  d.w_t.resize(n);
  const GhostSource ghost{&profile, &state};
  const auto vat = [&](int i) { return (i < 0 || i >= n) ? ghost.v(i) : state.v[i]; };
  const auto wat = [&](int i) { return (i < 0 || i >= n) ? ghost.w(i) : state.w[i]; };

  std::atomic<int> bad_node{-1};
  parallel_for(n, cfg.threads, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const double v = state.v[i], w = state.w[i];
      const double D = 1.0 + w * w - v * v;
      if (!(D >= cfg.d_floor)) {
        bad_node.store(i, std::memory_order_relaxed);
        continue;
      }
      const double vx = dx1(vat, i, g.dx, cfg.fd_order);
      const double wx = dx1(wat, i, g.dx, cfg.fd_order);
      d.w_t[i] = vx;
      d.v_t[i] = (2.0 * v * w * vx + (1.0 - v * v) * wx) / (1.0 + w * w);
    }
  });
  const int bad = bad_node.load(std::memory_order_relaxed);
  if (bad >= 0) {
    throw TimelikeViolationError("timelike condition D >= d_floor violated at node " +
                                     std::to_string(bad) + ", t = " + std::to_string(g.t),
                                 g.t, bad);
  }
  return d;
}

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

GridState rk4_step(const GridState& s, double dt, const PlaneWaveProfile& profile,
                   const SolverConfig& cfg) {
  const auto k1 = rhs(s, profile, cfg);
  GridState s2 = s;
  s2.grid.t = s.grid.t + 0.5 * dt;
  axpy(s2.phi, 0.5 * dt, k1.phi_t);
  axpy(s2.v, 0.5 * dt, k1.v_t);
  axpy(s2.w, 0.5 * dt, k1.w_t);
  const auto k2 = rhs(s2, profile, cfg);

  GridState s3 = s;
  s3.grid.t = s.grid.t + 0.5 * dt;
  axpy(s3.phi, 0.5 * dt, k2.phi_t);
  axpy(s3.v, 0.5 * dt, k2.v_t);
  axpy(s3.w, 0.5 * dt, k2.w_t);
  const auto k3 = rhs(s3, profile, cfg);

  GridState s4 = s;
  s4.grid.t = s.grid.t + dt;
  axpy(s4.phi, dt, k3.phi_t);
  axpy(s4.v, dt, k3.v_t);
  axpy(s4.w, dt, k3.w_t);
  const auto k4 = rhs(s4, profile, cfg);

  GridState out = s;
  out.grid.t = s.grid.t + dt;
  const double c = dt / 6.0;
  for (int i = 0; i < s.grid.n; ++i) {
    out.phi[i] += c * (k1.phi_t[i] + 2.0 * k2.phi_t[i] + 2.0 * k3.phi_t[i] + k4.phi_t[i]);
    out.v[i] += c * (k1.v_t[i] + 2.0 * k2.v_t[i] + 2.0 * k3.v_t[i] + k4.v_t[i]);
    out.w[i] += c * (k1.w_t[i] + 2.0 * k2.w_t[i] + 2.0 * k3.w_t[i] + k4.w_t[i]);
  }
  return out;
}

}  // namespace

History evolve(const GridState& initial, const PlaneWaveProfile& profile,
               const SolverConfig& cfg) {
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) {
    throw std::invalid_argument("cfl must lie in (0,1)");
  }
  if (initial.grid.n < 16) throw std::invalid_argument("grid needs n >= 16");

  History h;
  h.profile = profile;
  h.cfg = cfg;
  const double dt = cfg.cfl * initial.grid.dx;
  h.dt = dt;

  GridState s = initial;
  h.snaps.push_back(s);

  // compatibility of w with the spatial derivative of phi
  const auto compat = [&](const GridState& st) {
    const GhostSource ghost{&profile, &st};
    const int n = st.grid.n;
    const auto phat = [&](int i) {
      if (i >= 0 && i < n) return st.phi[i];
      // background continuation for the passive phi samples
      return psi_value(profile, st.grid.t - st.grid.x(i)) +
             (i < 0 ? st.phi[0] - psi_value(profile, st.grid.t - st.grid.x(0))
                    : st.phi[n - 1] - psi_value(profile, st.grid.t - st.grid.x(n - 1)));
    };
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = st.w[i] - dx1(phat, i, st.grid.dx, cfg.fd_order);
      sq += r * r;
    }
    (void)ghost;
    return std::sqrt(sq / n);
  };
  // rms guard: tolerates isolated kinks, catches w fields unrelated to phi
  const double c0 = compat(s);
  double wscale = 1e-12;
  for (double wv : s.w) wscale = std::max(wscale, std::abs(wv));
  if (c0 > 0.1 * std::max(1.0, wscale)) {
    throw std::invalid_argument("initial w is not the spatial derivative of phi");
  }
  h.compat_residual = c0;

  const auto scan_margins = [&](const GridState& st) {
    for (int i = 0; i < st.grid.n; ++i) {
      const double v = st.v[i], w = st.w[i];
      const double D = 1.0 + w * w - v * v;
      h.min_D = std::min(h.min_D, D);
      if (D > 0.0) {
        const double root = std::sqrt(D);
        const double lp = std::abs((v * w + root) / (1.0 + w * w));
        const double lm = std::abs((v * w - root) / (1.0 + w * w));
        h.max_speed = std::max({h.max_speed, lp, lm});
        if (h.max_speed > 1.0 + 1e-12) {
          throw std::logic_error("characteristic speed bound |lambda| <= 1 violated");
        }
      }
      if (!(D >= cfg.d_floor)) {
        throw TimelikeViolationError(
            "timelike condition D >= d_floor violated at node " + std::to_string(i) +
                ", t = " + std::to_string(st.grid.t),
            st.grid.t, i);
      }
    }
  };
  scan_margins(s);

  int step = 0;
  while (s.grid.t < cfg.t_end - 1e-12) {
    const double step_dt = std::min(dt, cfg.t_end - s.grid.t);
    s = rk4_step(s, step_dt, profile, cfg);
    ++step;
    scan_margins(s);
    if (step % cfg.snapshot_stride == 0 || s.grid.t >= cfg.t_end - 1e-12) {
      h.snaps.push_back(s);
      h.compat_residual = std::max(h.compat_residual, compat(s));
    }
  }
  return h;
}

JetField extract_jets(const GridState& snapshot, const PlaneWaveProfile& profile, int order,
                      int fd_order) {
  if (order < 0 || order > 2) {
    throw OrderNotImplementedError("extract_jets supports orders 0..2");
  }
  const Grid& g = snapshot.grid;
  const int n = g.n;
  const double t = g.t;
  JetField jf;
  jf.grid = g;
  jf.order = order;
  jf.halo = (fd_order == 2) ? 1 : 2;
  jf.u.resize(n);
  jf.ub.resize(n);
  jf.psi1.resize(n);
  jf.psi2.resize(n);
  jf.phi0.resize(n);
  jf.p.resize(n);
  jf.q.resize(n);

  std::vector<double> vp(n), wp(n);  // perturbation first derivatives in (t,x)
  for (int i = 0; i < n; ++i) {
    const double u = t - g.x(i);
    jf.u[i] = u;
    jf.ub[i] = 0.5 * (t + g.x(i)) - 0.5 * psi_integral_sq(profile, u);
    const double s1 = psi_derivative(profile, 1, u);
    jf.psi1[i] = s1;
    jf.psi2[i] = psi_derivative(profile, 2, u);
    jf.phi0[i] = snapshot.phi[i] - psi_value(profile, u);
    vp[i] = snapshot.v[i] - s1;
    wp[i] = snapshot.w[i] + s1;
    const double c = 0.5 * (s1 * s1 + 1.0);
    jf.q[i] = vp[i] + wp[i];
    jf.p[i] = c * vp[i] + (c - 1.0) * wp[i];
  }
  if (order < 2) return jf;

  jf.puu.resize(n);
  jf.pub.resize(n);
  jf.qubub.resize(n);
  const GhostSource ghost{&profile, &snapshot};
  const auto vat = [&](int i) { return (i < 0 || i >= n) ? ghost.v(i) : snapshot.v[i]; };
  const auto wat = [&](int i) { return (i < 0 || i >= n) ? ghost.w(i) : snapshot.w[i]; };
  for (int i = 0; i < n; ++i) {
    const double v = snapshot.v[i], w = snapshot.w[i];
    const double vx = dx1(vat, i, g.dx, fd_order);
    const double wx = dx1(wat, i, g.dx, fd_order);
    const double vt = (2.0 * v * w * vx + (1.0 - v * v) * wx) / (1.0 + w * w);
    const double s1 = jf.psi1[i], s2 = jf.psi2[i];
    // second (t,x)-derivatives of the perturbation
    const double ptt = vt - s2;
    const double ptx = vx + s2;
    const double pxx = wx - s2;
    const double cp = 0.5 * (s1 * s1 + 1.0);
    const double cm = 0.5 * (s1 * s1 - 1.0);
    jf.qubub[i] = ptt + 2.0 * ptx + pxx;
    jf.pub[i] = cp * (ptt + ptx) + cm * (ptx + pxx);
    jf.puu[i] = cp * cp * ptt + 2.0 * cp * cm * ptx + cm * cm * pxx + s1 * s2 * jf.q[i];
  }
  return jf;
}

double flux_form_residual(const History& h, int snap_index, int x_lo, int x_hi) {
  if (snap_index < 2 || snap_index + 2 >= static_cast<int>(h.snaps.size())) {
    throw RegionError("flux_form_residual needs two snapshots on each side");
  }
  const double dts = h.snaps[snap_index + 1].grid.t - h.snaps[snap_index].grid.t;
  const auto flux_v = [&](int k, int i) {
    const GridState& s = h.snaps[k];
    const double D = 1.0 + s.w[i] * s.w[i] - s.v[i] * s.v[i];
    return s.v[i] / std::sqrt(D);
  };
  const GridState& s0 = h.snaps[snap_index];
  const auto flux_w = [&](int i) {
    const double D = 1.0 + s0.w[i] * s0.w[i] - s0.v[i] * s0.v[i];
    return s0.w[i] / std::sqrt(D);
  };
  double worst = 0.0;
  for (int i = std::max(2, x_lo); i <= std::min(s0.grid.n - 3, x_hi); ++i) {
    const double dvt = (8.0 * (flux_v(snap_index + 1, i) - flux_v(snap_index - 1, i)) -
                        (flux_v(snap_index + 2, i) - flux_v(snap_index - 2, i))) /
                       (12.0 * dts);
    const double dwx =
        (8.0 * (flux_w(i + 1) - flux_w(i - 1)) - (flux_w(i + 2) - flux_w(i - 2))) /
        (12.0 * s0.grid.dx);
    worst = std::max(worst, std::abs(dvt - dwx));
  }
  return worst;
}

ConvergenceResult convergence_study(
    const std::function<GridState(const Grid&)>& build_initial,
    const PlaneWaveProfile& profile, double x_min, double x_max, int n0,
    const SolverConfig& cfg, int refinements,
    const std::vector<std::pair<std::string, std::function<double(const History&)>>>&
        extra_functionals) {
  if (refinements < 3) throw std::invalid_argument("need >= 3 refinements");

  std::vector<History> runs;
  std::vector<int> ns;
  for (int k = 0; k < refinements; ++k) {
    const int n = (n0 - 1) * (1 << k) + 1;
    ns.push_back(n);
    Grid g = Grid::uniform(x_min, x_max, n);
    runs.push_back(evolve(build_initial(g), profile, cfg));
  }

  ConvergenceResult out;

  // solution error vs finest at final time, on shared (coarse) nodes inside
  // the window the boundary pad cannot influence
  {
    ConvergenceRow row;
    row.quantity = "solution_error_vs_finest";
    const GridState& fine = runs.back().snaps.back();
    double scale = 1e-300;
    for (double x : fine.phi) scale = std::max(scale, std::abs(x));
    const double margin = cfg.t_end + 2.0;
    for (int k = 0; k + 1 < refinements; ++k) {
      const GridState& s = runs[k].snaps.back();
      const int stride = 1 << (refinements - 1 - k);
      double err = 0.0;
      for (int i = 0; i < ns[k]; ++i) {
        const double x = s.grid.x(i);
        if (x < x_min + margin || x > x_max - margin) continue;
        err = std::max(err, std::abs(s.phi[i] - fine.phi[i * stride]));
      }
      row.values.push_back(err);
    }
    row.exact = row.values.back() < 1e-13 * std::max(1.0, scale);
    if (!row.exact && row.values.size() >= 2) {
      const auto& v = row.values;
      row.observed_order = std::log2(v[v.size() - 2] / v[v.size() - 1]);
    }
    out.rows.push_back(row);
  }

  // flux-form residual at mid-history over the interior window
  {
    ConvergenceRow row;
    row.quantity = "flux_form_residual";
    for (int k = 0; k < refinements; ++k) {
      const int mid = static_cast<int>(runs[k].snaps.size()) / 2;
      const int n = ns[k];
      row.values.push_back(flux_form_residual(runs[k], mid, n / 8, n - n / 8));
    }
    row.exact = row.values.back() < 1e-14;
    if (!row.exact) {
      const auto& v = row.values;
      row.observed_order = std::log2(v[v.size() - 2] / v[v.size() - 1]);
    }
    out.rows.push_back(row);
  }

  for (const auto& [name, fn] : extra_functionals) {
    ConvergenceRow row;
    row.quantity = name;
    for (int k = 0; k < refinements; ++k) row.values.push_back(fn(runs[k]));
    row.exact = std::abs(row.values.back()) < 1e-14;
    if (!row.exact) {
      const auto& v = row.values;
      row.observed_order =
          std::log2(std::abs(v[v.size() - 2]) / std::abs(v[v.size() - 1]));
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace pwave
