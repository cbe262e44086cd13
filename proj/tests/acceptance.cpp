// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pwave/cli_io.hpp"
#include "pwave/diagnostics.hpp"
#include "pwave/eqforms.hpp"
#include "pwave/initdata.hpp"

using namespace pwave;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

History run_case(const PlaneWaveProfile& prof, const SeedProfiles& seeds, double x_min,
                 double x_max, int n, double t_end, int stride, int fd_order = 4) {
  SolverConfig cfg;
  cfg.t_end = t_end;
  cfg.snapshot_stride = stride;
  cfg.fd_order = fd_order;
  const Grid g = Grid::uniform(x_min, x_max, n);
  return evolve(to_state(build_data(seeds, prof, g), prof), prof, cfg);
}

double sup_abs_q(const History& h, int margin) {
  double worst = 0.0;
  for (const auto& snap : h.snaps) {
    const JetField j = extract_jets(snap, h.profile, 1, h.cfg.fd_order);
    for (int i = j.first_valid() + margin; i <= j.last_valid() - margin; ++i) {
      worst = std::max(worst, std::abs(j.q[i]));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------

void criterion_1_identities() {
  const double t0 = now_s();
  IdentitySuiteConfig cfg;
  cfg.n_points = 2800;  // >= 1000 samples per identity row after field split
  const ResidualReport rep = run_identity_suite(
      analytic_catalog(PlaneWaveProfile::gaussian(0.2, 2.0)), cfg);
  const double dt = now_s() - t0;
  bool pass = rep.all_pass() && dt <= 10.0;
  std::ostringstream os;
  os << "worst rows:";
  double worst = 0.0;
  std::string worst_name;
  for (const auto& r : rep.rows) {
    if (!r.pass) pass = false;
    if (r.max_rel > worst) {
      worst = r.max_rel;
      worst_name = r.name;
    }
  }
  os << " max_rel " << worst << " (" << worst_name << "), runtime " << dt << " s";
  report(1, "identity suite ID-A..ID-G + geometry invariants", pass, os.str());
}

void criterion_2_exact_solutions() {
  const double t0 = now_s();
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  bool pass = true;
  std::ostringstream os;
  for (int which = 0; which < 2; ++which) {
    SeedProfiles seeds;
    if (which == 1) seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
    double e[2], dx4[2];
    int idx = 0;
    for (int n : {2048, 4096}) {
      const History h = run_case(prof, seeds, -120.0, 120.0, n, 40.0, 64);
      const int margin = static_cast<int>(std::ceil(40.0 / h.snaps[0].grid.dx));
      e[idx] = sup_abs_q(h, margin);
      const double dx = h.snaps[0].grid.dx;
      dx4[idx] = dx * dx * dx * dx;
      ++idx;
    }
    // C from the coarse run bounds the fine run (stability of the constant)
    const double C = std::max(e[0] / dx4[0], 1e-6);
    const bool ok = e[1] <= 2.0 * C * dx4[1];
    pass = pass && ok;
    os << (which == 0 ? "plane-wave-only" : "left-mover") << " sup|L phi|=" << e[1] << "; ";
  }
  const double dt = now_s() - t0;
  pass = pass && dt <= 120.0;
  os << "runtime " << dt << " s";
  report(2, "exact-solution preservation within C dx^4 (t <= 40, n = 4096)", pass, os.str());
}

void criterion_3_linearization() {
  // The whole data family scales with delta (fbar amplitude = delta/2), so the
  // amplitude-normalized deviation from the linear-wave solution is a clean
  // delta^2 quantity. With fbar = 0 the construction degenerates to an exact
  // travelling wave for which the deviation vanishes identically.
  const auto flat = PlaneWaveProfile::zero();
  const double sf = 1.2, sb = 1.0, T = 3.0;
  const auto err_over_delta = [&](double delta) {
    SeedProfiles seeds;
    seeds.f = SeedProfile::gaussian(1.0, sf);
    seeds.fbar = SeedProfile::gaussian(0.5 * delta, sb);
    seeds.delta = delta;
    const History h = run_case(flat, seeds, -30.0, 30.0, 4097, T, 16);
    const auto primf = [&](double x) {
      return sf * std::sqrt(M_PI / 2.0) * std::erf(x / (sf * M_SQRT2));
    };
    const auto primb = [&](double x) {
      return sb * std::sqrt(M_PI / 2.0) * std::erf(x / (sb * M_SQRT2));
    };
    const auto F = [&](double x) {
      return 0.5 * delta * (primf(x) - primf(-30.0)) -
             0.5 * delta * (primb(x) - primb(-30.0));
    };
    const auto intG = [&](double a, double b) {
      return 0.5 * delta * (primf(b) - primf(a)) + 0.5 * delta * (primb(b) - primb(a));
    };
    double worst = 0.0;
    for (const auto& snap : h.snaps) {
      const double t = snap.grid.t;
      for (int i = 0; i < snap.grid.n; ++i) {
        const double x = snap.grid.x(i);
        if (x < -30.0 + T + 2.0 || x > 30.0 - T - 2.0) continue;
        const double lin = 0.5 * (F(x - t) + F(x + t)) + 0.5 * intG(x - t, x + t);
        worst = std::max(worst, std::abs(snap.phi[i] - lin));
      }
    }
    return worst / delta;
  };
  const double e1 = err_over_delta(0.02);
  const double e2 = err_over_delta(0.01);
  const double ratio = e1 / e2;
  const bool pass = ratio >= 3.4 && ratio <= 4.6;
  std::ostringstream os;
  os << "amplitude-normalized sup errors " << e1 << " / " << e2 << ", halving ratio "
     << ratio;
  report(3, "linearization vs d'Alembert: delta^2 component ratio in [3.4,4.6]", pass,
         os.str());
}

void criterion_4_convergence() {
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  SolverConfig cfg;
  cfg.t_end = 2.0;
  cfg.snapshot_stride = 4;
  const auto build = [&](const Grid& g) {
    SeedProfiles seeds;
    seeds.f = SeedProfile::gaussian(1.0, 1.0);
    seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
    seeds.delta = 0.05;
    return to_state(build_data(seeds, prof, g), prof);
  };
  const ConvergenceResult r = convergence_study(build, prof, -30.0, 30.0, 513, cfg, 3);
  const auto& row = r.rows[0];
  const bool pass = !row.exact && row.observed_order >= 3.5;
  std::ostringstream os;
  os << "observed order " << row.observed_order << " (errors";
  for (double v : row.values) os << ' ' << v;
  os << ")";
  report(4, "solver self-convergence order >= 3.5 on smooth non-small data", pass, os.str());
}

void criterion_5_energy_identity() {
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  SeedProfiles seeds;
  seeds.f = SeedProfile::gaussian(1.0, 1.0);
  seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
  seeds.delta = 0.05;
  WeightParams wp;
  // asymptotic-regime pair (the 513-node level is pre-asymptotic for one combo)
  History coarse = run_case(prof, seeds, -30.0, 30.0, 1025, 2.0, 4);
  History fine = run_case(prof, seeds, -30.0, 30.0, 2049, 2.0, 4);
  bool pass = true;
  std::ostringstream os;
  for (int k = 0; k <= 1; ++k) {
    for (auto xi : {Multiplier::kTL, Multiplier::kTLb}) {
      for (auto region : {RegionKind::kSigmaMinus, RegionKind::kSigmaPlus}) {
        const double cut = 2.0;
        const double rc = std::abs(energy_identity_residual(
            coarse, wp, xi, region, cut, 0.0, coarse.snaps.back().grid.t, k));
        const double rf = std::abs(energy_identity_residual(
            fine, wp, xi, region, cut, 0.0, fine.snaps.back().grid.t, k));
        const double order = std::log2(rc / rf);
        const bool ok = (rc < 1e-13 && rf < 1e-13) || order >= 1.8;
        pass = pass && ok;
        os << "k" << k << (xi == Multiplier::kTL ? "/TL" : "/TLb")
           << (region == RegionKind::kSigmaMinus ? "/id1" : "/id2") << " order "
           << (std::isfinite(order) ? order : 0.0) << "; ";
      }
    }
  }
  report(5, "energy-identity residual self-convergence order >= 1.8", pass, os.str());
}

void criterion_6_hierarchy_scaling() {
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  WeightParams wp;
  const auto runner = [&](double d) {
    SeedProfiles seeds;
    seeds.f = SeedProfile::gaussian(1.0, 1.0);
    seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
    seeds.delta = d;
    return run_case(prof, seeds, -60.0, 60.0, 1025, 8.0, 8);
  };
  std::vector<double> ladder;
  for (int i = -4; i <= 4; ++i) ladder.push_back(static_cast<double>(i));
  const ScalingTable t = scaling_study(runner, {0.02, 0.01}, wp, 1, ladder);
  bool pass = true;
  std::ostringstream os;
  for (int k = 0; k <= 1; ++k) {
    const double rE = t.rows[0].supE2[k] / t.rows[1].supE2[k];
    const double rEb = t.rows[0].supEb2[k] / t.rows[1].supEb2[k];
    const double rF = t.rows[0].supF2[k] / t.rows[1].supF2[k];
    const double rFb = t.rows[0].supFb2[k] / t.rows[1].supFb2[k];
    if (rE < 3.4 || rE > 4.6) pass = false;
    if (std::abs(rEb - 1.0) > 0.10) pass = false;
    if (rF < 3.4 || rF > 4.6) pass = false;
    if (std::abs(rFb - 1.0) > 0.10) pass = false;
    os << "k" << k << ": E " << rE << ", Eb " << rEb << ", F " << rF << ", Fb " << rFb
       << "; ";
  }
  report(6, "hierarchy scaling under delta-halving (E,F ~ delta^2; Eb,Fb ~ 1)", pass,
         os.str());
}

void criterion_7_decay_constants() {
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  WeightParams wp;  // gamma 0.5, eps 0.1
  const auto profile_run = [&](double delta) {
    SeedProfiles seeds;
    seeds.f = SeedProfile::gaussian(1.0, 1.0);
    seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
    seeds.delta = delta;
    const History h = run_case(prof, seeds, -120.0, 120.0, 4096, 40.0, 64);
    const int margin = static_cast<int>(std::ceil(40.0 / h.snaps[0].grid.dx));
    return decay_profile(h, wp, delta, margin);
  };
  const DecayProfile d1 = profile_run(0.01);
  const DecayProfile d2 = profile_run(0.005);
  const auto& row1 = d1.rows[0];
  const double at_t0 = row1.sup_Lbar.front();
  const double sup_all = row1.max_Lbar;
  const bool bounded = sup_all <= 2.0 * at_t0;
  const double c1 = d1.rows[0].max_L;
  const double c2 = d2.rows[0].max_L;
  const bool stable = std::abs(c1 - c2) <= 0.30 * std::max(c1, c2);
  std::ostringstream os;
  os << "sup_t W|Lbar phi| = " << sup_all << " vs 2x t=0 value " << 2.0 * at_t0
     << "; L-constants " << c1 << " / " << c2;
  report(7, "decay-constant boundedness (Lbar bounded, L/delta stable +-30%)",
         bounded && stable, os.str());
}

void criterion_8_persistence() {
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  const auto drift_run = [&](double delta) {
    SeedProfiles seeds;
    seeds.f = SeedProfile::gaussian(1.0, 1.0);
    seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
    seeds.delta = delta;
    const History h = run_case(prof, seeds, -60.0, 60.0, 2049, 10.0, 16);
    return persistence_check(h, [](double) { return 0.0; }, 8).max_drift;
  };
  const double d1 = drift_run(0.01);
  const double d2 = drift_run(0.005);
  const double d0 = drift_run(0.0);
  const double ratio = d1 / d2;
  const bool pass = ratio >= 1.4 && ratio <= 2.6 && d0 < 1e-6;
  std::ostringstream os;
  os << "drift(0.01) = " << d1 << ", drift(0.005) = " << d2 << ", ratio " << ratio
     << ", drift(0) = " << d0;
  report(8, "persistence drift ~ delta along d_ub curves", pass, os.str());
}

void criterion_9_initial_energy() {
  const auto prof = PlaneWaveProfile::gaussian(0.2, 2.0);
  WeightParams wp;
  const Grid g = Grid::uniform(-80.0, 80.0, 4097);
  std::vector<double> rE, rEb;
  for (double delta : {0.02, 0.01, 0.005}) {
    SeedProfiles seeds;
    seeds.f = SeedProfile::gaussian(1.0, 1.0);
    seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
    seeds.delta = delta;
    const InitialEnergyReport r = initial_energy_check(seeds, prof, g, wp, 1);
    rE.push_back(r.ratio_E);
    rEb.push_back(r.ratio_Eb);
  }
  const auto stable = [](const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    const double mid = 0.5 * (lo + hi);
    return (hi - mid) <= 0.15 * mid;
  };
  const bool pass = stable(rE) && stable(rEb);
  std::ostringstream os;
  os << "E ratios " << rE[0] << "/" << rE[1] << "/" << rE[2] << "; Eb ratios " << rEb[0]
     << "/" << rEb[1] << "/" << rEb[2];
  report(9, "initial-energy ratios stable (+-15%) over a 4x delta sweep", pass, os.str());
}

void criterion_10_determinism() {
  RunConfig cfg;
  cfg.experiment = Experiment::kEnergies;
  cfg.x_min = -30;
  cfg.x_max = 30;
  cfg.n = 513;
  cfg.seeds.f = SeedProfile::gaussian(1.0, 1.0);
  cfg.seeds.fbar = SeedProfile::gaussian(0.3, 1.5);
  cfg.seeds.delta = 0.01;
  cfg.solver.t_end = 1.0;
  cfg.solver.snapshot_stride = 8;
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  cfg.output_dir = (fs::temp_directory_path() / "pwave_acc_a").string();
  const int c1 = run(cfg);
  const std::string a = slurp(fs::path(cfg.output_dir) / "energies.csv");
  cfg.output_dir = (fs::temp_directory_path() / "pwave_acc_b").string();
  const int c2 = run(cfg);
  const std::string b = slurp(fs::path(cfg.output_dir) / "energies.csv");
  cfg.output_dir = (fs::temp_directory_path() / "pwave_acc_c").string();
  cfg.solver.threads = 4;
  const int c3 = run(cfg);
  const std::string c = slurp(fs::path(cfg.output_dir) / "energies.csv");
  const bool pass = c1 == 0 && c2 == 0 && c3 == 0 && a == b && a == c && !a.empty();
  report(10, "byte-identical CSVs for identical config+seed, incl. --threads 4", pass,
         pass ? "identical" : "outputs differ");
}

}  // namespace

int main() {
  criterion_1_identities();
  criterion_2_exact_solutions();
  criterion_3_linearization();
  criterion_4_convergence();
  criterion_5_energy_identity();
  criterion_6_hierarchy_scaling();
  criterion_7_decay_constants();
  criterion_8_persistence();
  criterion_9_initial_energy();
  criterion_10_determinism();
  if (g_failures != 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
