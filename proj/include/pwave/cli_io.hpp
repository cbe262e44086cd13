#pragma once

#include <string>
#include <vector>

#include "pwave/background.hpp"
#include "pwave/initdata.hpp"
#include "pwave/solver.hpp"

namespace pwave {

enum class Experiment {
  kVerify,
  kSimulate,
  kEnergies,
  kConvergence,
  kScaling,
  kDecay,
  kDataCheck
};

std::string to_string(Experiment e);
bool experiment_from_string(const std::string& s, Experiment* out);

struct DiagnosticsConfig {
  int k_max = 1;
  int region_ladder = 9;          // number of cut values spanning the data support
  std::vector<double> segments;   // explicit null-segment cuts (optional)
};

struct RunConfig {
  PlaneWaveProfile background = PlaneWaveProfile::gaussian(0.2, 2.0);
  WeightParams weights{};
  SeedProfiles seeds;
  double x_min = -120.0, x_max = 120.0;
  int n = 4096;
  SolverConfig solver{};
  DiagnosticsConfig diagnostics{};
  Experiment experiment = Experiment::kVerify;
  std::string output_dir = "out";
  unsigned long long rng_seed = 12345;

  Grid grid() const { return Grid::uniform(x_min, x_max, n); }
};

// Parses and validates; on validation failure fills `errors` with one entry
// per violated constraint (field path + constraint) and returns false.
bool load_config(const std::string& path, RunConfig* out, std::vector<std::string>* errors);
std::string save_config(const RunConfig& cfg);  // canonical JSON text
unsigned long long config_hash(const RunConfig& cfg);

// Exit codes: 0 pass, 2 validation failure, 3 runtime guard, 4 acceptance failure.
int run(const RunConfig& cfg);

// 17-significant-digit, locale-independent float formatting for CSV cells.
std::string fmt17(double v);

}  // namespace pwave
