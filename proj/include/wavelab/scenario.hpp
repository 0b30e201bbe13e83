#pragma once

#include "wavelab/potential.hpp"
#include "wavelab/report.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace wavelab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probe names accepted in [scenario] probes, in their canonical run order.
const std::vector<std::string>& known_probes();

struct ScenarioConfig {
  std::string name = "default";
  std::uint64_t seed = 1;
  std::string output = "wavelab_out";
  std::vector<std::string> probes;  // empty: every known probe

  int n = 32;
  double L = 16.0;

  PotentialFamily family = PotentialFamily::gaussian;
  double coupling = -0.5;
  double width = 1.0;
  double delta = 5.0;

  double M = 1.0;

  double T = 64.0;
  double eps_factor = 4.0;
  bool richardson = true;
  double dr = 0.25;
  int lmax = 12;
  double l_tol = 1e-5;
  double tail_tol = 1e-3;

  int tl_spectral_pad = 2;

  int nodes_per_panel = 16;
  double cache_budget_mb = 1200.0;
  int st_spectral_pad = 1;

  // routes for the stationary vs time-limit commutator comparison
  int commutator_spectral_pad = 2;
  double commutator_T = 128.0;

  int ensemble_count = 10;  // route agreement, isometry, range, commutator agreement
  int lp_count = 50;        // ratio probes
  int growth_factor = 10;
  double band = 0.0;  // 0: unfiltered packets
  double boundary_tol = 1e-3;
  bool refine_check = true;  // route agreement repeated one refinement up

  int sweep_points = 24;
  double a_min = 1e-2, a_max = 1e2;
  std::vector<std::string> symbols{"constant", "exponential", "resolvent"};
  int symbol_grid_n = 16;
  double symbol_grid_L = 8.0;

  int helmholtz_n = 64;
  double helmholtz_L = 12.0;

  int kernel_pairs = 20;
  int kernel_nodes = 16;

  // key ("section.name") -> line in the source file, for error messages
  std::map<std::string, int> lines;
  std::string origin = "<config>";
};

// Parses the TOML-style subset: [section] headers, key = value with numbers,
// booleans, "strings" and [lists]; '#' starts a comment.  Unknown sections and
// keys are rejected with origin:line messages.  Calls validate().
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

// Throws ConfigError naming the offending key and its line.
void validate(const ScenarioConfig& c);

// Doubles n and L (h fixed), both time horizons and the q-quadrature node
// counts k times.
ScenarioConfig refined(const ScenarioConfig& c, int k);

nlohmann::json config_json(const ScenarioConfig& c);

struct ScenarioResult {
  std::vector<ProbeReport> reports;
  ReportFiles files;
  bool passed = false;
};

// Runs the selected probes (in known_probes() order) and writes the reports
// under out_dir.
ScenarioResult run_scenario(const ScenarioConfig& c, const std::vector<std::string>& probes,
                            const std::filesystem::path& out_dir);

// Individual probes, also used by the acceptance suite.
ProbeReport sphere_probe(std::uint64_t seed, int samples = 401, double r_max = 20.0, double tol = 1e-8);
std::vector<ProbeReport> resolvent_probes(const ScenarioConfig& c);
std::vector<ProbeReport> oscint_probe(const ScenarioConfig& c);
ProbeReport kernel_split_probe(const ScenarioConfig& c);

}  // namespace wavelab
