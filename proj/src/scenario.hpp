#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "diagnostics.hpp"

namespace tme {

struct ScenarioReport {
  DiagnosticsReport checks;
  std::vector<std::string> artifacts;  // paths relative to the output directory
  bool diverged = false;
  std::string status;   // "completed" or the divergence message
  double dt_used = 0.0; // 0 when the scenario runs no PDE
  std::string summary;

  bool all_passed() const { return !diverged && checks.all_pass(); }
};

// Runs one scenario, writing artifacts, checks.csv and manifest.txt under
// cfg.out_dir. Deterministic given config + seed. Config problems throw
// ConfigError before anything is written; numerical divergence is reported
// in the returned record with artifacts retained.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

}  // namespace tme
