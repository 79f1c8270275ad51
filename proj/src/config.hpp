#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "model.hpp"
#include "solver.hpp"
#include "spectral.hpp"

namespace tme {

enum class Scenario {
  no_turing_scan,
  oneway_suppression,
  twoway_criteria,
  twoway_simulate,
  core_longtime,
  schur_verify,
  d_oracle_check,
  weyl_check,
};

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct ScanConfig {
  int pairs = 10;
  double d_lo = 1e-3;
  double d_hi = 10.0;
};

struct SpectralConfig {
  double lambda_min = 1e-4;
  double lambda_max = 1e6;
  int points = 400;
  int k_max = 50;
};

struct OnewayConfig {
  int n_random = 1000;
  int check_modes = 6;  // verify decay of ranks 2..check_modes
};

struct SchurConfig {
  int n_configs = 100;
  int n_mu = 20;
  double mu_radius = 10.0;
  double lambda = 4.0;  // mode eigenvalue for the deterministic instance
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
};

struct DOracleConfig {
  int refine = 2;
  std::vector<int> modes{0, 1, 3};
  std::vector<double> coeffs{0.3, 0.5, 0.2};
  double compare_t = 0.5;
};

struct OdeConfig {
  double S0 = 8.0;
  double R0 = 0.5;
  double t_end = 60.0;
  double dt = 0.01;
  int random_starts = 100;
  double random_t_end = 100.0;
};

struct ChecksConfig {
  double growth_rtol = 0.10;
  double residual_bound = 1e-4;   // coupling-norm sum by run end
  double ode_tol = 1e-6;
  double pde_tol = 1e-3;
  double gap_bound = 1e-4;        // oracle gap at the base grid
  double refine_factor = 3.5;
  double weyl_ratio_bound = 4.0;
  double schur_scale = 1e-10;
  double order_min = 0.9;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::no_turing_scan;
  uint64_t seed = 1;
  std::string out_dir = "out";

  ModelParams model;
  SignalCoupling coupling;
  SpatialDomain domain{1, 3.14159265358979323846, 3.14159265358979323846};
  int nx = 256;
  int ny = 64;
  SolverConfig solver;

  SpectralConfig spectral;
  ScanConfig scan;
  OnewayConfig oneway;
  SchurConfig schur;
  DOracleConfig doracle;
  OdeConfig ode;
  ChecksConfig checks;

  // Canonical key = value echo of every key relevant to the scenario, with
  // defaults resolved; re-parsing the echo reproduces the config.
  std::string echo() const;
};

// Total parse: every failure is a ConfigError naming key and line.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text);

}  // namespace tme
