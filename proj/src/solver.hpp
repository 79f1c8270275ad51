#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grid.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace tme {

enum class Variant { core, oneway, twoway_full, twoway_reduced };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

// Gridded fields. c is carried only by the signal variants.
struct FieldState {
  double t = 0.0;
  std::vector<double> S, R, D, P, A, c;

  bool has_c() const { return !c.empty(); }
};

// One cosine term amp * cos(m pi x / Lx) (times cos(n pi y / Ly) in 2D).
struct ModeSeed {
  int m = 0;
  int n = 0;
  double amp = 0.0;
};

struct FieldInit {
  double base = 0.0;
  std::vector<ModeSeed> modes;
  bool noise = false;  // add seeded uniform noise to this field
};

struct InitRecipe {
  FieldInit S, R, D, P, A, c;
  double noise_amp = 0.0;
  uint64_t seed = 1;
};

struct SolverConfig {
  Variant variant = Variant::core;
  double dt = 0.0;          // <= 0 selects the stability-bound step
  double t_end = 1.0;
  double snapshot_dt = 0.0;  // <= 0 selects t_end / 100
  double cfl_safety = 0.4;
  InitRecipe init;
};

struct RunRecord {
  Grid grid;
  Variant variant = Variant::core;
  double dt = 0.0;
  size_t steps = 0;
  std::vector<FieldState> snapshots;
  bool completed = false;
  std::string status;  // "completed" or the divergence message
};

// Second-order centered Laplacian with reflected ghost cells (zero flux).
std::vector<double> laplacian_neumann(std::span<const double> field, const Grid& grid);

// -div(chi * pop * grad cue) in conservative face-flux form; fluxes use the
// arithmetic face mean of pop and vanish on boundary faces.
std::vector<double> chemotaxis_divergence(std::span<const double> pop,
                                          std::span<const double> cue, double chi,
                                          const Grid& grid);

// Explicit RK4 method-of-lines stepper for one model variant. Owns its stage
// buffers; a stepper serves exactly one run at a time.
class Stepper {
 public:
  Stepper(const Grid& grid, const ModelParams& params, const SignalCoupling& coupling,
          Variant variant);

  // One RK4 step; throws DivergenceError on non-finite values or negative
  // excursions beyond 1e-9 (no clamping).
  void step(FieldState& state, double dt);

  // safety * dx^2 / (2 N d_max), intersected with the advection bound when
  // chemotaxis is active for the given state.
  double auto_dt(const FieldState& state, double safety) const;

  const Equilibrium& equilibrium() const { return eq_; }

 private:
  struct Deriv {
    std::vector<double> S, R, D, P, A, c;
  };

  void rhs(const FieldState& s, Deriv& out);
  void check_health(const FieldState& s) const;

  Grid grid_;
  ModelParams params_;
  SignalCoupling coupling_;
  Variant variant_;
  Equilibrium eq_;
  bool evolves_dpa_ = true;
  bool has_c_ = false;

  Deriv k1_, k2_, k3_, k4_;
  FieldState work_;
  std::vector<double> lap_, chem_, gfield_;
};

FieldState make_initial_state(const Grid& grid, Variant variant, const InitRecipe& init);

// Exact truncated-series solution of the decoupled damped diffusion equation,
// evaluated on the grid.
std::vector<double> spectral_D_oracle(const std::vector<std::pair<EigenMode, double>>& coeffs,
                                      const ModelParams& params, double t, const Grid& grid);

// Deterministic fixed-step run with snapshots at the configured cadence.
// A divergence is recorded in the returned record (last healthy snapshot
// retained, completed = false) rather than thrown.
RunRecord run_simulation(const Grid& grid, const ModelParams& params,
                         const SignalCoupling& coupling, const SolverConfig& config);

}  // namespace tme
