#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "errors.hpp"

namespace tme {

namespace {

void laplacian_into(std::span<const double> f, const Grid& g, std::vector<double>& out) {
  if (f.size() != g.cells()) throw std::invalid_argument("laplacian: field/grid size mismatch");
  out.resize(f.size());
  const int nx = g.nx, ny = g.ny;
  const double inv_dx2 = 1.0 / (g.dx * g.dx);
  if (g.domain.dimension == 1) {
    for (int i = 0; i < nx; ++i) {
      const double left = f[static_cast<size_t>(i == 0 ? 0 : i - 1)];
      const double right = f[static_cast<size_t>(i == nx - 1 ? nx - 1 : i + 1)];
      out[static_cast<size_t>(i)] = (left - 2.0 * f[static_cast<size_t>(i)] + right) * inv_dx2;
    }
    return;
  }
  const double inv_dy2 = 1.0 / (g.dy * g.dy);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const size_t id = g.idx(i, j);
      const double v = f[id];
      const double xl = f[g.idx(i == 0 ? 0 : i - 1, j)];
      const double xr = f[g.idx(i == nx - 1 ? nx - 1 : i + 1, j)];
      const double yl = f[g.idx(i, j == 0 ? 0 : j - 1)];
      const double yr = f[g.idx(i, j == ny - 1 ? ny - 1 : j + 1)];
      out[id] = (xl - 2.0 * v + xr) * inv_dx2 + (yl - 2.0 * v + yr) * inv_dy2;
    }
  }
}

void chemotaxis_into(std::span<const double> pop, std::span<const double> cue, double chi,
                     const Grid& g, std::vector<double>& out) {
  if (pop.size() != g.cells() || cue.size() != g.cells()) {
    throw std::invalid_argument("chemotaxis: field/grid size mismatch");
  }
  if (chi < 0.0) throw std::domain_error("chemotaxis: chi must be >= 0");
  out.assign(pop.size(), 0.0);
  if (chi == 0.0) return;
  const int nx = g.nx, ny = g.ny;
  const double inv_dx = 1.0 / g.dx;
  if (g.domain.dimension == 1) {
    // Interior face flux q_{i+1/2} = chi * mean(pop) * (cue_{i+1} - cue_i)/dx;
    // boundary faces carry zero flux. Output is -(flux divergence).
    double q_left = 0.0;
    for (int i = 0; i < nx; ++i) {
      double q_right = 0.0;
      if (i < nx - 1) {
        q_right = chi * 0.5 * (pop[static_cast<size_t>(i)] + pop[static_cast<size_t>(i + 1)]) *
                  (cue[static_cast<size_t>(i + 1)] - cue[static_cast<size_t>(i)]) * inv_dx;
      }
      out[static_cast<size_t>(i)] = -(q_right - q_left) * inv_dx;
      q_left = q_right;
    }
    return;
  }
  const double inv_dy = 1.0 / g.dy;
  for (int j = 0; j < ny; ++j) {
    double q_left = 0.0;
    for (int i = 0; i < nx; ++i) {
      double q_right = 0.0;
      if (i < nx - 1) {
        q_right = chi * 0.5 * (pop[g.idx(i, j)] + pop[g.idx(i + 1, j)]) *
                  (cue[g.idx(i + 1, j)] - cue[g.idx(i, j)]) * inv_dx;
      }
      out[g.idx(i, j)] -= (q_right - q_left) * inv_dx;
      q_left = q_right;
    }
  }
  for (int i = 0; i < nx; ++i) {
    double q_down = 0.0;
    for (int j = 0; j < ny; ++j) {
      double q_up = 0.0;
      if (j < ny - 1) {
        q_up = chi * 0.5 * (pop[g.idx(i, j)] + pop[g.idx(i, j + 1)]) *
               (cue[g.idx(i, j + 1)] - cue[g.idx(i, j)]) * inv_dy;
      }
      out[g.idx(i, j)] -= (q_up - q_down) * inv_dy;
      q_down = q_up;
    }
  }
}

void axpy(std::vector<double>& dst, const std::vector<double>& y, double a,
          const std::vector<double>& k) {
  dst.resize(y.size());
  for (size_t i = 0; i < y.size(); ++i) dst[i] = y[i] + a * k[i];
}

void rk4_combine(std::vector<double>& y, double h6, const std::vector<double>& k1,
                 const std::vector<double>& k2, const std::vector<double>& k3,
                 const std::vector<double>& k4) {
  for (size_t i = 0; i < y.size(); ++i) {
    y[i] += h6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  }
}

double max_face_gradient(std::span<const double> cue, const Grid& g) {
  double vmax = 0.0;
  const int nx = g.nx, ny = g.ny;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      vmax = std::max(vmax, std::abs(cue[g.idx(i + 1, j)] - cue[g.idx(i, j)]) / g.dx);
    }
  }
  if (g.domain.dimension == 2) {
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j + 1 < ny; ++j) {
        vmax = std::max(vmax, std::abs(cue[g.idx(i, j + 1)] - cue[g.idx(i, j)]) / g.dy);
      }
    }
  }
  return vmax;
}

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::core: return "core";
    case Variant::oneway: return "oneway";
    case Variant::twoway_full: return "twoway_full";
    case Variant::twoway_reduced: return "twoway_reduced";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& s) {
  if (s == "core") return Variant::core;
  if (s == "oneway") return Variant::oneway;
  if (s == "twoway_full") return Variant::twoway_full;
  if (s == "twoway_reduced") return Variant::twoway_reduced;
  throw std::domain_error("unknown model variant: " + s);
}

std::vector<double> laplacian_neumann(std::span<const double> field, const Grid& grid) {
  std::vector<double> out;
  laplacian_into(field, grid, out);
  return out;
}

std::vector<double> chemotaxis_divergence(std::span<const double> pop,
                                          std::span<const double> cue, double chi,
                                          const Grid& grid) {
  std::vector<double> out;
  chemotaxis_into(pop, cue, chi, grid, out);
  return out;
}

Stepper::Stepper(const Grid& grid, const ModelParams& params, const SignalCoupling& coupling,
                 Variant variant)
    : grid_(grid), params_(params), coupling_(coupling), variant_(variant) {
  params_.validate();
  eq_ = coexistence_equilibrium(params_);
  evolves_dpa_ = variant == Variant::core || variant == Variant::oneway;
  has_c_ = variant == Variant::oneway || variant == Variant::twoway_full;
  if (variant == Variant::twoway_full && !(coupling_.q < 0.0)) {
    throw std::domain_error("Stepper: twoway_full requires q < 0");
  }
  const size_t n = grid_.cells();
  lap_.reserve(n);
  chem_.reserve(n);
  gfield_.reserve(n);
}

void Stepper::rhs(const FieldState& s, Deriv& out) {
  const size_t n = grid_.cells();
  const ModelParams& p = params_;

  laplacian_into(s.S, grid_, out.S);
  laplacian_into(s.R, grid_, out.R);

  // Chemotactic cue: the c field for the signal variants, the affine local
  // closure g(S,R) = g*_S (S - S*) + g*_R (R - R*) for the reduced variant.
  std::span<const double> cue;
  bool transport = false;
  if (variant_ == Variant::oneway || variant_ == Variant::twoway_full) {
    cue = s.c;
    transport = coupling_.chi_S > 0.0 || coupling_.chi_R > 0.0;
  } else if (variant_ == Variant::twoway_reduced) {
    gfield_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      gfield_[i] = coupling_.g_S_star * (s.S[i] - eq_.S_star) +
                   coupling_.g_R_star * (s.R[i] - eq_.R_star);
    }
    cue = gfield_;
    transport = coupling_.chi_S > 0.0 || coupling_.chi_R > 0.0;
  }

  if (transport && coupling_.chi_S > 0.0) {
    chemotaxis_into(s.S, cue, coupling_.chi_S, grid_, chem_);
    for (size_t i = 0; i < n; ++i) out.S[i] = p.d_S * out.S[i] + chem_[i];
  } else {
    for (size_t i = 0; i < n; ++i) out.S[i] *= p.d_S;
  }
  if (transport && coupling_.chi_R > 0.0) {
    chemotaxis_into(s.R, cue, coupling_.chi_R, grid_, chem_);
    for (size_t i = 0; i < n; ++i) out.R[i] = p.d_R * out.R[i] + chem_[i];
  } else {
    for (size_t i = 0; i < n; ++i) out.R[i] *= p.d_R;
  }

  if (evolves_dpa_) {
    laplacian_into(s.D, grid_, out.D);
    out.P.resize(n);
    out.A.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const double S = s.S[i], R = s.R[i], D = s.D[i], P = s.P[i], A = s.A[i];
      const double phi = D / (D + p.K_phi);
      const double del = p.delta0 * D / (D + p.K_D);
      const double logistic = 1.0 - (S + R) / p.K;
      out.S[i] += p.lambda_S * S * logistic - p.alpha * S - del * S + p.xi * (1.0 - phi) * R;
      out.R[i] += p.lambda_R * R * logistic + p.alpha * S + p.eta * phi * A * R -
                  p.xi * (1.0 - phi) * R;
      out.D[i] = p.d_D * out.D[i] - p.gamma_d * D;
      // One switching flux, used with opposite signs: stage increments of P
      // and A cancel exactly.
      const double w = p.theta * phi * P - p.beta * (1.0 - phi) * A;
      out.P[i] = -w;
      out.A[i] = w;
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      const double S = s.S[i], R = s.R[i];
      const double logistic = 1.0 - (S + R) / p.K;
      out.S[i] += p.lambda_S * S * logistic - p.alpha * S + p.xi * R;
      out.R[i] += p.lambda_R * R * logistic + p.alpha * S - p.xi * R;
    }
  }

  if (has_c_) {
    laplacian_into(s.c, grid_, out.c);
    if (variant_ == Variant::oneway) {
      for (size_t i = 0; i < n; ++i) {
        out.c[i] = coupling_.d_c * out.c[i] + coupling_.kappa * s.A[i] - coupling_.rho * s.c[i];
      }
    } else {
      for (size_t i = 0; i < n; ++i) {
        const double h = coupling_.h_S_star * (s.S[i] - eq_.S_star) +
                         coupling_.h_R_star * (s.R[i] - eq_.R_star);
        out.c[i] = coupling_.d_c * out.c[i] + coupling_.q * s.c[i] + h;
      }
    }
  }
}

void Stepper::check_health(const FieldState& s) const {
  struct Probe {
    const char* name;
    const std::vector<double>* v;
    bool positivity;
  };
  std::vector<Probe> probes = {{"S", &s.S, true}, {"R", &s.R, true}};
  if (evolves_dpa_) {
    probes.push_back({"D", &s.D, true});
    probes.push_back({"P", &s.P, true});
    probes.push_back({"A", &s.A, true});
  }
  if (has_c_) probes.push_back({"c", &s.c, false});

  for (const Probe& pr : probes) {
    int bad = 0;
    if (pr.positivity) {
      for (double v : *pr.v) bad |= !(v >= -1e-9);
    } else {
      for (double v : *pr.v) bad |= !std::isfinite(v);
    }
    if (!bad) continue;
    for (size_t i = 0; i < pr.v->size(); ++i) {
      const double v = (*pr.v)[i];
      if (!std::isfinite(v)) {
        throw DivergenceError(pr.name, i, s.t,
                              std::string("non-finite value in field ") + pr.name + " at cell " +
                                  std::to_string(i));
      }
      if (pr.positivity && v < -1e-9) {
        throw DivergenceError(pr.name, i, s.t,
                              std::string("negative excursion in field ") + pr.name +
                                  " at cell " + std::to_string(i) + " (dt too large)");
      }
    }
  }
}

void Stepper::step(FieldState& state, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("Stepper::step: dt must be > 0");
  const double half = 0.5 * dt, h6 = dt / 6.0;

  auto eval_shift = [&](const Deriv& k, double a, Deriv& kout) {
    axpy(work_.S, state.S, a, k.S);
    axpy(work_.R, state.R, a, k.R);
    if (evolves_dpa_) {
      axpy(work_.D, state.D, a, k.D);
      axpy(work_.P, state.P, a, k.P);
      axpy(work_.A, state.A, a, k.A);
    } else {
      work_.D = state.D;
      work_.P = state.P;
      work_.A = state.A;
    }
    if (has_c_) axpy(work_.c, state.c, a, k.c);
    rhs(work_, kout);
  };

  rhs(state, k1_);
  eval_shift(k1_, half, k2_);
  eval_shift(k2_, half, k3_);
  eval_shift(k3_, dt, k4_);

  rk4_combine(state.S, h6, k1_.S, k2_.S, k3_.S, k4_.S);
  rk4_combine(state.R, h6, k1_.R, k2_.R, k3_.R, k4_.R);
  if (evolves_dpa_) {
    rk4_combine(state.D, h6, k1_.D, k2_.D, k3_.D, k4_.D);
    rk4_combine(state.P, h6, k1_.P, k2_.P, k3_.P, k4_.P);
    rk4_combine(state.A, h6, k1_.A, k2_.A, k3_.A, k4_.A);
  }
  if (has_c_) rk4_combine(state.c, h6, k1_.c, k2_.c, k3_.c, k4_.c);

  check_health(state);
}

double Stepper::auto_dt(const FieldState& state, double safety) const {
  if (!(safety > 0.0)) throw std::domain_error("auto_dt: safety must be > 0");
  double d_max = std::max(params_.d_S, params_.d_R);
  if (evolves_dpa_) d_max = std::max(d_max, params_.d_D);
  if (has_c_) d_max = std::max(d_max, coupling_.d_c);

  const int dim = grid_.domain.dimension;
  const double h = dim == 2 ? std::min(grid_.dx, grid_.dy) : grid_.dx;
  double dt = safety * h * h / (2.0 * static_cast<double>(dim) * d_max);

  const double chi_max = std::max(coupling_.chi_S, coupling_.chi_R);
  if (variant_ != Variant::core && chi_max > 0.0) {
    std::vector<double> gfield;
    std::span<const double> cue;
    if (variant_ == Variant::twoway_reduced) {
      gfield.resize(grid_.cells());
      for (size_t i = 0; i < gfield.size(); ++i) {
        gfield[i] = coupling_.g_S_star * (state.S[i] - eq_.S_star) +
                    coupling_.g_R_star * (state.R[i] - eq_.R_star);
      }
      cue = gfield;
    } else {
      cue = state.c;
    }
    const double speed = chi_max * max_face_gradient(cue, grid_);
    if (speed > 0.0) dt = std::min(dt, safety * h / speed);
  }
  return dt;
}

FieldState make_initial_state(const Grid& grid, Variant variant, const InitRecipe& init) {
  const size_t n = grid.cells();
  const bool has_c = variant == Variant::oneway || variant == Variant::twoway_full;

  FieldState s;
  s.t = 0.0;

  auto fill = [&](const FieldInit& fi, std::vector<double>& v) {
    v.assign(n, fi.base);
    for (const ModeSeed& seed : fi.modes) {
      if (seed.amp == 0.0) continue;
      for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
          double w = std::cos(static_cast<double>(seed.m) * std::numbers::pi * grid.x(i) /
                              grid.domain.Lx);
          if (grid.domain.dimension == 2) {
            w *= std::cos(static_cast<double>(seed.n) * std::numbers::pi * grid.y(j) /
                          grid.domain.Ly);
          }
          v[grid.idx(i, j)] += seed.amp * w;
        }
      }
    }
  };

  fill(init.S, s.S);
  fill(init.R, s.R);
  fill(init.D, s.D);
  fill(init.P, s.P);
  fill(init.A, s.A);
  if (has_c) fill(init.c, s.c);

  if (init.noise_amp > 0.0) {
    std::mt19937_64 rng(init.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto sprinkle = [&](const FieldInit& fi, std::vector<double>& v) {
      if (!fi.noise) return;
      for (double& x : v) x += init.noise_amp * u(rng);
    };
    sprinkle(init.S, s.S);
    sprinkle(init.R, s.R);
    sprinkle(init.D, s.D);
    sprinkle(init.P, s.P);
    sprinkle(init.A, s.A);
    if (has_c) sprinkle(init.c, s.c);
  }
  return s;
}

std::vector<double> spectral_D_oracle(const std::vector<std::pair<EigenMode, double>>& coeffs,
                                      const ModelParams& params, double t, const Grid& grid) {
  for (const auto& [mode, ck] : coeffs) {
    if (!std::isfinite(ck)) throw std::domain_error("spectral_D_oracle: non-finite coefficient");
  }
  std::vector<double> out(grid.cells(), 0.0);
  for (const auto& [mode, ck] : coeffs) {
    const double decay = std::exp(-(params.d_D * mode.lambda + params.gamma_d) * t);
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const double w = grid.domain.dimension == 2 ? mode.eval(grid.x(i), grid.y(j))
                                                    : mode.eval(grid.x(i));
        out[grid.idx(i, j)] += ck * decay * w;
      }
    }
  }
  return out;
}

RunRecord run_simulation(const Grid& grid, const ModelParams& params,
                         const SignalCoupling& coupling, const SolverConfig& config) {
  if (!(config.t_end > 0.0)) throw std::domain_error("run_simulation: t_end must be > 0");

  RunRecord rec;
  rec.grid = grid;
  rec.variant = config.variant;

  Stepper stepper(grid, params, coupling, config.variant);
  FieldState state = make_initial_state(grid, config.variant, config.init);

  const double dt = config.dt > 0.0 ? config.dt : stepper.auto_dt(state, config.cfl_safety);
  rec.dt = dt;
  const double snap_dt = config.snapshot_dt > 0.0 ? config.snapshot_dt : config.t_end / 100.0;
  const size_t stride = std::max<size_t>(1, static_cast<size_t>(std::llround(snap_dt / dt)));
  const auto n_steps = static_cast<size_t>(std::ceil(config.t_end / dt - 1e-9));

  rec.snapshots.push_back(state);
  for (size_t n = 1; n <= n_steps; ++n) {
    const double h = n < n_steps ? dt : config.t_end - dt * static_cast<double>(n_steps - 1);
    try {
      stepper.step(state, h);
    } catch (const DivergenceError& e) {
      rec.status = e.what();
      rec.completed = false;
      rec.steps = n - 1;
      return rec;
    }
    state.t = n < n_steps ? dt * static_cast<double>(n) : config.t_end;
    if (n % stride == 0 || n == n_steps) rec.snapshots.push_back(state);
  }
  rec.steps = n_steps;
  rec.completed = true;
  rec.status = "completed";
  return rec;
}

}  // namespace tme
