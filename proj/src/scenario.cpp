#include "scenario.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "textio.hpp"
#include "version.hpp"

namespace tme {

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  ScenarioReport* report = nullptr;

  fs::path file(const std::string& rel) const { return dir / rel; }
  void note(const std::string& rel) { report->artifacts.push_back(rel); }
};

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

ModelParams random_kinetics(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p;
  p.lambda_S = log_uniform(rng, 0.1, 5.0);
  p.lambda_R = log_uniform(rng, 0.1, 5.0);
  p.K = log_uniform(rng, 1.0, 50.0);
  p.alpha = 0.05 + 2.0 * u(rng);
  p.xi = 0.05 + 2.0 * u(rng);
  return p;
}

void write_dispersion_csv(Workspace& ws, const std::string& rel,
                          const std::vector<std::array<double, 4>>& rows) {
  std::vector<std::vector<std::string>> text;
  text.reserve(rows.size());
  for (const auto& r : rows) {
    text.push_back({fmt17(r[0]), fmt17(r[1]), fmt17(r[2]), fmt17(r[3])});
  }
  write_csv(ws.file(rel), {"lambda", "trace", "det", "mu_plus"}, text);
  ws.note(rel);
}

void write_checks_csv(Workspace& ws, const DiagnosticsReport& rep) {
  std::vector<std::vector<std::string>> rows;
  for (const CheckResult& c : rep.checks) {
    rows.push_back({c.name, c.pass ? "1" : "0", fmt17(c.measured), fmt17(c.bound)});
  }
  write_csv(ws.file("checks.csv"), {"name", "pass", "measured", "bound"}, rows);
  ws.note("checks.csv");
}

void write_snapshots(Workspace& ws, const RunRecord& run) {
  fs::create_directories(ws.dir / "snapshots");
  for (size_t i = 0; i < run.snapshots.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshots/snap_%04zu.csv", i);
    write_snapshot_csv(ws.file(name), run.snapshots[i], run.grid);
    ws.note(name);
  }
}

void write_amplitudes_csv(Workspace& ws, const std::string& rel, const RunRecord& run,
                          const std::vector<EigenMode>& modes,
                          const std::vector<const std::vector<double> FieldState::*>& fields,
                          const std::vector<std::string>& field_names) {
  std::vector<std::string> header{"t"};
  for (size_t f = 0; f < fields.size(); ++f) {
    for (const EigenMode& m : modes) {
      header.push_back(field_names[f] + "_m" + std::to_string(m.indices[0]));
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (const FieldState& s : run.snapshots) {
    std::vector<std::string> row{fmt17(s.t)};
    for (const auto& fp : fields) {
      for (const EigenMode& m : modes) {
        row.push_back(fmt17(mode_amplitude(s.*fp, m, run.grid)));
      }
    }
    rows.push_back(std::move(row));
  }
  write_csv(ws.file(rel), header, rows);
  ws.note(rel);
}

// ---------------------------------------------------------------------------
// no-turing-scan

void scenario_no_turing(const ScenarioConfig& cfg, Workspace& ws) {
  const Equilibrium eq = coexistence_equilibrium(cfg.model);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, cfg.model);

  std::mt19937_64 rng(cfg.seed);
  const auto grid = log_grid(cfg.spectral.lambda_min, cfg.spectral.lambda_max,
                             cfg.spectral.points);

  std::ostringstream verdict;
  verdict << "no-turing-scan\n";
  verdict << "equilibrium S* = " << fmt17(eq.S_star) << ", R* = " << fmt17(eq.R_star) << "\n";
  verdict << "jacobian a = " << fmt17(J.a) << ", b = " << fmt17(J.b) << ", c = " << fmt17(J.c)
          << ", d = " << fmt17(J.d) << "\n";
  verdict << "tr(J) = " << fmt17(J.trace()) << ", det(J) = " << fmt17(J.det()) << "\n";

  double worst_mu = -std::numeric_limits<double>::infinity();
  double worst_trace = -std::numeric_limits<double>::infinity();
  double least_det = std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < cfg.scan.pairs; ++pair) {
    const double d_S = log_uniform(rng, cfg.scan.d_lo, cfg.scan.d_hi);
    const double d_R = log_uniform(rng, cfg.scan.d_lo, cfg.scan.d_hi);
    const NoTuringCertificate cert = no_turing_certificate(
        cfg.model, d_S, d_R, cfg.spectral.lambda_min, cfg.spectral.lambda_max,
        cfg.spectral.points);

    std::vector<std::array<double, 4>> rows;
    for (double lambda : grid) {
      const DispersionSample s = base_dispersion(J, d_S, d_R, lambda);
      rows.push_back({lambda, -s.a1, s.a0, s.mu_plus});
    }
    char rel[64];
    std::snprintf(rel, sizeof(rel), "dispersion_%02d.csv", pair);
    write_dispersion_csv(ws, rel, rows);

    for (const auto& r : rows) {
      worst_mu = std::max(worst_mu, r[3]);
      worst_trace = std::max(worst_trace, r[1]);
      least_det = std::min(least_det, r[2]);
    }
    verdict << "pair " << pair << ": d_S = " << fmt17(d_S) << ", d_R = " << fmt17(d_R)
            << ", stable (" << cert.reason << ")\n";
  }

  ws.report->checks.add("max_mu_plus_over_scan", worst_mu, 0.0);
  ws.report->checks.add("max_trace_over_scan", worst_trace, 0.0);
  ws.report->checks.add("min_det_over_scan", least_det, 0.0, /*pass_if_leq=*/false);
  write_text_file(ws.file("verdict.txt"), verdict.str());
  ws.note("verdict.txt");

  ws.report->summary = "no diffusion-driven instability across the diffusion scan";
}

// ---------------------------------------------------------------------------
// twoway-criteria

void scenario_twoway_criteria(const ScenarioConfig& cfg, Workspace& ws) {
  const Equilibrium eq = coexistence_equilibrium(cfg.model);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, cfg.model);
  const Mat2 H = mobility_correction(cfg.coupling, eq);
  const DetQuadratic qd = det_quadratic(J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq);

  StabilityVerdict v = twoway_verdict(cfg.model, cfg.coupling);
  const auto modes = enumerate_modes(cfg.domain, cfg.spectral.k_max);
  v.per_mode = mode_growth_table(J, cfg.model.d_S, cfg.model.d_R, H, modes);

  // Dispersion table over the lambda grid.
  std::vector<std::array<double, 4>> rows;
  for (double lambda : log_grid(cfg.spectral.lambda_min, cfg.spectral.lambda_max,
                                cfg.spectral.points)) {
    const Mat2 A = twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, H, lambda);
    rows.push_back({lambda, A.trace(), A.det(), spectral_abscissa(A)});
  }
  write_dispersion_csv(ws, "dispersion.csv", rows);

  // Per-mode table on the domain lattice.
  {
    std::vector<std::vector<std::string>> mode_rows;
    for (const ModeGrowth& m : v.per_mode) {
      mode_rows.push_back({std::to_string(m.rank), std::to_string(m.indices[0]),
                           std::to_string(m.indices[1]), fmt17(m.lambda), fmt17(m.mu_plus),
                           m.unstable ? "1" : "0"});
    }
    write_csv(ws.file("modes.csv"), {"rank", "m", "n", "lambda", "mu_plus", "unstable"},
              mode_rows);
    ws.note("modes.csv");
  }

  // Internal consistency: the quadratic must reproduce matrix determinants.
  std::mt19937_64 rng(cfg.seed);
  double det_mismatch = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double lambda = log_uniform(rng, 1e-3, 1e4);
    const Mat2 A = twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, H, lambda);
    const double reference = qd.eval(lambda);
    const double scale = std::max({1.0, std::abs(reference), std::abs(A.det())});
    det_mismatch = std::max(det_mismatch, std::abs(A.det() - reference) / scale);
  }
  ws.report->checks.add("det_quadratic_vs_matrix", det_mismatch, 1e-10);
  ws.report->checks.add("kinetically_stable", v.kinetically_stable ? 1.0 : 0.0, 1.0,
                        /*pass_if_leq=*/false);

  std::ostringstream out;
  out << "twoway-criteria\n";
  out << "classification = " << to_string(v.classification) << "\n";
  out << "A1 = " << fmt17(v.A1) << "\nA2 = " << fmt17(v.A2) << "\ndetJ = " << fmt17(v.detJ)
      << "\n";
  if (v.has_interval) {
    out << "unstable_lambda_lo = " << fmt17(v.lambda_lo) << "\n";
    out << "unstable_lambda_hi = "
        << (std::isinf(v.lambda_hi) ? std::string("inf") : fmt17(v.lambda_hi)) << "\n";
  }
  out << "regimes =";
  if (v.regimes & REGIME_S1) out << " S1";
  if (v.regimes & REGIME_S2) out << " S2";
  if (v.regimes & REGIME_S3) out << " S3";
  if (v.regimes & REGIME_S4) out << " S4";
  if (v.regimes == 0) out << " none";
  out << "\n";
  out << "unstable_modes =";
  bool any = false;
  for (const ModeGrowth& m : v.per_mode) {
    if (m.unstable) {
      out << " " << m.indices[0];
      if (cfg.domain.dimension == 2) out << "." << m.indices[1];
      any = true;
    }
  }
  if (!any) out << " none";
  out << "\n";
  write_text_file(ws.file("verdict.txt"), out.str());
  ws.note("verdict.txt");

  ws.report->summary = std::string("classification ") + to_string(v.classification);
}

// ---------------------------------------------------------------------------
// twoway-simulate

void scenario_twoway_simulate(const ScenarioConfig& cfg, Workspace& ws) {
  const Equilibrium eq = coexistence_equilibrium(cfg.model);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, cfg.model);
  const Mat2 H = mobility_correction(cfg.coupling, eq);

  const Grid grid = Grid::make(cfg.domain, cfg.nx, cfg.ny);
  const RunRecord run = run_simulation(grid, cfg.model, cfg.coupling, cfg.solver);
  ws.report->dt_used = run.dt;
  ws.report->status = run.status;
  write_snapshots(ws, run);
  if (!run.completed) {
    ws.report->diverged = true;
    return;
  }

  const int k_max = cfg.spectral.k_max;
  const auto modes = enumerate_modes(cfg.domain, k_max);

  // Predictions come from the matrix matching the simulated variant: the
  // reduced-closure 2x2 for twoway_reduced, the full 3x3 signal model for
  // twoway_full.
  const bool full_signal = cfg.solver.variant == Variant::twoway_full;
  auto predict_mu = [&](double lambda) {
    if (full_signal) {
      return spectral_abscissa(
          full_twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq, lambda));
    }
    return spectral_abscissa(twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, H, lambda));
  };

  // Track amplitudes of every nonconstant lattice mode on S and R.
  std::vector<EigenMode> tracked(modes.begin() + 1, modes.end());
  write_amplitudes_csv(ws, "amplitudes.csv", run, tracked,
                       {&FieldState::S, &FieldState::R}, {"S", "R"});

  std::ostringstream gout;
  gout << "twoway-simulate\n";
  gout << "dt = " << fmt17(run.dt) << "\n";

  // Seeded-mode growth check against the predicted dispersion eigenvalue.
  const bool seeded_S = !cfg.solver.init.S.modes.empty();
  const bool seeded_R = !cfg.solver.init.R.modes.empty();
  if (seeded_S || seeded_R) {
    const ModeSeed seed = seeded_S ? cfg.solver.init.S.modes.front()
                                   : cfg.solver.init.R.modes.front();
    const auto mode_it =
        std::find_if(modes.begin(), modes.end(),
                     [&seed](const EigenMode& m) { return m.indices[0] == seed.m; });
    if (mode_it == modes.end()) {
      throw std::logic_error("twoway-simulate: seeded mode outside the enumerated lattice");
    }
    const double predicted = predict_mu(mode_it->lambda);

    std::vector<double> times, amps;
    for (const FieldState& s : run.snapshots) {
      times.push_back(s.t);
      amps.push_back(std::abs(mode_amplitude(seeded_S ? s.S : s.R, *mode_it, grid)));
    }
    FitWindowPolicy policy;
    policy.lo_amp = 10.0 * amps.front();
    const double eq_scale = std::max(eq.S_star, eq.R_star);
    policy.hi_amp = 0.01 * eq_scale * std::sqrt(cfg.domain.Lx / 2.0);
    const GrowthFit fit = fit_growth_rate(times, amps, policy);

    // Stable configurations are cross-checked on the decay side instead.
    const double rel_err = std::abs(fit.sigma - predicted) / std::abs(predicted);
    const char* rate_check = predicted > 0.0 ? "growth_rate_rel_error" : "decay_rate_rel_error";
    ws.report->checks.add(rate_check, rel_err, cfg.checks.growth_rtol);
    ws.report->checks.add("growth_fit_r2", fit.r2, 0.99, /*pass_if_leq=*/false);
    ws.report->checks.add("growth_window_matches_prediction",
                          fit.grew == (predicted > 0.0) ? 1.0 : 0.0, 1.0,
                          /*pass_if_leq=*/false);

    gout << "seeded_mode_m = " << seed.m << "\n";
    gout << "predicted_mu_plus = " << fmt17(predicted) << "\n";
    gout << "fitted_sigma = " << fmt17(fit.sigma) << "\n";
    gout << "fit_window_t0 = " << fmt17(fit.t0) << "\nfit_window_t1 = " << fmt17(fit.t1) << "\n";
    gout << "fit_r2 = " << fmt17(fit.r2) << "\n";
    gout << "rel_error = " << fmt17(rel_err) << "\n";
  }

  // Noise-seeded runs: the dominant Fourier index must match the linear
  // prediction, i.e. the initial per-mode coefficients propagated by the mode
  // matrices to the end of the run. The argmax of the dispersion relation is
  // reported alongside (the two coincide once growth has filtered the seed).
  if (cfg.solver.init.noise_amp > 0.0) {
    int argmax_m = 0;
    double best_mu = -std::numeric_limits<double>::infinity();
    for (const EigenMode& m : modes) {
      if (m.rank == 1) continue;
      const double mu = predict_mu(m.lambda);
      if (mu > best_mu) {
        best_mu = mu;
        argmax_m = m.indices[0];
      }
    }

    const FieldState& first = run.snapshots.front();
    const FieldState& last = run.snapshots.back();
    const double horizon = last.t - first.t;
    int predicted_m = 0, measured_m = 0;
    double best_pred = -1.0, best_amp = -1.0;
    for (const EigenMode& m : tracked) {
      const std::array<double, 2> a0{mode_amplitude(first.S, m, grid),
                                     mode_amplitude(first.R, m, grid)};
      double pred;
      if (full_signal) {
        const Mat3 M =
            full_twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq, m.lambda);
        const std::array<double, 3> a0c{a0[0], a0[1],
                                        mode_amplitude(first.c, m, grid)};
        pred = std::abs(expm_apply(M, a0c, horizon)[1]);
      } else {
        const Mat2 A = twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, H, m.lambda);
        pred = std::abs(expm_apply(A, a0, horizon)[1]);
      }
      if (pred > best_pred) {
        best_pred = pred;
        predicted_m = m.indices[0];
      }
      const double amp = std::abs(mode_amplitude(last.R, m, grid));
      if (amp > best_amp) {
        best_amp = amp;
        measured_m = m.indices[0];
      }
    }
    ws.report->checks.add("dominant_mode_mismatch",
                          std::abs(static_cast<double>(measured_m - predicted_m)), 0.0);
    gout << "dispersion_argmax_m = " << argmax_m << "\n";
    gout << "dispersion_argmax_mu_plus = " << fmt17(best_mu) << "\n";
    gout << "predicted_dominant_m = " << predicted_m << "\n";
    gout << "measured_dominant_m = " << measured_m << "\n";
    gout << "measured_dominant_amp = " << fmt17(best_amp) << "\n";
  }

  write_text_file(ws.file("growth.txt"), gout.str());
  ws.note("growth.txt");
  ws.report->summary = "simulation-vs-dispersion cross-check";
}

// ---------------------------------------------------------------------------
// core-longtime

void scenario_core_longtime(const ScenarioConfig& cfg, Workspace& ws) {
  const Equilibrium eq = coexistence_equilibrium(cfg.model);

  // Reference ODE convergence.
  const auto traj = integrate_reduced_ode(cfg.ode.S0, cfg.ode.R0, cfg.model, cfg.ode.t_end,
                                          cfg.ode.dt);
  {
    std::vector<std::vector<std::string>> rows;
    for (const OdePoint& p : traj) rows.push_back({fmt17(p.t), fmt17(p.S), fmt17(p.R)});
    write_csv(ws.file("ode_trajectory.csv"), {"t", "S", "R"}, rows);
    ws.note("ode_trajectory.csv");
  }
  const ConvergenceTrace ode_trace = equilibrium_convergence(traj, eq);
  ws.report->checks.add("ode_terminal_distance", ode_trace.terminal, cfg.checks.ode_tol);
  ws.report->checks.add("ode_monotone_tail", ode_trace.monotone_tail ? 1.0 : 0.0, 1.0,
                        /*pass_if_leq=*/false);

  if (cfg.ode.random_starts > 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * cfg.model.K);
    double worst = 0.0;
    for (int i = 0; i < cfg.ode.random_starts; ++i) {
      double S0 = u(rng), R0 = u(rng);
      if (S0 + R0 <= 0.0) S0 = cfg.model.K;
      const auto t = integrate_reduced_ode(S0, R0, cfg.model, cfg.ode.random_t_end, cfg.ode.dt);
      const OdePoint& last = t.back();
      worst = std::max(worst, std::max(std::abs(last.S - eq.S_star),
                                       std::abs(last.R - eq.R_star)));
    }
    ws.report->checks.add("ode_random_starts_worst_distance", worst, cfg.checks.ode_tol);
  }

  // Full hybrid run.
  const Grid grid = Grid::make(cfg.domain, cfg.nx, cfg.ny);
  const RunRecord run = run_simulation(grid, cfg.model, cfg.coupling, cfg.solver);
  ws.report->dt_used = run.dt;
  ws.report->status = run.status;
  write_snapshots(ws, run);
  if (!run.completed) {
    ws.report->diverged = true;
    return;
  }

  for (const CheckResult& c : check_conservation_suite(run, cfg.model).checks) {
    ws.report->checks.checks.push_back(c);
  }

  const CouplingNorms norms = residual_coupling_norms(run, cfg.model);
  {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < norms.t.size(); ++i) {
      rows.push_back({fmt17(norms.t[i]), fmt17(norms.delta_term[i]), fmt17(norms.phi_term[i]),
                      fmt17(norms.phiA_term[i]), fmt17(norms.total[i])});
    }
    write_csv(ws.file("coupling_norms.csv"), {"t", "delta_term", "phi_term", "phiA_term", "total"},
              rows);
    ws.note("coupling_norms.csv");
  }
  // Tail envelope sup_{t >= T} total(t), nonincreasing in T by construction;
  // the substantive checks are the terminal value and the decay factor.
  std::vector<double> envelope(norms.total.size());
  double running = 0.0;
  for (size_t i = norms.total.size(); i-- > 0;) {
    running = std::max(running, norms.total[i]);
    envelope[i] = running;
  }
  bool monotone = true;
  for (size_t i = 0; i + 1 < envelope.size(); ++i) {
    if (envelope[i + 1] > envelope[i] * (1.0 + 1e-12)) monotone = false;
  }
  ws.report->checks.add("coupling_envelope_monotone", monotone ? 1.0 : 0.0, 1.0,
                        /*pass_if_leq=*/false);
  ws.report->checks.add("coupling_total_end", norms.total.back(), cfg.checks.residual_bound);
  if (envelope.front() > 0.0 && norms.t.back() >= 40.0) {
    size_t i40 = 0;
    while (i40 < norms.t.size() && norms.t[i40] < 40.0) ++i40;
    ws.report->checks.add("coupling_decay_factor_t40", envelope.front() / envelope[i40], 100.0,
                          /*pass_if_leq=*/false);
  }

  const ConvergenceTrace pde_trace = equilibrium_convergence(run, eq);
  {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < pde_trace.t.size(); ++i) {
      rows.push_back({fmt17(pde_trace.t[i]), fmt17(pde_trace.dist[i])});
    }
    write_csv(ws.file("convergence.csv"), {"t", "sup_distance"}, rows);
    ws.note("convergence.csv");
  }
  ws.report->checks.add("pde_terminal_distance", pde_trace.terminal, cfg.checks.pde_tol);
  ws.report->checks.add("pde_monotone_tail", pde_trace.monotone_tail ? 1.0 : 0.0, 1.0,
                        /*pass_if_leq=*/false);

  ws.report->summary = "long-time reduction and attractivity checks";
}

// ---------------------------------------------------------------------------
// oneway-suppression

void scenario_oneway(const ScenarioConfig& cfg, Workspace& ws) {
  const Equilibrium eq = coexistence_equilibrium(cfg.model);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, cfg.model);

  // Mode table for the configured coupling.
  const auto modes = enumerate_modes(cfg.domain, cfg.spectral.k_max);
  double max_re = -std::numeric_limits<double>::infinity();
  double worst_mismatch = 0.0;
  {
    std::vector<std::vector<std::string>> rows;
    for (const EigenMode& m : modes) {
      if (m.rank == 1) continue;
      const OnewaySpectrum sp =
          oneway_mode_spectrum(J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq, m.lambda);
      double re = -std::numeric_limits<double>::infinity();
      for (const Complex& z : sp.spectrum) re = std::max(re, z.real());
      max_re = std::max(max_re, re);
      rows.push_back({fmt17(m.lambda), fmt17(sp.spectrum[0].real()),
                      fmt17(sp.spectrum[1].real()), fmt17(sp.spectrum[2].real()),
                      fmt17(sp.scalar_eig), fmt17(re)});
    }
    write_csv(ws.file("oneway_spectrum.csv"),
              {"lambda", "re_1", "re_2", "re_3", "signal_eig", "max_re"}, rows);
    ws.note("oneway_spectrum.csv");
  }
  ws.report->checks.add("configured_max_re", max_re, 0.0);

  // Random damped configurations with a provably stable base block.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double random_max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.oneway.n_random; ++i) {
    const ModelParams p = random_kinetics(rng);
    const Equilibrium req = coexistence_equilibrium(p);
    const Jacobian2 rj = reduced_jacobian(req.S_star, req.R_star, p);
    SignalCoupling c;
    c.chi_S = 2.0 * u(rng);
    c.chi_R = 2.0 * u(rng);
    c.d_c = log_uniform(rng, 0.1, 10.0);
    c.Qprime_cstar = -log_uniform(rng, 0.05, 2.0);
    const double d_S = log_uniform(rng, 1e-3, 10.0);
    const double d_R = log_uniform(rng, 1e-3, 10.0);
    const double lambda = log_uniform(rng, 1e-4, 1e4);
    const OnewaySpectrum sp = oneway_mode_spectrum(rj, d_S, d_R, c, req, lambda);
    for (const Complex& z : sp.spectrum) random_max_re = std::max(random_max_re, z.real());
    worst_mismatch = std::max(worst_mismatch, sp.union_mismatch / (1.0 + sp.matrix.frobenius()));
  }
  ws.report->checks.add("random_configs_max_re", random_max_re, 0.0);
  ws.report->checks.add("random_configs_union_mismatch", worst_mismatch, 1e-10);

  // Perturbed simulation: every nonconstant mode must decay after the
  // transient.
  const Grid grid = Grid::make(cfg.domain, cfg.nx, cfg.ny);
  const RunRecord run = run_simulation(grid, cfg.model, cfg.coupling, cfg.solver);
  ws.report->dt_used = run.dt;
  ws.report->status = run.status;
  write_snapshots(ws, run);
  if (!run.completed) {
    ws.report->diverged = true;
    return;
  }
  std::vector<EigenMode> tracked;
  for (const EigenMode& m : modes) {
    if (m.rank >= 2 && m.rank <= cfg.oneway.check_modes) tracked.push_back(m);
  }
  write_amplitudes_csv(ws, "amplitudes.csv", run, tracked, {&FieldState::S}, {"S"});

  size_t i_transient = 0;
  while (i_transient + 1 < run.snapshots.size() &&
         run.snapshots[i_transient].t < 0.1 * cfg.solver.t_end) {
    ++i_transient;
  }
  double worst_ratio = 0.0;
  for (const EigenMode& m : tracked) {
    const double early =
        std::abs(mode_amplitude(run.snapshots[i_transient].S, m, grid));
    const double late = std::abs(mode_amplitude(run.snapshots.back().S, m, grid));
    if (early > 0.0) worst_ratio = std::max(worst_ratio, late / early);
  }
  ws.report->checks.add("sim_mode_decay_worst_ratio", worst_ratio, 1.0);

  ws.report->summary = "one-way damped coupling leaves every nonconstant mode damped";
}

// ---------------------------------------------------------------------------
// schur-verify

void scenario_schur(const ScenarioConfig& cfg, Workspace& ws) {
  const Equilibrium eq = coexistence_equilibrium(cfg.model);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, cfg.model);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  double worst_rel_residual = 0.0;
  std::vector<std::vector<std::string>> rows;
  auto probe = [&](const Mat3& M, double lambda, int cfg_index) {
    for (int i = 0; i < cfg.schur.n_mu; ++i) {
      Complex mu;
      const double pole = M(2, 2);
      do {
        const double a = angle(rng);
        mu = Complex(cfg.schur.mu_radius * std::cos(a), cfg.schur.mu_radius * std::sin(a));
      } while (std::abs(mu - Complex(pole, 0.0)) <= 1e-6 * (1.0 + std::abs(pole)));
      const SchurCheck chk = schur_factorization_residual(M, lambda, mu);
      worst_rel_residual = std::max(worst_rel_residual, chk.residual / chk.scale);
      rows.push_back({std::to_string(cfg_index), fmt17(lambda), fmt17(mu.real()),
                      fmt17(mu.imag()), fmt17(chk.residual), fmt17(chk.scale)});
    }
  };

  // Configured instance.
  const Mat3 M0 = full_twoway_mode_matrix(J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq,
                                          cfg.schur.lambda);
  probe(M0, cfg.schur.lambda, -1);

  // Random configurations.
  for (int n = 0; n < cfg.schur.n_configs; ++n) {
    const ModelParams p = random_kinetics(rng);
    const Equilibrium req = coexistence_equilibrium(p);
    const Jacobian2 rj = reduced_jacobian(req.S_star, req.R_star, p);
    SignalCoupling c;
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    c.chi_S = std::abs(u(rng));
    c.chi_R = std::abs(u(rng));
    c.h_S_star = u(rng);
    c.h_R_star = u(rng);
    c.q = -log_uniform(rng, 0.05, 5.0);
    c.d_c = log_uniform(rng, 0.1, 10.0);
    const double d_S = log_uniform(rng, 1e-3, 10.0);
    const double d_R = log_uniform(rng, 1e-3, 10.0);
    const double lambda = log_uniform(rng, 1e-2, 1e2);
    probe(full_twoway_mode_matrix(rj, d_S, d_R, c, req, lambda), lambda, n);
  }
  write_csv(ws.file("schur_residuals.csv"),
            {"config", "lambda", "mu_re", "mu_im", "residual", "scale"}, rows);
  ws.note("schur_residuals.csv");
  ws.report->checks.add("schur_worst_rel_residual", worst_rel_residual, cfg.checks.schur_scale);

  // Quasi-steady closure and fast-relaxation convergence at the configured
  // instance.
  const QssClosure qss = qss_closure(J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq,
                                     cfg.schur.lambda);
  {
    std::ostringstream os;
    os << "qss closure at lambda = " << fmt17(cfg.schur.lambda) << "\n";
    os << "g_S = " << fmt17(qss.g_S) << "\ng_R = " << fmt17(qss.g_R) << "\n";
    os << "A_qss = [[" << fmt17(qss.A_qss.a11) << ", " << fmt17(qss.A_qss.a12) << "], ["
       << fmt17(qss.A_qss.a21) << ", " << fmt17(qss.A_qss.a22) << "]]\n";
    write_text_file(ws.file("qss.txt"), os.str());
    ws.note("qss.txt");
  }

  const EpsConvergence conv = eps_spectrum_convergence(
      J, cfg.model.d_S, cfg.model.d_R, cfg.coupling, eq, cfg.schur.lambda, cfg.schur.eps);
  {
    std::vector<std::vector<std::string>> erows;
    for (const EpsRow& r : conv.rows) {
      erows.push_back({fmt17(r.eps), fmt17(r.gap), fmt17(r.fast_eig)});
    }
    write_csv(ws.file("eps_convergence.csv"), {"eps", "gap", "fast_eig"}, erows);
    ws.note("eps_convergence.csv");
  }
  bool decreasing = true;
  for (size_t i = 0; i + 1 < conv.rows.size(); ++i) {
    if (!(conv.rows[i + 1].gap < conv.rows[i].gap)) decreasing = false;
  }
  ws.report->checks.add("eps_gap_decreasing", decreasing ? 1.0 : 0.0, 1.0,
                        /*pass_if_leq=*/false);
  ws.report->checks.add("eps_pairing_ok", conv.pairing_ok ? 1.0 : 0.0, 1.0,
                        /*pass_if_leq=*/false);
  ws.report->checks.add("eps_fitted_order", conv.order_defined ? conv.fitted_order : 0.0,
                        cfg.checks.order_min, /*pass_if_leq=*/false);
  {
    const EpsRow& smallest = conv.rows.back();
    const double fast_ref = (cfg.coupling.q - cfg.coupling.d_c * cfg.schur.lambda) / smallest.eps;
    ws.report->checks.add("eps_fast_eig_rel_error",
                          std::abs(smallest.fast_eig - fast_ref) / std::abs(fast_ref), 0.01);
  }

  ws.report->summary = "Schur factorization identity and fast-relaxation convergence";
}

// ---------------------------------------------------------------------------
// d-oracle-check

void scenario_d_oracle(const ScenarioConfig& cfg, Workspace& ws) {
  if (cfg.domain.dimension != 1) {
    throw ConfigError("domain.dimension", 0, "d-oracle-check runs on a 1D domain");
  }
  const int max_m = *std::max_element(cfg.doracle.modes.begin(), cfg.doracle.modes.end());
  const auto modes = enumerate_modes(cfg.domain, max_m + 1);

  std::vector<std::pair<EigenMode, double>> coeffs;
  for (size_t i = 0; i < cfg.doracle.modes.size(); ++i) {
    coeffs.emplace_back(modes[static_cast<size_t>(cfg.doracle.modes[i])],
                        cfg.doracle.coeffs[i]);
  }

  auto gap_at = [&](int nx) {
    const Grid grid = Grid::make(cfg.domain, nx);
    SolverConfig sc = cfg.solver;
    sc.variant = Variant::core;
    sc.t_end = cfg.doracle.compare_t;
    sc.snapshot_dt = cfg.doracle.compare_t;
    sc.init = InitRecipe{};
    sc.init.seed = cfg.seed;
    // Express the normalized-basis coefficients as raw cosine seeds.
    for (const auto& [mode, ck] : coeffs) {
      const int m = mode.indices[0];
      const double norm = m == 0 ? std::sqrt(1.0 / cfg.domain.Lx)
                                 : std::sqrt(2.0 / cfg.domain.Lx);
      if (m == 0) {
        sc.init.D.base += ck * norm;
      } else {
        sc.init.D.modes.push_back({m, 0, ck * norm});
      }
    }
    const RunRecord run = run_simulation(grid, cfg.model, cfg.coupling, sc);
    if (!run.completed) throw DivergenceError("D", 0, 0.0, run.status);
    const FieldState& last = run.snapshots.back();
    const auto exact = spectral_D_oracle(coeffs, cfg.model, last.t, grid);
    double gap = 0.0;
    for (size_t i = 0; i < exact.size(); ++i) {
      gap = std::max(gap, std::abs(exact[i] - last.D[i]));
    }
    return std::make_pair(gap, run.dt);
  };

  const auto [gap_base, dt_base] = gap_at(cfg.nx);
  const auto [gap_fine, dt_fine] = gap_at(cfg.nx * cfg.doracle.refine);
  ws.report->dt_used = dt_base;
  ws.report->status = "completed";

  {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({std::to_string(cfg.nx), fmt17(cfg.doracle.compare_t), fmt17(gap_base),
                    fmt17(dt_base)});
    rows.push_back({std::to_string(cfg.nx * cfg.doracle.refine), fmt17(cfg.doracle.compare_t),
                    fmt17(gap_fine), fmt17(dt_fine)});
    write_csv(ws.file("oracle_gap.csv"), {"cells", "t", "linf_gap", "dt"}, rows);
    ws.note("oracle_gap.csv");
  }

  ws.report->checks.add("oracle_gap_base", gap_base, cfg.checks.gap_bound);
  ws.report->checks.add("oracle_refine_factor", gap_fine > 0.0 ? gap_base / gap_fine : 1e9,
                        cfg.checks.refine_factor, /*pass_if_leq=*/false);
  ws.report->summary = "finite differences agree with the spectral solution of D";
}

// ---------------------------------------------------------------------------
// weyl-check

void scenario_weyl(const ScenarioConfig& cfg, Workspace& ws) {
  const auto modes = enumerate_modes(cfg.domain, cfg.spectral.k_max);
  const WeylBand band = weyl_check(modes, cfg.domain.dimension);

  std::vector<std::vector<std::string>> rows;
  const double expnt = 2.0 / static_cast<double>(cfg.domain.dimension);
  for (const EigenMode& m : modes) {
    rows.push_back({std::to_string(m.rank), std::to_string(m.indices[0]),
                    std::to_string(m.indices[1]), fmt17(m.lambda),
                    m.rank >= 5 ? fmt17(m.lambda / std::pow(m.rank, expnt)) : "-"});
  }
  write_csv(ws.file("modes.csv"), {"rank", "m", "n", "lambda", "ratio"}, rows);
  ws.note("modes.csv");

  ws.report->checks.add("weyl_C1_hat", band.C1_hat, 0.0, /*pass_if_leq=*/false);
  ws.report->checks.add("weyl_band_ratio", band.C2_hat / band.C1_hat,
                        cfg.checks.weyl_ratio_bound);
  ws.report->summary = "Weyl scaling band for the Neumann spectrum";
}

void write_manifest(const ScenarioConfig& cfg, Workspace& ws, double wall_s) {
  const ScenarioReport& rep = *ws.report;
  std::ostringstream os;
  os << "tmekit manifest\n";
  os << "version = " << TMEKIT_VERSION_STRING << "\n";
  os << "scenario = " << to_string(cfg.scenario) << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "status = " << (rep.diverged ? "diverged" : rep.checks.all_pass() ? "ok" : "checks_failed")
     << "\n";
  if (!rep.status.empty()) os << "run_status = " << rep.status << "\n";
  if (rep.dt_used > 0.0) os << "dt = " << fmt17(rep.dt_used) << "\n";
  os << "wall_time_s = " << fmt17(wall_s) << "\n";
  os << "failed_checks =";
  bool any = false;
  for (const CheckResult& c : rep.checks.checks) {
    if (!c.pass) {
      os << " " << c.name;
      any = true;
    }
  }
  if (!any) os << " none";
  os << "\n";
  os << "artifacts:\n";
  for (const std::string& a : rep.artifacts) os << "  " << a << "\n";
  os << "config:\n";
  std::istringstream echo(cfg.echo());
  std::string line;
  while (std::getline(echo, line)) os << "  " << line << "\n";
  write_text_file(ws.file("manifest.txt"), os.str());
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();

  ScenarioReport report;
  Workspace ws;
  ws.dir = cfg.out_dir;
  ws.report = &report;
  fs::create_directories(ws.dir);

  try {
    switch (cfg.scenario) {
      case Scenario::no_turing_scan: scenario_no_turing(cfg, ws); break;
      case Scenario::oneway_suppression: scenario_oneway(cfg, ws); break;
      case Scenario::twoway_criteria: scenario_twoway_criteria(cfg, ws); break;
      case Scenario::twoway_simulate: scenario_twoway_simulate(cfg, ws); break;
      case Scenario::core_longtime: scenario_core_longtime(cfg, ws); break;
      case Scenario::schur_verify: scenario_schur(cfg, ws); break;
      case Scenario::d_oracle_check: scenario_d_oracle(cfg, ws); break;
      case Scenario::weyl_check: scenario_weyl(cfg, ws); break;
    }
  } catch (const DivergenceError& e) {
    report.diverged = true;
    report.status = e.what();
  }

  write_checks_csv(ws, report.checks);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, ws, wall);
  report.artifacts.push_back("manifest.txt");
  if (report.status.empty()) report.status = "completed";
  return report;
}

}  // namespace tme
