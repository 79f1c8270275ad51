#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tme {

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(std::span<const double> v, const Grid& g) {
  const double w = g.domain.dimension == 2 ? g.dx * g.dy : g.dx;
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * w);
}

}  // namespace

bool DiagnosticsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

void DiagnosticsReport::add(std::string name, double measured, double bound, bool pass_if_leq) {
  CheckResult c;
  c.name = std::move(name);
  c.measured = measured;
  c.bound = bound;
  c.pass = pass_if_leq ? measured <= bound : measured >= bound;
  checks.push_back(std::move(c));
}

DiagnosticsReport check_conservation_suite(const RunRecord& run, const ModelParams& params) {
  if (run.snapshots.size() < 2) {
    throw std::invalid_argument("check_conservation_suite: need at least 2 snapshots");
  }
  const FieldState& first = run.snapshots.front();
  const size_t n = first.S.size();

  // P + A pointwise conservation, relative to the initial sum scale.
  double pa_scale = 0.0;
  for (size_t i = 0; i < n; ++i) pa_scale = std::max(pa_scale, std::abs(first.P[i] + first.A[i]));
  double pa_drift = 0.0;
  for (const FieldState& s : run.snapshots) {
    for (size_t i = 0; i < n; ++i) {
      pa_drift = std::max(pa_drift, std::abs((s.P[i] + s.A[i]) - (first.P[i] + first.A[i])));
    }
  }
  const double pa_rel = pa_scale > 0.0 ? pa_drift / pa_scale : pa_drift;

  // Maximum principle for D.
  const double d0_max = *std::max_element(first.D.begin(), first.D.end());
  double d_max_excess = -std::numeric_limits<double>::infinity();
  for (const FieldState& s : run.snapshots) {
    d_max_excess = std::max(d_max_excess, *std::max_element(s.D.begin(), s.D.end()) - d0_max);
  }

  // L2 decay of D against the exponential envelope.
  const double d0_l2 = l2_norm(first.D, run.grid);
  double decay_excess = 0.0;
  if (d0_l2 > 0.0) {
    for (const FieldState& s : run.snapshots) {
      const double envelope = std::exp(-params.gamma_d * s.t) * d0_l2;
      if (envelope > 0.0) {
        decay_excess = std::max(decay_excess, l2_norm(s.D, run.grid) / envelope - 1.0);
      }
    }
  }

  // Nonnegativity of every conserved field.
  double min_value = std::numeric_limits<double>::infinity();
  for (const FieldState& s : run.snapshots) {
    for (const std::vector<double>* f : {&s.S, &s.R, &s.D, &s.P, &s.A}) {
      for (double v : *f) min_value = std::min(min_value, v);
    }
  }

  DiagnosticsReport rep;
  rep.add("pa_conservation_rel_drift", pa_rel, 1e-12);
  rep.add("d_max_principle_excess", d_max_excess, 1e-12);
  rep.add("d_l2_decay_excess", decay_excess, 1e-6);
  rep.add("field_min_value", min_value, -1e-9, /*pass_if_leq=*/false);
  return rep;
}

CouplingNorms residual_coupling_norms(const RunRecord& run, const ModelParams& params) {
  if (run.variant != Variant::core) {
    throw std::invalid_argument("residual_coupling_norms: needs a core-variant run");
  }
  CouplingNorms out;
  for (const FieldState& s : run.snapshots) {
    const size_t n = s.S.size();
    double delta_term = 0.0, phi_max = 0.0, phiA_max = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double phi = phi_of(s.D[i], params);
      delta_term = std::max(delta_term, std::abs(delta_of(s.D[i], params) * s.S[i]));
      phi_max = std::max(phi_max, phi);
      phiA_max = std::max(phiA_max, std::abs(phi * s.A[i]));
    }
    const double r_max = sup_norm(s.R);
    out.t.push_back(s.t);
    out.delta_term.push_back(delta_term);
    out.phi_term.push_back(phi_max * r_max);
    out.phiA_term.push_back(phiA_max * r_max);
    out.total.push_back(delta_term + phi_max * r_max + phiA_max * r_max);
  }
  return out;
}

double mode_amplitude(std::span<const double> field, const EigenMode& mode, const Grid& grid) {
  if (field.size() != grid.cells()) {
    throw std::invalid_argument("mode_amplitude: field/grid size mismatch");
  }
  const double w = grid.domain.dimension == 2 ? grid.dx * grid.dy : grid.dx;
  double acc = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double omega = grid.domain.dimension == 2 ? mode.eval(grid.x(i), grid.y(j))
                                                      : mode.eval(grid.x(i));
      acc += field[grid.idx(i, j)] * omega;
    }
  }
  return acc * w;
}

GrowthFit fit_growth_rate(std::span<const double> times, std::span<const double> amps,
                          const FitWindowPolicy& policy) {
  if (times.size() != amps.size() || times.size() < 2) {
    throw std::invalid_argument("fit_growth_rate: need paired samples");
  }

  std::vector<double> tw, lw;
  for (size_t i = 0; i < times.size(); ++i) {
    if (amps[i] >= policy.lo_amp && amps[i] <= policy.hi_amp && amps[i] > 0.0) {
      tw.push_back(times[i]);
      lw.push_back(std::log(amps[i]));
    }
  }

  GrowthFit fit;
  if (tw.size() >= policy.min_samples) {
    fit.grew = true;
  } else {
    // Perturbation never grew into the window: estimate the decay rate from
    // the trailing half of the series, ignoring samples that have decayed to
    // the roundoff floor.
    double peak = 0.0;
    for (double a : amps) peak = std::max(peak, a);
    const double floor = 1e-12 * peak;
    tw.clear();
    lw.clear();
    for (size_t i = times.size() / 2; i < times.size(); ++i) {
      if (amps[i] > floor) {
        tw.push_back(times[i]);
        lw.push_back(std::log(amps[i]));
      }
    }
    if (tw.size() < 2) throw std::invalid_argument("fit_growth_rate: no usable samples");
  }

  const LineFit line = fit_line(tw, lw);
  fit.t0 = tw.front();
  fit.t1 = tw.back();
  fit.sigma = line.slope;
  fit.r2 = line.r2;
  fit.samples = tw.size();
  return fit;
}

namespace {

ConvergenceTrace make_trace(std::vector<double> t, std::vector<double> dist) {
  ConvergenceTrace tr;
  tr.t = std::move(t);
  tr.dist = std::move(dist);
  tr.terminal = tr.dist.back();

  size_t peak = 0;
  for (size_t i = 1; i < tr.dist.size(); ++i) {
    if (tr.dist[i] > tr.dist[peak]) peak = i;
  }
  // Additive slack keeps roundoff jitter near the converged plateau from
  // masquerading as re-growth.
  tr.monotone_tail = true;
  for (size_t i = peak; i + 1 < tr.dist.size(); ++i) {
    if (tr.dist[i + 1] > tr.dist[i] * (1.0 + 1e-12) + 1e-12) {
      tr.monotone_tail = false;
      break;
    }
  }
  return tr;
}

}  // namespace

ConvergenceTrace equilibrium_convergence(const RunRecord& run, const Equilibrium& eq) {
  if (run.snapshots.empty()) throw std::invalid_argument("equilibrium_convergence: empty run");
  std::vector<double> t, dist;
  for (const FieldState& s : run.snapshots) {
    double d = 0.0;
    for (size_t i = 0; i < s.S.size(); ++i) {
      d = std::max(d, std::max(std::abs(s.S[i] - eq.S_star), std::abs(s.R[i] - eq.R_star)));
    }
    t.push_back(s.t);
    dist.push_back(d);
  }
  return make_trace(std::move(t), std::move(dist));
}

ConvergenceTrace equilibrium_convergence(const std::vector<OdePoint>& traj,
                                         const Equilibrium& eq) {
  if (traj.empty()) throw std::invalid_argument("equilibrium_convergence: empty trajectory");
  std::vector<double> t, dist;
  for (const OdePoint& p : traj) {
    t.push_back(p.t);
    dist.push_back(std::max(std::abs(p.S - eq.S_star), std::abs(p.R - eq.R_star)));
  }
  return make_trace(std::move(t), std::move(dist));
}

DiagnosticsReport convergence_report(const ConvergenceTrace& trace, double tol) {
  DiagnosticsReport rep;
  rep.add("terminal_distance", trace.terminal, tol);
  rep.add("monotone_tail", trace.monotone_tail ? 1.0 : 0.0, 1.0, /*pass_if_leq=*/false);
  return rep;
}

}  // namespace tme
