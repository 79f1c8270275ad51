#pragma once

#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "solver.hpp"
#include "spectral.hpp"

namespace tme {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;

  double margin() const { return bound - measured; }
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  void add(std::string name, double measured, double bound, bool pass_if_leq = true);
};

// Structural identities of a core-system run: pointwise P+A conservation,
// maximum principle and L2 decay of D, and nonnegativity of every field.
DiagnosticsReport check_conservation_suite(const RunRecord& run, const ModelParams& params);

// Sup norms of the D-mediated coupling terms per snapshot; the tail envelope
// must be nonincreasing and small by the end of the run.
struct CouplingNorms {
  std::vector<double> t;
  std::vector<double> delta_term;  // |delta(D) S|_inf
  std::vector<double> phi_term;    // |phi(D)|_inf |R|_inf
  std::vector<double> phiA_term;   // |phi(D) A|_inf |R|_inf
  std::vector<double> total;
};
CouplingNorms residual_coupling_norms(const RunRecord& run, const ModelParams& params);

// Discrete L2 projection of a gridded field onto a normalized eigenfunction
// (midpoint quadrature).
double mode_amplitude(std::span<const double> field, const EigenMode& mode, const Grid& grid);

struct FitWindowPolicy {
  double lo_amp = 0.0;        // pre-window floor, e.g. 10 x initial amplitude
  double hi_amp = 0.0;        // saturation guard, e.g. 0.01 x equilibrium scale
  size_t min_samples = 10;
};

struct GrowthFit {
  bool grew = false;     // false: perturbation never reached the window floor
  double t0 = 0.0;
  double t1 = 0.0;
  double sigma = 0.0;    // fitted exponential rate
  double r2 = 0.0;
  size_t samples = 0;
};

// Least-squares line on log amplitude inside the policy window. Without
// growth, the rate is estimated from the trailing half of the series.
GrowthFit fit_growth_rate(std::span<const double> times, std::span<const double> amps,
                          const FitWindowPolicy& policy);

// Sup-norm distance of (S,R) to the equilibrium per snapshot; passes when the
// terminal distance meets the tolerance and the tail after the peak is
// monotone nonincreasing.
struct ConvergenceTrace {
  std::vector<double> t;
  std::vector<double> dist;
  double terminal = 0.0;
  bool monotone_tail = false;
};
ConvergenceTrace equilibrium_convergence(const RunRecord& run, const Equilibrium& eq);
ConvergenceTrace equilibrium_convergence(const std::vector<OdePoint>& traj,
                                         const Equilibrium& eq);

DiagnosticsReport convergence_report(const ConvergenceTrace& trace, double tol);

}  // namespace tme
