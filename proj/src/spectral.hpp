#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "numerics.hpp"

namespace tme {

// Interval or rectangle; eigenpairs are analytic cosine products there.
struct SpatialDomain {
  int dimension = 1;
  double Lx = 0.0;
  double Ly = 0.0;

  void validate() const;
};

// One Neumann Laplacian eigenpair. lambda = (m*pi/Lx)^2 [+ (n*pi/Ly)^2];
// eval() returns the L^2-normalized eigenfunction at a point.
struct EigenMode {
  double lambda = 0.0;
  std::array<int, 2> indices{0, 0};
  int rank = 0;  // 1-based position in the sorted enumeration
  int dimension = 1;
  double Lx = 0.0;
  double Ly = 0.0;

  double eval(double x) const;
  double eval(double x, double y) const;
};

// First k_max eigenvalues with multiplicity, sorted nondecreasing,
// lambda_1 = 0 with constant eigenfunction.
std::vector<EigenMode> enumerate_modes(const SpatialDomain& domain, int k_max);

// Empirical Weyl constants: min and max over rank k >= 5 of lambda_k / k^(2/N).
struct WeylBand {
  double C1_hat = 0.0;
  double C2_hat = 0.0;
};
WeylBand weyl_check(const std::vector<EigenMode>& modes, int dimension);

// Chemotaxis sensitivities, signal PDE coefficients, and the feedback /
// closure gradients at equilibrium.
struct SignalCoupling {
  double chi_S = 0.0;
  double chi_R = 0.0;
  double d_c = 1.0;
  double kappa = 0.5;         // one-way production (c forced by kappa*A)
  double rho = 0.5;           // one-way decay
  double q = -0.5;            // two-way linear damping, must be < 0 when active
  double h_S_star = 0.0;      // feedback gradient dS h(S*,R*)
  double h_R_star = 0.0;
  double g_S_star = 0.0;      // closure gradient dS g(S*,R*)
  double g_R_star = 0.0;
  double epsilon = 0.01;      // fast-relaxation scale
  double Qprime_cstar = -0.5; // abstract one-way damping derivative
};

// Dispersion quadratic mu^2 + a1*mu + a0 = 0 of the base 2x2 mode matrix.
struct DispersionSample {
  double a1 = 0.0;
  double a0 = 0.0;
  double mu_plus = 0.0;  // max real part of the two roots
};
DispersionSample base_dispersion(const Jacobian2& J, double d_S, double d_R, double lambda);

// Closed-form certificate that no nonconstant mode destabilizes, with a
// numerical confirmation on a log-spaced lambda grid. A numerical
// contradiction (which the sign structure rules out) throws std::logic_error.
struct NoTuringCertificate {
  bool stable = false;
  std::string reason;
  double min_a1 = 0.0;
  double min_a0 = 0.0;
  double max_mu_plus = 0.0;
};
NoTuringCertificate no_turing_certificate(const ModelParams& p, double d_S, double d_R,
                                          double lambda_lo = 1e-4, double lambda_hi = 1e6,
                                          int grid_points = 400);

// Rank-one mobility correction H of the two-way closure.
Mat2 mobility_correction(const SignalCoupling& c, const Equilibrium& eq);

// A(lambda) = J - lambda * (diag(d_S, d_R) - H).
Mat2 twoway_mode_matrix(const Jacobian2& J, double d_S, double d_R, const Mat2& H,
                        double lambda);

// det(A(lambda)) = A1*lambda^2 + A2*lambda + detJ.
struct DetQuadratic {
  double A1 = 0.0;
  double A2 = 0.0;
  double detJ = 0.0;

  double eval(double lambda) const { return (A1 * lambda + A2) * lambda + detJ; }
};
DetQuadratic det_quadratic(const Jacobian2& J, double d_S, double d_R, const SignalCoupling& c,
                           const Equilibrium& eq);

enum class Classification {
  kinetically_unstable,  // precondition detJ > 0, tr J < 0 violated
  stable,
  trace_unstable,
  det_case_i,
  det_case_ii,
  det_case_iii,
};

const char* to_string(Classification c);

// Per-species data entering the trace condition and the regime report.
// feed_S = chi_S g*_S S*, feed_R = chi_R g*_R R*.
struct TwowayTerms {
  double tr_J = 0.0;
  double d_S = 0.0;
  double d_R = 0.0;
  double feed_S = 0.0;
  double feed_R = 0.0;
};

enum RegimeBit : unsigned { REGIME_S1 = 1u, REGIME_S2 = 2u, REGIME_S3 = 4u, REGIME_S4 = 8u };

struct ModeGrowth {
  int rank = 0;
  std::array<int, 2> indices{0, 0};
  double lambda = 0.0;
  double mu_plus = 0.0;
  bool unstable = false;
};

struct StabilityVerdict {
  bool kinetically_stable = false;
  Classification classification = Classification::kinetically_unstable;
  double A1 = 0.0;
  double A2 = 0.0;
  double detJ = 0.0;
  bool has_interval = false;     // true exactly for the det cases
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;        // +inf for the open cases (i) and (ii)
  unsigned regimes = 0;          // RegimeBit mask
  std::vector<ModeGrowth> per_mode;
};

// Trace condition is affine in lambda, so it is decided from the slope;
// det cases follow the quadratic. Trace instability takes precedence when
// both criteria fire.
StabilityVerdict classify_instability(double A1, double A2, double detJ,
                                      const TwowayTerms& terms);

// Full pipeline: equilibrium, Jacobian, mobility correction, classification.
StabilityVerdict twoway_verdict(const ModelParams& p, const SignalCoupling& c);

// mu_plus per eigenvalue of the given enumeration; marks unstable modes.
std::vector<ModeGrowth> mode_growth_table(const Jacobian2& J, double d_S, double d_R,
                                          const Mat2& H, const std::vector<EigenMode>& modes);

// One-way damped coupling: the 3x3 mode matrix is block upper-triangular, so
// the spectrum is the union of the (S,R) block spectrum and the scalar
// signal eigenvalue. The union identity is verified internally.
struct OnewaySpectrum {
  Mat3 matrix;
  std::array<Complex, 3> spectrum;
  std::array<Complex, 2> block_spectrum;
  double scalar_eig = 0.0;
  double union_mismatch = 0.0;  // max distance between spectrum and block union
};
OnewaySpectrum oneway_mode_spectrum(const Jacobian2& J, double d_S, double d_R,
                                    const SignalCoupling& c, const Equilibrium& eq,
                                    double lambda);

// Full two-way 3x3 mode matrix:
//   [ a - d_S l   b          chi_S S* l ]
//   [ c           d - d_R l  chi_R R* l ]
//   [ h*_S        h*_R       q - d_c l  ]
Mat3 full_twoway_mode_matrix(const Jacobian2& J, double d_S, double d_R,
                             const SignalCoupling& c, const Equilibrium& eq, double lambda);

// Schur identity det(mu I - M) = (mu - (q - d_c l)) det(mu I - A_eff(mu; l)),
// with the rank-one effective matrix built from M's own coupling entries.
// mu at the resolvent pole throws std::domain_error.
struct SchurCheck {
  Complex det3;
  Complex factored;
  double residual = 0.0;
  double scale = 0.0;
};
SchurCheck schur_factorization_residual(const Mat3& M, double lambda, Complex mu);

// Quasi-steady closure gradients g* = -h*/q and the leading-order matrix
// (J - l D) - l/(q - d_c l) * (chi_S S*, chi_R R*)^T (h*_S, h*_R).
struct QssClosure {
  double g_S = 0.0;
  double g_R = 0.0;
  Mat2 A_qss;
};
QssClosure qss_closure(const Jacobian2& J, double d_S, double d_R, const SignalCoupling& c,
                       const Equilibrium& eq, double lambda);

// Distance of the two slow eigenvalues of the 1/eps-scaled 3x3 system to the
// quasi-steady spectrum, per epsilon, with a fitted convergence order.
struct EpsRow {
  double eps = 0.0;
  double gap = 0.0;
  double fast_eig = 0.0;
};
struct EpsConvergence {
  std::vector<EpsRow> rows;
  double fitted_order = 0.0;
  bool order_defined = false;
  bool pairing_ok = true;
};
EpsConvergence eps_spectrum_convergence(const Jacobian2& J, double d_S, double d_R,
                                        const SignalCoupling& c, const Equilibrium& eq,
                                        double lambda, const std::vector<double>& eps_list);

// n log-spaced points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace tme
