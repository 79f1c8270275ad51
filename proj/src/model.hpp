#pragma once

#include <array>
#include <vector>

#include "numerics.hpp"

namespace tme {

// Kinetic, diffusion, and switching constants of the hybrid model.
// All rates are 1/time, diffusivities length^2/time, K a density,
// K_D / K_phi concentrations.
struct ModelParams {
  double d_S = 0.01;
  double d_R = 0.01;
  double d_D = 1.0;
  double lambda_S = 1.0;
  double lambda_R = 1.0;
  double K = 1.0;
  double alpha = 0.5;     // conversion S -> R
  double xi = 0.5;        // conversion R -> S
  double eta = 0.2;       // promotion of R by the active component
  double delta0 = 0.5;    // maximal inhibition rate
  double K_D = 1.0;       // half-saturation of delta
  double gamma_d = 0.3;   // signal decay
  double theta = 0.7;     // activation rate P -> A
  double beta = 0.5;      // deactivation rate A -> P
  double K_phi = 1.0;     // half-saturation of the default activation function

  void validate() const;  // throws std::domain_error on a bad combination
};

// Local state at one spatial point.
struct PointState {
  double S = 0.0, R = 0.0, D = 0.0, P = 0.0, A = 0.0;
};

// Jacobian of the reduced (S,R) kinetics at a point.
struct Jacobian2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }
  Mat2 mat() const { return {a, b, c, d}; }
};

struct Equilibrium {
  double S_star = 0.0;
  double R_star = 0.0;
  double c_star = 0.0;     // signal level for chemotaxis extensions
  bool boundary = false;   // xi == 0 or alpha == 0: equilibrium sits on an axis
};

// Saturating inhibition delta0 * D / (D + K_D).
double delta_of(double D, const ModelParams& p);

// Activation function; default Hill-1 form D / (D + K_phi).
// Nondecreasing, in [0,1), phi(0) = 0, Lipschitz with constant 1/K_phi.
double phi_of(double D, const ModelParams& p);

// Non-diffusive right-hand side (G_S, G_R, G_D, G_P, G_A) of the full system.
// G_P + G_A = 0 holds exactly: the switching flux is evaluated once and used
// with opposite signs.
std::array<double, 5> reaction_rhs(const PointState& s, const ModelParams& p);

// Reduced kinetics (f_S, f_R) with the signal set to zero.
std::array<double, 2> reduced_rhs(double S, double R, const ModelParams& p);

Equilibrium coexistence_equilibrium(const ModelParams& p);

Jacobian2 reduced_jacobian(double S, double R, const ModelParams& p);

struct OdePoint {
  double t = 0.0;
  double S = 0.0;
  double R = 0.0;
};

// Fixed-step classical RK4 on the reduced kinetics. Throws DivergenceError if
// a component drops below -1e-9 (step size too large).
std::vector<OdePoint> integrate_reduced_ode(double S0, double R0, const ModelParams& p,
                                            double t_end, double dt);

}  // namespace tme
