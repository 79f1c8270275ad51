#include "model.hpp"

#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace tme {

void ModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error(std::string("ModelParams: ") + name + " must be > 0");
    }
  };
  auto nonnegative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error(std::string("ModelParams: ") + name + " must be >= 0");
    }
  };
  positive(d_S, "d_S");
  positive(d_R, "d_R");
  positive(d_D, "d_D");
  positive(lambda_S, "lambda_S");
  positive(lambda_R, "lambda_R");
  positive(K, "K");
  positive(K_D, "K_D");
  positive(K_phi, "K_phi");
  positive(gamma_d, "gamma_d");
  nonnegative(alpha, "alpha");
  nonnegative(xi, "xi");
  nonnegative(eta, "eta");
  nonnegative(delta0, "delta0");
  nonnegative(theta, "theta");
  nonnegative(beta, "beta");
  if (!(alpha + xi > 0.0)) throw std::domain_error("ModelParams: alpha + xi must be > 0");
}

double delta_of(double D, const ModelParams& p) {
  if (D < 0.0 || !std::isfinite(D)) throw std::domain_error("delta_of: D must be >= 0");
  return p.delta0 * D / (D + p.K_D);
}

double phi_of(double D, const ModelParams& p) {
  if (D < 0.0 || !std::isfinite(D)) throw std::domain_error("phi_of: D must be >= 0");
  return D / (D + p.K_phi);
}

std::array<double, 5> reaction_rhs(const PointState& s, const ModelParams& p) {
  const double phi = phi_of(s.D, p);
  const double del = delta_of(s.D, p);
  const double logistic = 1.0 - (s.S + s.R) / p.K;

  const double g_s = p.lambda_S * s.S * logistic - p.alpha * s.S - del * s.S +
                     p.xi * (1.0 - phi) * s.R;
  const double g_r = p.lambda_R * s.R * logistic + p.alpha * s.S + p.eta * phi * s.A * s.R -
                     p.xi * (1.0 - phi) * s.R;
  const double g_d = -p.gamma_d * s.D;
  // Single switching flux keeps G_P + G_A = 0 exact.
  const double w = p.theta * phi * s.P - p.beta * (1.0 - phi) * s.A;
  return {g_s, g_r, g_d, -w, w};
}

std::array<double, 2> reduced_rhs(double S, double R, const ModelParams& p) {
  const double logistic = 1.0 - (S + R) / p.K;
  const double f_s = p.lambda_S * S * logistic - p.alpha * S + p.xi * R;
  const double f_r = p.lambda_R * R * logistic + p.alpha * S - p.xi * R;
  return {f_s, f_r};
}

Equilibrium coexistence_equilibrium(const ModelParams& p) {
  const double sum = p.alpha + p.xi;
  if (!(sum > 0.0)) throw std::domain_error("coexistence_equilibrium: alpha + xi must be > 0");
  if (!(p.K > 0.0)) throw std::domain_error("coexistence_equilibrium: K must be > 0");
  Equilibrium eq;
  eq.S_star = p.xi * p.K / sum;
  eq.R_star = p.alpha * p.K / sum;
  eq.boundary = (p.xi == 0.0 || p.alpha == 0.0);
  return eq;
}

Jacobian2 reduced_jacobian(double S, double R, const ModelParams& p) {
  Jacobian2 j;
  j.a = p.lambda_S * (1.0 - (2.0 * S + R) / p.K) - p.alpha;
  j.b = -p.lambda_S * S / p.K + p.xi;
  j.c = -p.lambda_R * R / p.K + p.alpha;
  j.d = p.lambda_R * (1.0 - (S + 2.0 * R) / p.K) - p.xi;
  return j;
}

std::vector<OdePoint> integrate_reduced_ode(double S0, double R0, const ModelParams& p,
                                            double t_end, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("integrate_reduced_ode: dt must be > 0");
  if (S0 < 0.0 || R0 < 0.0 || S0 + R0 <= 0.0) {
    throw std::domain_error("integrate_reduced_ode: need nonnegative init with S0 + R0 > 0");
  }

  const auto n_steps = static_cast<size_t>(std::ceil(t_end / dt - 1e-12));
  std::vector<OdePoint> out;
  out.reserve(n_steps + 1);
  double S = S0, R = R0;
  out.push_back({0.0, S, R});
  for (size_t n = 0; n < n_steps; ++n) {
    const double h = std::min(dt, t_end - static_cast<double>(n) * dt);
    const auto k1 = reduced_rhs(S, R, p);
    const auto k2 = reduced_rhs(S + 0.5 * h * k1[0], R + 0.5 * h * k1[1], p);
    const auto k3 = reduced_rhs(S + 0.5 * h * k2[0], R + 0.5 * h * k2[1], p);
    const auto k4 = reduced_rhs(S + h * k3[0], R + h * k3[1], p);
    S += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    R += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    const double t = static_cast<double>(n + 1) * dt;
    if (S < -1e-9 || R < -1e-9) {
      throw DivergenceError(S < -1e-9 ? "S" : "R", 0, t,
                            "integrate_reduced_ode: negative excursion, dt too large");
    }
    out.push_back({std::min(t, t_end), S, R});
  }
  return out;
}

}  // namespace tme
