#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tme {

namespace {

constexpr double kPi = std::numbers::pi;

double axis_norm(int m, double L) {
  return m == 0 ? std::sqrt(1.0 / L) : std::sqrt(2.0 / L);
}

double axis_eval(int m, double L, double x) {
  return axis_norm(m, L) * std::cos(static_cast<double>(m) * kPi * x / L);
}

}  // namespace

void SpatialDomain::validate() const {
  if (dimension != 1 && dimension != 2) {
    throw std::domain_error("SpatialDomain: dimension must be 1 or 2");
  }
  if (!(Lx > 0.0)) throw std::domain_error("SpatialDomain: Lx must be > 0");
  if (dimension == 2 && !(Ly > 0.0)) throw std::domain_error("SpatialDomain: Ly must be > 0");
}

double EigenMode::eval(double x) const { return axis_eval(indices[0], Lx, x); }

double EigenMode::eval(double x, double y) const {
  return axis_eval(indices[0], Lx, x) * axis_eval(indices[1], Ly, y);
}

std::vector<EigenMode> enumerate_modes(const SpatialDomain& domain, int k_max) {
  domain.validate();
  if (k_max < 1) throw std::domain_error("enumerate_modes: k_max must be >= 1");

  std::vector<EigenMode> modes;
  if (domain.dimension == 1) {
    modes.reserve(static_cast<size_t>(k_max));
    for (int m = 0; m < k_max; ++m) {
      EigenMode mode;
      const double w = static_cast<double>(m) * kPi / domain.Lx;
      mode.lambda = w * w;
      mode.indices = {m, 0};
      mode.dimension = 1;
      mode.Lx = domain.Lx;
      modes.push_back(mode);
    }
  } else {
    // Grow the index box until the k_max-th smallest eigenvalue is certainly
    // below anything outside the box.
    const double l_min = std::min(domain.Lx, domain.Ly);
    int box = 8;
    while (true) {
      modes.clear();
      for (int m = 0; m <= box; ++m) {
        for (int n = 0; n <= box; ++n) {
          EigenMode mode;
          const double wx = static_cast<double>(m) * kPi / domain.Lx;
          const double wy = static_cast<double>(n) * kPi / domain.Ly;
          mode.lambda = wx * wx + wy * wy;
          mode.indices = {m, n};
          mode.dimension = 2;
          mode.Lx = domain.Lx;
          mode.Ly = domain.Ly;
          modes.push_back(mode);
        }
      }
      std::sort(modes.begin(), modes.end(), [](const EigenMode& a, const EigenMode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.indices[0] != b.indices[0]) return a.indices[0] < b.indices[0];
        return a.indices[1] < b.indices[1];
      });
      const double outside = std::pow(static_cast<double>(box + 1) * kPi / l_min, 2);
      if (static_cast<int>(modes.size()) >= k_max &&
          modes[static_cast<size_t>(k_max - 1)].lambda < outside) {
        break;
      }
      box *= 2;
    }
    modes.resize(static_cast<size_t>(k_max));
  }
  for (int k = 0; k < static_cast<int>(modes.size()); ++k) {
    modes[static_cast<size_t>(k)].rank = k + 1;
  }
  return modes;
}

WeylBand weyl_check(const std::vector<EigenMode>& modes, int dimension) {
  if (modes.size() < 10) throw std::invalid_argument("weyl_check: need at least 10 modes");
  const double expnt = 2.0 / static_cast<double>(dimension);
  WeylBand band{std::numeric_limits<double>::infinity(), 0.0};
  for (const EigenMode& m : modes) {
    if (m.rank < 5) continue;
    const double ratio = m.lambda / std::pow(static_cast<double>(m.rank), expnt);
    band.C1_hat = std::min(band.C1_hat, ratio);
    band.C2_hat = std::max(band.C2_hat, ratio);
  }
  return band;
}

DispersionSample base_dispersion(const Jacobian2& J, double d_S, double d_R, double lambda) {
  if (!(d_S > 0.0) || !(d_R > 0.0)) {
    throw std::domain_error("base_dispersion: diffusivities must be > 0");
  }
  if (lambda < 0.0) throw std::domain_error("base_dispersion: lambda must be >= 0");
  DispersionSample s;
  s.a1 = lambda * (d_S + d_R) - J.trace();
  s.a0 = d_S * d_R * lambda * lambda - (d_S * J.d + d_R * J.a) * lambda + J.det();
  const double disc = s.a1 * s.a1 - 4.0 * s.a0;
  s.mu_plus = disc >= 0.0 ? (-s.a1 + std::sqrt(disc)) / 2.0 : -s.a1 / 2.0;
  return s;
}

NoTuringCertificate no_turing_certificate(const ModelParams& p, double d_S, double d_R,
                                          double lambda_lo, double lambda_hi, int grid_points) {
  p.validate();
  const Equilibrium eq = coexistence_equilibrium(p);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, p);

  NoTuringCertificate cert;
  cert.reason =
      "a < 0 and d < 0 at the coexistence equilibrium, so a1(l) = l(dS+dR) - tr(J) > 0 and "
      "a0(l) >= dS dR l^2 + det(J) > 0 for every l > 0";
  cert.min_a1 = std::numeric_limits<double>::infinity();
  cert.min_a0 = std::numeric_limits<double>::infinity();
  cert.max_mu_plus = -std::numeric_limits<double>::infinity();
  for (double lambda : log_grid(lambda_lo, lambda_hi, grid_points)) {
    const DispersionSample s = base_dispersion(J, d_S, d_R, lambda);
    cert.min_a1 = std::min(cert.min_a1, s.a1);
    cert.min_a0 = std::min(cert.min_a0, s.a0);
    cert.max_mu_plus = std::max(cert.max_mu_plus, s.mu_plus);
  }
  cert.stable = J.a < 0.0 && J.d < 0.0 && J.trace() < 0.0 && J.det() > 0.0;
  if (!cert.stable || cert.min_a1 <= 0.0 || cert.min_a0 <= 0.0 || cert.max_mu_plus >= 0.0) {
    throw std::logic_error("no_turing_certificate: numerical scan contradicts the sign structure");
  }
  return cert;
}

Mat2 mobility_correction(const SignalCoupling& c, const Equilibrium& eq) {
  return {c.chi_S * c.g_S_star * eq.S_star, c.chi_S * c.g_R_star * eq.S_star,
          c.chi_R * c.g_S_star * eq.R_star, c.chi_R * c.g_R_star * eq.R_star};
}

Mat2 twoway_mode_matrix(const Jacobian2& J, double d_S, double d_R, const Mat2& H,
                        double lambda) {
  if (lambda < 0.0) throw std::domain_error("twoway_mode_matrix: lambda must be >= 0");
  const Mat2 D{d_S, 0.0, 0.0, d_R};
  return J.mat() - lambda * (D - H);
}

DetQuadratic det_quadratic(const Jacobian2& J, double d_S, double d_R, const SignalCoupling& c,
                           const Equilibrium& eq) {
  DetQuadratic qd;
  const double gs = c.g_S_star, gr = c.g_R_star;
  const double S = eq.S_star, R = eq.R_star;
  qd.A1 = d_S * d_R - d_S * c.chi_R * gr * R - d_R * c.chi_S * gs * S;
  qd.A2 = -J.a * d_R - J.d * d_S + J.a * c.chi_R * gr * R + J.d * c.chi_S * gs * S -
          J.b * c.chi_R * gs * R - J.c * c.chi_S * gr * S;
  qd.detJ = J.det();
  return qd;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::kinetically_unstable: return "kinetically_unstable";
    case Classification::stable: return "stable";
    case Classification::trace_unstable: return "trace_unstable";
    case Classification::det_case_i: return "det_case_i";
    case Classification::det_case_ii: return "det_case_ii";
    case Classification::det_case_iii: return "det_case_iii";
  }
  return "unknown";
}

StabilityVerdict classify_instability(double A1, double A2, double detJ,
                                      const TwowayTerms& terms) {
  StabilityVerdict v;
  v.A1 = A1;
  v.A2 = A2;
  v.detJ = detJ;
  v.kinetically_stable = detJ > 0.0 && terms.tr_J < 0.0;
  if (!v.kinetically_stable) {
    v.classification = Classification::kinetically_unstable;
    return v;
  }

  const double inf = std::numeric_limits<double>::infinity();
  const double a1_tol =
      1e-12 * std::max(terms.d_S * terms.d_R,
                       std::abs(terms.d_S * terms.feed_R) + std::abs(terms.d_R * terms.feed_S));
  const bool a1_zero = std::abs(A1) <= a1_tol;

  if (terms.feed_S > terms.d_S || terms.feed_R > terms.d_R) v.regimes |= REGIME_S1;
  if (terms.feed_S / terms.d_S + terms.feed_R / terms.d_R > 1.0) v.regimes |= REGIME_S2;
  if (a1_zero && A2 < 0.0) v.regimes |= REGIME_S3;
  if (!a1_zero && A1 > 0.0 && A2 < 0.0 && A2 * A2 > 4.0 * A1 * detJ) v.regimes |= REGIME_S4;

  // tr(A(l)) = tr_J + l * (feed_S + feed_R - d_S - d_R) is affine in l.
  const double trace_slope = terms.feed_S + terms.feed_R - terms.d_S - terms.d_R;
  if (trace_slope > 0.0) {
    v.classification = Classification::trace_unstable;
    return v;
  }

  if (a1_zero) {
    if (A2 < 0.0) {
      v.classification = Classification::det_case_ii;
      v.has_interval = true;
      v.lambda_lo = -detJ / A2;
      v.lambda_hi = inf;
    } else {
      v.classification = Classification::stable;
    }
    return v;
  }

  if (A1 < 0.0) {
    // detJ/A1 < 0: one positive root, large modes destabilize.
    const auto [count, roots] = real_quadratic_roots(A1, A2, detJ);
    v.classification = Classification::det_case_i;
    v.has_interval = true;
    v.lambda_lo = std::max(roots[0], roots[1]);
    v.lambda_hi = inf;
    (void)count;
    return v;
  }

  if (A2 < 0.0 && A2 * A2 > 4.0 * A1 * detJ) {
    const auto [count, roots] = real_quadratic_roots(A1, A2, detJ);
    if (count == 2) {
      v.classification = Classification::det_case_iii;
      v.has_interval = true;
      v.lambda_lo = roots[0];
      v.lambda_hi = roots[1];
      return v;
    }
  }
  v.classification = Classification::stable;
  return v;
}

StabilityVerdict twoway_verdict(const ModelParams& p, const SignalCoupling& c) {
  p.validate();
  const Equilibrium eq = coexistence_equilibrium(p);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, p);
  const DetQuadratic qd = det_quadratic(J, p.d_S, p.d_R, c, eq);
  TwowayTerms terms;
  terms.tr_J = J.trace();
  terms.d_S = p.d_S;
  terms.d_R = p.d_R;
  terms.feed_S = c.chi_S * c.g_S_star * eq.S_star;
  terms.feed_R = c.chi_R * c.g_R_star * eq.R_star;
  return classify_instability(qd.A1, qd.A2, qd.detJ, terms);
}

std::vector<ModeGrowth> mode_growth_table(const Jacobian2& J, double d_S, double d_R,
                                          const Mat2& H, const std::vector<EigenMode>& modes) {
  std::vector<ModeGrowth> table;
  table.reserve(modes.size());
  for (const EigenMode& m : modes) {
    ModeGrowth row;
    row.rank = m.rank;
    row.indices = m.indices;
    row.lambda = m.lambda;
    row.mu_plus = spectral_abscissa(twoway_mode_matrix(J, d_S, d_R, H, m.lambda));
    row.unstable = row.mu_plus > 0.0;
    table.push_back(row);
  }
  return table;
}

OnewaySpectrum oneway_mode_spectrum(const Jacobian2& J, double d_S, double d_R,
                                    const SignalCoupling& c, const Equilibrium& eq,
                                    double lambda) {
  if (!(c.Qprime_cstar < 0.0)) {
    throw std::domain_error("oneway_mode_spectrum: Q'(c*) must be < 0");
  }
  if (!(c.d_c > 0.0)) throw std::domain_error("oneway_mode_spectrum: d_c must be > 0");
  if (lambda < 0.0) throw std::domain_error("oneway_mode_spectrum: lambda must be >= 0");

  OnewaySpectrum out;
  Mat3& M = out.matrix;
  M(0, 0) = J.a - lambda * d_S;
  M(0, 1) = J.b;
  M(0, 2) = c.chi_S * eq.S_star * lambda;
  M(1, 0) = J.c;
  M(1, 1) = J.d - lambda * d_R;
  M(1, 2) = c.chi_R * eq.R_star * lambda;
  M(2, 0) = 0.0;
  M(2, 1) = 0.0;
  M(2, 2) = c.Qprime_cstar - lambda * c.d_c;

  out.spectrum = eigenvalues(M);
  out.block_spectrum = eigenvalues(Mat2{M(0, 0), M(0, 1), M(1, 0), M(1, 1)});
  out.scalar_eig = M(2, 2);

  // Triangular structure: the spectrum must be the union of the blocks.
  std::array<Complex, 3> expected{out.block_spectrum[0], out.block_spectrum[1],
                                  Complex(out.scalar_eig, 0.0)};
  std::sort(expected.begin(), expected.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  for (int i = 0; i < 3; ++i) {
    out.union_mismatch = std::max(
        out.union_mismatch,
        std::abs(expected[static_cast<size_t>(i)] - out.spectrum[static_cast<size_t>(i)]));
  }
  if (out.union_mismatch > 1e-10 * (1.0 + M.frobenius())) {
    throw std::logic_error("oneway_mode_spectrum: spectrum differs from block union");
  }
  return out;
}

Mat3 full_twoway_mode_matrix(const Jacobian2& J, double d_S, double d_R,
                             const SignalCoupling& c, const Equilibrium& eq, double lambda) {
  if (!(c.q < 0.0)) throw std::domain_error("full_twoway_mode_matrix: q must be < 0");
  Mat3 M;
  M(0, 0) = J.a - lambda * d_S;
  M(0, 1) = J.b;
  M(0, 2) = c.chi_S * eq.S_star * lambda;
  M(1, 0) = J.c;
  M(1, 1) = J.d - lambda * d_R;
  M(1, 2) = c.chi_R * eq.R_star * lambda;
  M(2, 0) = c.h_S_star;
  M(2, 1) = c.h_R_star;
  M(2, 2) = c.q - lambda * c.d_c;
  return M;
}

SchurCheck schur_factorization_residual(const Mat3& M, double lambda, Complex mu) {
  const double pole = M(2, 2);  // q - d_c * lambda
  if (std::abs(mu - Complex(pole, 0.0)) <= 1e-12 * (1.0 + std::abs(pole))) {
    throw std::domain_error("schur_factorization_residual: mu at the resolvent pole");
  }
  (void)lambda;

  SchurCheck out;
  out.det3 = char_det(M, mu);

  // A_eff(mu) = UL + (mu - pole)^{-1} * col * row, with col the lambda-scaled
  // coupling column and row the feedback gradients as stored in M.
  const Complex s = 1.0 / (mu - pole);
  const Complex a11 = M(0, 0) + s * M(0, 2) * M(2, 0);
  const Complex a12 = M(0, 1) + s * M(0, 2) * M(2, 1);
  const Complex a21 = M(1, 0) + s * M(1, 2) * M(2, 0);
  const Complex a22 = M(1, 1) + s * M(1, 2) * M(2, 1);
  const Complex det2 = (mu - a11) * (mu - a22) - a12 * a21;
  out.factored = (mu - pole) * det2;
  out.residual = std::abs(out.det3 - out.factored);
  out.scale = std::max(1.0, std::abs(out.det3));
  return out;
}

QssClosure qss_closure(const Jacobian2& J, double d_S, double d_R, const SignalCoupling& c,
                       const Equilibrium& eq, double lambda) {
  if (!(c.q < 0.0)) throw std::domain_error("qss_closure: q must be < 0");
  QssClosure out;
  out.g_S = -c.h_S_star / c.q;
  out.g_R = -c.h_R_star / c.q;

  const double pole = c.q - c.d_c * lambda;
  const double s = -lambda / pole;
  const double col_s = c.chi_S * eq.S_star;
  const double col_r = c.chi_R * eq.R_star;
  const Mat2 base{J.a - lambda * d_S, J.b, J.c, J.d - lambda * d_R};
  const Mat2 rank_one{s * col_s * c.h_S_star, s * col_s * c.h_R_star,
                      s * col_r * c.h_S_star, s * col_r * c.h_R_star};
  out.A_qss = base + rank_one;
  return out;
}

EpsConvergence eps_spectrum_convergence(const Jacobian2& J, double d_S, double d_R,
                                        const SignalCoupling& c, const Equilibrium& eq,
                                        double lambda, const std::vector<double>& eps_list) {
  for (size_t i = 0; i + 1 < eps_list.size(); ++i) {
    if (!(eps_list[i] > eps_list[i + 1]) || !(eps_list[i + 1] > 0.0)) {
      throw std::domain_error("eps_spectrum_convergence: eps list must be positive decreasing");
    }
  }
  if (eps_list.empty() || !(eps_list.front() > 0.0)) {
    throw std::domain_error("eps_spectrum_convergence: eps list must be positive decreasing");
  }

  const Mat3 M = full_twoway_mode_matrix(J, d_S, d_R, c, eq, lambda);
  const QssClosure qss = qss_closure(J, d_S, d_R, c, eq, lambda);
  const auto target = eigenvalues(qss.A_qss);

  EpsConvergence out;
  for (double eps : eps_list) {
    Mat3 Me = M;
    Me(2, 0) /= eps;
    Me(2, 1) /= eps;
    Me(2, 2) /= eps;
    const auto ev = eigenvalues(Me);

    // The fast eigenvalue tracks (q - d_c l) / eps; the other two are slow.
    const Complex fast_ref(M(2, 2) / eps, 0.0);
    size_t fast_idx = 0;
    double best = std::numeric_limits<double>::infinity(), second = best;
    for (size_t i = 0; i < 3; ++i) {
      const double dist = std::abs(ev[i] - fast_ref);
      if (dist < best) {
        second = best;
        best = dist;
        fast_idx = i;
      } else {
        second = std::min(second, dist);
      }
    }
    if (!(best < 0.5 * second)) out.pairing_ok = false;

    std::array<Complex, 2> slow;
    int w = 0;
    for (size_t i = 0; i < 3; ++i) {
      if (i != fast_idx) slow[static_cast<size_t>(w++)] = ev[i];
    }
    const double pair_a =
        std::max(std::abs(slow[0] - target[0]), std::abs(slow[1] - target[1]));
    const double pair_b =
        std::max(std::abs(slow[0] - target[1]), std::abs(slow[1] - target[0]));
    EpsRow row;
    row.eps = eps;
    row.gap = std::min(pair_a, pair_b);
    row.fast_eig = ev[fast_idx].real();
    out.rows.push_back(row);
  }

  std::vector<double> lx, ly;
  for (const EpsRow& r : out.rows) {
    if (r.gap > 1e-14) {
      lx.push_back(std::log(r.eps));
      ly.push_back(std::log(r.gap));
    }
  }
  if (lx.size() >= 2) {
    out.fitted_order = fit_line(lx, ly).slope;
    out.order_defined = true;
  }
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw std::domain_error("log_grid: need 0 < lo < hi and n >= 2");
  }
  std::vector<double> g(static_cast<size_t>(n));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) {
    g[static_cast<size_t>(i)] =
        std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

}  // namespace tme
