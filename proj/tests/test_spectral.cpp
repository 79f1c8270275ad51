#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "model.hpp"
#include "spectral.hpp"

using namespace tme;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams reference_kinetics() {
  ModelParams p;
  p.lambda_S = 1.5;
  p.lambda_R = 1.0;
  p.K = 10.0;
  p.alpha = 0.6;
  p.xi = 0.4;
  return p;
}

// Reduced-closure coupling that opens a bounded unstable band.
SignalCoupling band_coupling() {
  SignalCoupling c;
  c.chi_S = 0.0;
  c.chi_R = 1.0;
  c.g_S_star = -1.0;
  c.g_R_star = 0.0;
  return c;
}

Jacobian2 f5_jacobian() { return reduced_jacobian(4.0, 6.0, reference_kinetics()); }

ModelParams random_kinetics(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p;
  p.lambda_S = 0.1 + 4.0 * u(rng);
  p.lambda_R = 0.1 + 4.0 * u(rng);
  p.K = 0.5 + 40.0 * u(rng);
  p.alpha = 0.05 + 2.0 * u(rng);
  p.xi = 0.05 + 2.0 * u(rng);
  return p;
}

}  // namespace

TEST_CASE("eigenvalue solvers satisfy the characteristic polynomial") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    Mat2 m{u(rng), u(rng), u(rng), u(rng)};
    for (const Complex& mu : eigenvalues(m)) {
      CHECK(charpoly_residual(m, mu) <= 1e-9 * (1.0 + std::pow(m.frobenius(), 3)));
    }
    Mat3 M;
    for (int k = 0; k < 9; ++k) M.e[static_cast<size_t>(k)] = u(rng);
    for (const Complex& mu : eigenvalues(M)) {
      CHECK(charpoly_residual(M, mu) <= 1e-9 * (1.0 + std::pow(M.frobenius(), 3)));
    }
  }
}

TEST_CASE("Routh-Hurwitz equivalence for 2x2 blocks") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    Mat2 m{u(rng), u(rng), u(rng), u(rng)};
    const bool unstable_eig = spectral_abscissa(m) > 1e-12;
    const bool unstable_rh = m.trace() > 1e-12 || m.det() < -1e-12;
    if (std::abs(m.trace()) > 1e-9 && std::abs(m.det()) > 1e-9) {
      CHECK(unstable_eig == unstable_rh);
    }
  }
}

TEST_CASE("mode enumeration") {
  SUBCASE("interval with L = pi") {
    const auto modes = enumerate_modes({1, kPi, 0.0}, 4);
    REQUIRE(modes.size() == 4);
    CHECK(modes[0].lambda == 0.0);
    CHECK(modes[0].rank == 1);
    CHECK(modes[1].lambda == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(modes[2].lambda == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(modes[3].lambda == doctest::Approx(9.0).epsilon(1e-14));
  }
  SUBCASE("interval with L = 2") {
    const auto modes = enumerate_modes({1, 2.0, 0.0}, 3);
    CHECK(modes[0].lambda == 0.0);
    CHECK(modes[1].lambda == doctest::Approx(2.4674011002723395).epsilon(1e-12));
    CHECK(modes[2].lambda == doctest::Approx(9.869604401089358).epsilon(1e-12));
  }
  SUBCASE("square: first nonzero eigenvalue has multiplicity two") {
    const auto modes = enumerate_modes({2, kPi, kPi}, 4);
    CHECK(modes[0].lambda == 0.0);
    CHECK(modes[1].lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(modes[2].lambda == doctest::Approx(1.0).epsilon(1e-12));
    const bool pair_ok = (modes[1].indices == std::array<int, 2>{0, 1} &&
                          modes[2].indices == std::array<int, 2>{1, 0}) ||
                         (modes[1].indices == std::array<int, 2>{1, 0} &&
                          modes[2].indices == std::array<int, 2>{0, 1});
    CHECK(pair_ok);
  }
  SUBCASE("eigenfunctions are L2-normalized") {
    const auto modes = enumerate_modes({1, 2.5, 0.0}, 5);
    const int n = 4096;
    const double dx = 2.5 / n;
    for (const EigenMode& m : modes) {
      double mass = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = m.eval((i + 0.5) * dx);
        mass += w * w * dx;
      }
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("weyl scaling band") {
  SUBCASE("interval") {
    const auto modes = enumerate_modes({1, kPi, 0.0}, 50);
    const WeylBand band = weyl_check(modes, 1);
    CHECK(band.C1_hat == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(band.C2_hat == doctest::Approx(0.9604).epsilon(1e-12));
    CHECK(band.C1_hat >= 0.5);
    CHECK(band.C2_hat <= 1.1);
  }
  SUBCASE("square stays within a factor-4 band") {
    const auto modes = enumerate_modes({2, kPi, kPi}, 100);
    const WeylBand band = weyl_check(modes, 2);
    CHECK(band.C1_hat > 0.0);
    CHECK(band.C2_hat / band.C1_hat <= 4.0);
  }
  SUBCASE("needs at least 10 modes") {
    const auto modes = enumerate_modes({1, kPi, 0.0}, 9);
    CHECK_THROWS_AS(weyl_check(modes, 1), std::invalid_argument);
  }
}

TEST_CASE("base dispersion") {
  const Jacobian2 J = f5_jacobian();

  SUBCASE("constant mode reduces to the kinetics") {
    const DispersionSample s = base_dispersion(J, 1.0, 1.0, 0.0);
    CHECK(s.a1 == doctest::Approx(-J.trace()).epsilon(1e-14));
    CHECK(s.a0 == doctest::Approx(J.det()).epsilon(1e-14));
    CHECK(s.mu_plus == doctest::Approx(spectral_abscissa(J.mat())).epsilon(1e-12));
  }
  SUBCASE("worked values at lambda = 4") {
    const DispersionSample s = base_dispersion(J, 1.0, 1.0, 4.0);
    CHECK(s.a1 == doctest::Approx(10.2).epsilon(1e-14));
    CHECK(s.a0 == doctest::Approx(26.0).epsilon(1e-14));
    CHECK(s.mu_plus < 0.0);
  }
  SUBCASE("positivity sweep over random diffusion and lambda") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
      const double d_s = std::exp(std::log(1e-3) + u(rng) * std::log(1e4));
      const double d_r = std::exp(std::log(1e-3) + u(rng) * std::log(1e4));
      const double lambda = std::exp(std::log(1e-4) + u(rng) * std::log(1e10));
      const DispersionSample s = base_dispersion(J, d_s, d_r, lambda);
      CHECK(s.a1 > 0.0);
      CHECK(s.a0 > 0.0);
      CHECK(s.mu_plus < 0.0);
    }
  }
}

TEST_CASE("no-Turing certificate") {
  const ModelParams p = reference_kinetics();
  {
    const NoTuringCertificate cert = no_turing_certificate(p, 1.0, 1.0);
    CHECK(cert.stable);
    CHECK(cert.max_mu_plus < 0.0);
    // a0 decreases toward det(J) as lambda -> 0+.
    CHECK(cert.min_a0 >= f5_jacobian().det());
    CHECK(cert.min_a0 == doctest::Approx(f5_jacobian().det()).epsilon(1e-3));
  }
  {
    const NoTuringCertificate cert = no_turing_certificate(p, 1e-3, 10.0);
    CHECK(cert.stable);
  }
  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    const ModelParams q = random_kinetics(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double d_s = std::exp(std::log(1e-3) + u(rng) * std::log(1e4));
    const double d_r = std::exp(std::log(1e-3) + u(rng) * std::log(1e4));
    CHECK(no_turing_certificate(q, d_s, d_r).stable);
  }
}

TEST_CASE("mobility correction") {
  const Equilibrium eq{4.0, 6.0, 0.0, false};
  SUBCASE("no chemotaxis gives the zero matrix") {
    SignalCoupling c;
    const Mat2 H = mobility_correction(c, eq);
    CHECK(H.a11 == 0.0);
    CHECK(H.a12 == 0.0);
    CHECK(H.a21 == 0.0);
    CHECK(H.a22 == 0.0);
  }
  SUBCASE("the banded coupling fill-in") {
    const Mat2 H = mobility_correction(band_coupling(), eq);
    CHECK(H.a11 == 0.0);
    CHECK(H.a12 == 0.0);
    CHECK(H.a21 == doctest::Approx(-6.0).epsilon(1e-14));
    CHECK(H.a22 == 0.0);
  }
  SUBCASE("S-side fill-in") {
    SignalCoupling c;
    c.chi_S = 1.0;
    c.g_S_star = 0.5;
    const Mat2 H = mobility_correction(c, eq);
    CHECK(H.a11 == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(H.a22 == 0.0);
    CHECK(H.a21 == 0.0);
  }
}

TEST_CASE("two-way mode matrix") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};
  const Mat2 H = mobility_correction(band_coupling(), eq);

  SUBCASE("lambda = 0 recovers the Jacobian") {
    const Mat2 A = twoway_mode_matrix(J, 0.05, 0.05, H, 0.0);
    CHECK(A.a11 == doctest::Approx(J.a).epsilon(1e-14));
    CHECK(A.a22 == doctest::Approx(J.d).epsilon(1e-14));
  }
  SUBCASE("worked entries at lambda = 4") {
    const Mat2 A = twoway_mode_matrix(J, 0.05, 0.05, H, 4.0);
    CHECK(A.a11 == doctest::Approx(-1.4).epsilon(1e-14));
    CHECK(A.a12 == doctest::Approx(-0.2).epsilon(1e-14));
    // A = J - lambda (D - H) with H21 = -6, so the (2,1) entry is
    // c - lambda (0 - (-6)) = -24; its sign is pinned by the determinant
    // cross-check below.
    CHECK(A.a21 == doctest::Approx(-24.0).epsilon(1e-14));
    CHECK(A.a22 == doctest::Approx(-1.2).epsilon(1e-14));
    CHECK(A.trace() == doctest::Approx(-2.6).epsilon(1e-14));
    CHECK(A.det() == doctest::Approx(-3.12).epsilon(1e-12));
    const DetQuadratic qd = det_quadratic(J, 0.05, 0.05, band_coupling(), eq);
    CHECK(A.det() == doctest::Approx(qd.eval(4.0)).epsilon(1e-12));
  }
  SUBCASE("H = 0 reduces to the base dispersion matrix") {
    const Mat2 A = twoway_mode_matrix(J, 0.3, 0.7, Mat2{}, 2.5);
    const DispersionSample s = base_dispersion(J, 0.3, 0.7, 2.5);
    CHECK(A.trace() == doctest::Approx(-s.a1).epsilon(1e-13));
    CHECK(A.det() == doctest::Approx(s.a0).epsilon(1e-13));
  }
}

TEST_CASE("determinant quadratic coefficients") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};

  SUBCASE("no chemotaxis recovers the base positivity") {
    SignalCoupling c;
    const DetQuadratic qd = det_quadratic(J, 0.05, 0.05, c, eq);
    CHECK(qd.A1 == doctest::Approx(0.0025).epsilon(1e-14));
    CHECK(qd.A2 == doctest::Approx(-J.a * 0.05 - J.d * 0.05).epsilon(1e-13));
    CHECK(qd.A1 > 0.0);
    CHECK(qd.A2 > 0.0);
  }
  SUBCASE("the banded coupling worked values") {
    const DetQuadratic qd = det_quadratic(J, 0.05, 0.05, band_coupling(), eq);
    CHECK(qd.A1 == doctest::Approx(0.0025).epsilon(1e-14));
    CHECK(qd.A2 == doctest::Approx(-1.09).epsilon(1e-13));
    CHECK(qd.detJ == doctest::Approx(1.2).epsilon(1e-13));
  }
  SUBCASE("strong S-feedback flips A1 (regime S1)") {
    SignalCoupling c;
    c.chi_S = 1.0;
    c.g_S_star = 0.5;
    const DetQuadratic qd = det_quadratic(J, 1.0, 1.0, c, eq);
    CHECK(qd.A1 == doctest::Approx(-1.0).epsilon(1e-14));
  }
  SUBCASE("quadratic reproduces matrix determinants at random lambda") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int cfgi = 0; cfgi < 50; ++cfgi) {
      SignalCoupling c;
      c.chi_S = 2.0 * u(rng);
      c.chi_R = 2.0 * u(rng);
      c.g_S_star = 2.0 * u(rng) - 1.0;
      c.g_R_star = 2.0 * u(rng) - 1.0;
      const double d_s = 0.01 + u(rng), d_r = 0.01 + u(rng);
      const Mat2 H = mobility_correction(c, eq);
      const DetQuadratic qd = det_quadratic(J, d_s, d_r, c, eq);
      for (int i = 0; i < 20; ++i) {
        const double lambda = std::exp(std::log(1e-3) + u(rng) * std::log(1e7));
        const Mat2 A = twoway_mode_matrix(J, d_s, d_r, H, lambda);
        const double scale = std::max({1.0, std::abs(A.det())});
        CHECK(std::abs(A.det() - qd.eval(lambda)) <= 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("instability classification") {
  const TwowayTerms f5_terms{-2.2, 0.05, 0.05, 0.0, 0.0};

  SUBCASE("the banded coupling is det case iii with the frozen band") {
    const StabilityVerdict v = classify_instability(0.0025, -1.09, 1.2, f5_terms);
    CHECK(v.kinetically_stable);
    CHECK(v.classification == Classification::det_case_iii);
    REQUIRE(v.has_interval);
    // Quadratic-formula oracle: roots of 0.0025 l^2 - 1.09 l + 1.2.
    CHECK(v.lambda_lo == doctest::Approx(1.1037114194897064).epsilon(1e-12));
    CHECK(v.lambda_hi == doctest::Approx(434.89628858051029).epsilon(1e-12));
    CHECK((v.regimes & REGIME_S4) != 0);
    CHECK((v.regimes & REGIME_S1) == 0);
    CHECK((v.regimes & REGIME_S2) == 0);
    CHECK((v.regimes & REGIME_S3) == 0);
  }
  SUBCASE("A1 < 0 gives case i with an open interval") {
    const StabilityVerdict v = classify_instability(-1.0, 0.2, 1.2, f5_terms);
    CHECK(v.classification == Classification::det_case_i);
    REQUIRE(v.has_interval);
    CHECK(v.lambda_lo == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(std::isinf(v.lambda_hi));
  }
  SUBCASE("A1 = 0 with A2 < 0 gives the affine case ii") {
    const StabilityVerdict v = classify_instability(0.0, -0.5, 1.2, f5_terms);
    CHECK(v.classification == Classification::det_case_ii);
    REQUIRE(v.has_interval);
    CHECK(v.lambda_lo == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(std::isinf(v.lambda_hi));
    CHECK((v.regimes & REGIME_S3) != 0);
  }
  SUBCASE("upward parabola with positive A2 stays stable") {
    const StabilityVerdict v = classify_instability(0.0025, 0.3, 1.2, f5_terms);
    CHECK(v.classification == Classification::stable);
    CHECK(!v.has_interval);
  }
  SUBCASE("trace condition decided from the affine slope") {
    TwowayTerms terms{-2.2, 0.05, 0.05, 0.2, 0.0};  // feed exceeds d_S + d_R
    const StabilityVerdict v = classify_instability(0.0025, 0.3, 1.2, terms);
    CHECK(v.classification == Classification::trace_unstable);
    CHECK(!v.has_interval);
  }
  SUBCASE("kinetic instability short-circuits") {
    const StabilityVerdict v = classify_instability(1.0, 1.0, -0.5, f5_terms);
    CHECK(!v.kinetically_stable);
    CHECK(v.classification == Classification::kinetically_unstable);
  }

  SUBCASE("classification is a partition over random inputs") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
      const double A1 = u(rng), A2 = u(rng);
      const double detJ = 0.1 + std::abs(u(rng));
      TwowayTerms terms{-(0.1 + std::abs(u(rng))), 0.05 + std::abs(u(rng)),
                        0.05 + std::abs(u(rng)), u(rng), u(rng)};
      const StabilityVerdict v = classify_instability(A1, A2, detJ, terms);
      CHECK(v.kinetically_stable);
      CHECK(v.classification != Classification::kinetically_unstable);
      CHECK(v.has_interval ==
            (v.classification == Classification::det_case_i ||
             v.classification == Classification::det_case_ii ||
             v.classification == Classification::det_case_iii));
      if (v.has_interval) {
        CHECK(v.lambda_lo > 0.0);
        // Interval midpoints really produce a negative determinant.
        const double mid = std::isinf(v.lambda_hi) ? v.lambda_lo * 2.0 + 1.0
                                                   : 0.5 * (v.lambda_lo + v.lambda_hi);
        CHECK((A1 * mid + A2) * mid + detJ < 1e-9);
      }
    }
  }
}

TEST_CASE("twoway verdict pipeline on the banded-coupling instance") {
  ModelParams p = reference_kinetics();
  p.d_S = 0.05;
  p.d_R = 0.05;
  const StabilityVerdict v = twoway_verdict(p, band_coupling());
  CHECK(v.classification == Classification::det_case_iii);
  CHECK(v.A1 == doctest::Approx(0.0025).epsilon(1e-13));
  CHECK(v.A2 == doctest::Approx(-1.09).epsilon(1e-13));
  CHECK(v.detJ == doctest::Approx(1.2).epsilon(1e-13));

  // Unstable lattice modes on [0, pi]: cosine indices 2..20.
  const auto modes = enumerate_modes({1, kPi, 0.0}, 25);
  const Equilibrium eq = coexistence_equilibrium(p);
  const Jacobian2 J = reduced_jacobian(eq.S_star, eq.R_star, p);
  const auto table = mode_growth_table(J, p.d_S, p.d_R, mobility_correction(band_coupling(), eq),
                                       modes);
  std::vector<int> unstable;
  for (const ModeGrowth& m : table) {
    if (m.unstable) unstable.push_back(m.indices[0]);
  }
  REQUIRE(unstable.size() == 19);
  CHECK(unstable.front() == 2);
  CHECK(unstable.back() == 20);

  // Frozen dispersion eigenvalues behind the simulation cross-check.
  const Mat2 A4 = twoway_mode_matrix(J, 0.05, 0.05, mobility_correction(band_coupling(), eq), 4.0);
  CHECK(spectral_abscissa(A4) == doctest::Approx(0.89317121994613088).epsilon(1e-12));
  const Mat2 A121 = twoway_mode_matrix(J, 0.05, 0.05, mobility_correction(band_coupling(), eq), 121.0);
  CHECK(spectral_abscissa(A121) == doctest::Approx(4.9003111993010371).epsilon(1e-12));
  int argmax_m = 0;
  double best = -1e300;
  for (const ModeGrowth& m : table) {
    if (m.rank >= 2 && m.mu_plus > best) {
      best = m.mu_plus;
      argmax_m = m.indices[0];
    }
  }
  CHECK(argmax_m == 11);
}

TEST_CASE("one-way mode spectrum is block triangular") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};

  SUBCASE("worked spectrum at lambda = 4") {
    SignalCoupling c;
    c.rho = 0.5;
    c.Qprime_cstar = -0.5;
    c.d_c = 1.0;
    const OnewaySpectrum sp = oneway_mode_spectrum(J, 1.0, 1.0, c, eq, 4.0);
    CHECK(sp.spectrum[0].real() == doctest::Approx(-5.2).epsilon(1e-12));
    CHECK(sp.spectrum[1].real() == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(sp.spectrum[2].real() == doctest::Approx(-4.5).epsilon(1e-12));
    for (const Complex& z : sp.spectrum) CHECK(std::abs(z.imag()) <= 1e-12);
  }
  SUBCASE("lambda = 0 reduces to kinetics plus the damping scalar") {
    SignalCoupling c;
    c.Qprime_cstar = -0.7;
    const OnewaySpectrum sp = oneway_mode_spectrum(J, 1.0, 1.0, c, eq, 0.0);
    CHECK(sp.scalar_eig == doctest::Approx(-0.7).epsilon(1e-14));
    CHECK(sp.block_spectrum[0].real() == doctest::Approx(-1.2).epsilon(1e-10));
    CHECK(sp.block_spectrum[1].real() == doctest::Approx(-1.0).epsilon(1e-10));
  }
  SUBCASE("random damped configurations stay stable with exact block union") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const ModelParams p = random_kinetics(rng);
      const Equilibrium req = coexistence_equilibrium(p);
      const Jacobian2 rj = reduced_jacobian(req.S_star, req.R_star, p);
      SignalCoupling c;
      c.chi_S = 2.0 * u(rng);
      c.chi_R = 2.0 * u(rng);
      c.d_c = std::exp(std::log(0.1) + u(rng) * std::log(100.0));
      c.Qprime_cstar = -(0.05 + 2.0 * u(rng));
      const double d_s = std::exp(std::log(1e-3) + u(rng) * std::log(1e4));
      const double d_r = std::exp(std::log(1e-3) + u(rng) * std::log(1e4));
      const double lambda = std::exp(std::log(1e-4) + u(rng) * std::log(1e8));
      const OnewaySpectrum sp = oneway_mode_spectrum(rj, d_s, d_r, c, req, lambda);
      CHECK(sp.union_mismatch <= 1e-10 * (1.0 + sp.matrix.frobenius()));
      for (const Complex& z : sp.spectrum) CHECK(z.real() < 0.0);
    }
  }
  SUBCASE("rejects undamped signals") {
    SignalCoupling c;
    c.Qprime_cstar = 0.1;
    CHECK_THROWS_AS(oneway_mode_spectrum(J, 1.0, 1.0, c, eq, 1.0), std::domain_error);
  }
}

namespace {

// Worked three-field instance: chi_S S* = 1, chi_R R* = 3, h* = (1, 0.5),
// q = -0.5, d_c = 1, d_S = d_R = 1 on the reference Jacobian.
SignalCoupling worked_full_coupling() {
  SignalCoupling c;
  c.chi_S = 0.25;  // times S* = 4 gives 1
  c.chi_R = 0.5;   // times R* = 6 gives 3
  c.h_S_star = 1.0;
  c.h_R_star = 0.5;
  c.q = -0.5;
  c.d_c = 1.0;
  return c;
}

}  // namespace

TEST_CASE("full two-way 3x3 mode matrix") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};
  const SignalCoupling c = worked_full_coupling();

  SUBCASE("worked fill-in at lambda = 4") {
    const Mat3 M = full_twoway_mode_matrix(J, 1.0, 1.0, c, eq, 4.0);
    CHECK(M(0, 0) == doctest::Approx(-5.2).epsilon(1e-14));
    CHECK(M(0, 1) == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(M(0, 2) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(M(1, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(M(1, 1) == doctest::Approx(-5.0).epsilon(1e-14));
    CHECK(M(1, 2) == doctest::Approx(12.0).epsilon(1e-14));
    CHECK(M(2, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(M(2, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(M(2, 2) == doctest::Approx(-4.5).epsilon(1e-14));
  }
  SUBCASE("lambda = 0 removes the coupling column") {
    const Mat3 M = full_twoway_mode_matrix(J, 1.0, 1.0, c, eq, 0.0);
    CHECK(M(0, 2) == 0.0);
    CHECK(M(1, 2) == 0.0);
  }
  SUBCASE("no chemotaxis and no feedback decouples the spectrum") {
    SignalCoupling c0;
    c0.q = -0.5;
    const Mat3 M = full_twoway_mode_matrix(J, 1.0, 1.0, c0, eq, 2.0);
    const auto ev = eigenvalues(M);
    const auto block = eigenvalues(Mat2{M(0, 0), M(0, 1), M(1, 0), M(1, 1)});
    bool found_scalar = false;
    for (const Complex& z : ev) {
      if (std::abs(z - Complex(M(2, 2), 0.0)) <= 1e-10) found_scalar = true;
    }
    CHECK(found_scalar);
    (void)block;
  }
  SUBCASE("requires q < 0") {
    SignalCoupling bad = c;
    bad.q = 0.1;
    CHECK_THROWS_AS(full_twoway_mode_matrix(J, 1.0, 1.0, bad, eq, 1.0), std::domain_error);
  }
}

TEST_CASE("Schur factorization identity") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};
  const SignalCoupling c = worked_full_coupling();
  const Mat3 M = full_twoway_mode_matrix(J, 1.0, 1.0, c, eq, 4.0);

  SUBCASE("worked instance: det(I - M) = 145.8 via cofactor oracle") {
    // Independent 3x3 cofactor expansion of det(mu I - M) at mu = 1.
    const double mu = 1.0;
    const double a11 = mu - M(0, 0), a12 = -M(0, 1), a13 = -M(0, 2);
    const double a21 = -M(1, 0), a22 = mu - M(1, 1), a23 = -M(1, 2);
    const double a31 = -M(2, 0), a32 = -M(2, 1), a33 = mu - M(2, 2);
    const double oracle = a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
                          a13 * (a21 * a32 - a22 * a31);
    CHECK(oracle == doctest::Approx(145.8).epsilon(1e-14));

    const SchurCheck chk = schur_factorization_residual(M, 4.0, Complex(1.0, 0.0));
    CHECK(chk.det3.real() == doctest::Approx(145.8).epsilon(1e-12));
    CHECK(std::abs(chk.det3.imag()) <= 1e-12);
    CHECK(chk.factored.real() == doctest::Approx(145.8).epsilon(1e-12));
    CHECK(chk.residual <= 1e-9);
    // Factored pieces: (mu - pole) = 5.5 and det(mu I - A_eff) = 26.509...
    CHECK(chk.factored.real() / 5.5 == doctest::Approx(26.509090909090909).epsilon(1e-12));
  }
  SUBCASE("residual vanishes on the |mu| = 10 circle") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    for (int i = 0; i < 20; ++i) {
      const double a = u(rng);
      const Complex mu(10.0 * std::cos(a), 10.0 * std::sin(a));
      const SchurCheck chk = schur_factorization_residual(M, 4.0, mu);
      CHECK(chk.residual <= 1e-10 * chk.scale);
    }
  }
  SUBCASE("no coupling gives an exactly factored determinant") {
    SignalCoupling c0;
    c0.q = -0.5;
    const Mat3 M0 = full_twoway_mode_matrix(J, 1.0, 1.0, c0, eq, 4.0);
    const SchurCheck chk = schur_factorization_residual(M0, 4.0, Complex(2.0, 3.0));
    CHECK(chk.residual <= 1e-12 * chk.scale);
  }
  SUBCASE("pole is rejected") {
    CHECK_THROWS_AS(schur_factorization_residual(M, 4.0, Complex(M(2, 2), 0.0)),
                    std::domain_error);
  }
}

TEST_CASE("quasi-steady closure") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};
  const SignalCoupling c = worked_full_coupling();

  SUBCASE("closure gradients g* = -h*/q") {
    const QssClosure qss = qss_closure(J, 1.0, 1.0, c, eq, 4.0);
    CHECK(qss.g_S == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(qss.g_R == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("lambda = 0 reduces to the Jacobian") {
    const QssClosure qss = qss_closure(J, 1.0, 1.0, c, eq, 0.0);
    CHECK(qss.A_qss.a11 == doctest::Approx(J.a).epsilon(1e-14));
    CHECK(qss.A_qss.a12 == doctest::Approx(J.b).epsilon(1e-14));
    CHECK(qss.A_qss.a21 == doctest::Approx(J.c).epsilon(1e-14));
    CHECK(qss.A_qss.a22 == doctest::Approx(J.d).epsilon(1e-14));
  }
  SUBCASE("worked rank-one arithmetic at lambda = 4") {
    const QssClosure qss = qss_closure(J, 1.0, 1.0, c, eq, 4.0);
    CHECK(qss.A_qss.a11 == doctest::Approx(-4.3111111111111111).epsilon(1e-10));
    CHECK(qss.A_qss.a12 == doctest::Approx(0.24444444444444444).epsilon(1e-10));
    CHECK(qss.A_qss.a21 == doctest::Approx(2.6666666666666667).epsilon(1e-10));
    CHECK(qss.A_qss.a22 == doctest::Approx(-3.6666666666666667).epsilon(1e-10));
  }
  SUBCASE("rejects q >= 0") {
    SignalCoupling bad = c;
    bad.q = 0.0;
    CHECK_THROWS_AS(qss_closure(J, 1.0, 1.0, bad, eq, 1.0), std::domain_error);
  }
}

TEST_CASE("fast-relaxation spectrum convergence") {
  const Jacobian2 J = f5_jacobian();
  const Equilibrium eq{4.0, 6.0, 0.0, false};
  const SignalCoupling c = worked_full_coupling();
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};

  SUBCASE("gap decreases with fitted order about one") {
    const EpsConvergence conv = eps_spectrum_convergence(J, 1.0, 1.0, c, eq, 4.0, eps);
    REQUIRE(conv.rows.size() == 4);
    CHECK(conv.pairing_ok);
    for (size_t i = 0; i + 1 < conv.rows.size(); ++i) {
      CHECK(conv.rows[i + 1].gap < conv.rows[i].gap);
    }
    REQUIRE(conv.order_defined);
    CHECK(conv.fitted_order >= 0.9);
    CHECK(conv.fitted_order <= 1.3);
  }
  SUBCASE("fast eigenvalue matches the dominant balance at small eps") {
    const EpsConvergence conv = eps_spectrum_convergence(J, 1.0, 1.0, c, eq, 4.0, eps);
    const double expected = (c.q - c.d_c * 4.0) / eps.back();
    CHECK(std::abs(conv.rows.back().fast_eig - expected) <= 0.01 * std::abs(expected));
  }
  SUBCASE("no coupling gives zero gap") {
    SignalCoupling c0;
    c0.q = -0.5;
    const EpsConvergence conv = eps_spectrum_convergence(J, 1.0, 1.0, c0, eq, 4.0, eps);
    for (const EpsRow& r : conv.rows) CHECK(r.gap <= 1e-11);
  }
  SUBCASE("rejects non-decreasing eps lists") {
    CHECK_THROWS_AS(eps_spectrum_convergence(J, 1.0, 1.0, c, eq, 4.0, {1e-2, 1e-1}),
                    std::domain_error);
  }
}
