#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tme {

namespace {

using LComplex = std::complex<long double>;

// Horner evaluation of x^3 + c2 x^2 + c1 x + c0 and its derivative.
LComplex cubic_eval(long double c2, long double c1, long double c0, LComplex x) {
  return ((x + c2) * x + c1) * x + c0;
}

LComplex cubic_deriv(long double c2, long double c1, LComplex x) {
  return (3.0L * x + 2.0L * c2) * x + c1;
}

LComplex polish_root(long double c2, long double c1, long double c0, LComplex x) {
  for (int it = 0; it < 4; ++it) {
    const LComplex f = cubic_eval(c2, c1, c0, x);
    const LComplex df = cubic_deriv(c2, c1, x);
    if (std::abs(df) == 0.0L) break;
    const LComplex step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-30L * (1.0L + std::abs(x))) break;
  }
  return x;
}

}  // namespace

double Mat2::frobenius() const {
  return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
}

Mat2 operator+(const Mat2& x, const Mat2& y) {
  return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
}

Mat2 operator-(const Mat2& x, const Mat2& y) {
  return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
}

Mat2 operator*(double s, const Mat2& x) {
  return {s * x.a11, s * x.a12, s * x.a21, s * x.a22};
}

double Mat3::trace() const { return e[0] + e[4] + e[8]; }

double Mat3::det() const {
  return e[0] * (e[4] * e[8] - e[5] * e[7]) - e[1] * (e[3] * e[8] - e[5] * e[6]) +
         e[2] * (e[3] * e[7] - e[4] * e[6]);
}

double Mat3::frobenius() const {
  double s = 0.0;
  for (double v : e) s += v * v;
  return std::sqrt(s);
}

std::array<Complex, 2> eigenvalues(const Mat2& m) {
  const double tr = m.trace();
  const double dt = m.det();
  const double disc = tr * tr - 4.0 * dt;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    return {Complex((tr - sq) / 2.0, 0.0), Complex((tr + sq) / 2.0, 0.0)};
  }
  const double im = std::sqrt(-disc) / 2.0;
  return {Complex(tr / 2.0, -im), Complex(tr / 2.0, im)};
}

std::array<Complex, 3> eigenvalues(const Mat3& m) {
  // Characteristic polynomial mu^3 + c2 mu^2 + c1 mu + c0, coefficients in
  // extended precision so that Newton polishing is limited by the input data
  // rather than by coefficient roundoff.
  const long double a = m(0, 0), b = m(0, 1), c = m(0, 2);
  const long double d = m(1, 0), e = m(1, 1), f = m(1, 2);
  const long double g = m(2, 0), h = m(2, 1), i = m(2, 2);

  const long double c2 = -(a + e + i);
  const long double c1 = (a * e - b * d) + (a * i - c * g) + (e * i - f * h);
  const long double c0 = -(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g));

  // Depressed form y^3 + p y + q with mu = y - c2/3.
  const long double shift = c2 / 3.0L;
  const long double p = c1 - c2 * c2 / 3.0L;
  const long double q = 2.0L * c2 * c2 * c2 / 27.0L - c2 * c1 / 3.0L + c0;

  std::array<LComplex, 3> roots;
  const long double disc = -4.0L * p * p * p - 27.0L * q * q;
  if (disc >= 0.0L) {
    // Three real roots (trigonometric method); p <= 0 here.
    const long double r = std::sqrt(std::max(0.0L, -p / 3.0L));
    if (r == 0.0L) {
      roots = {LComplex(-shift), LComplex(-shift), LComplex(-shift)};
    } else {
      long double arg = 3.0L * q / (2.0L * p * r);
      arg = std::clamp(arg, -1.0L, 1.0L);
      const long double phi = std::acos(arg);
      for (int k = 0; k < 3; ++k) {
        const long double y =
            2.0L * r * std::cos((phi - 2.0L * 3.14159265358979323846264338327950288L * k) / 3.0L);
        roots[static_cast<size_t>(k)] = LComplex(y - shift);
      }
    }
  } else {
    // One real root (Cardano) plus a complex-conjugate pair.
    const long double half_q = q / 2.0L;
    const long double rad = std::sqrt(half_q * half_q + p * p * p / 27.0L);
    const long double u = std::cbrt(-half_q + rad);
    const long double v = std::cbrt(-half_q - rad);
    const long double y0 = u + v;
    roots[0] = LComplex(y0 - shift);
    const long double re = -y0 / 2.0L - shift;
    const long double im = std::sqrt(3.0L) * (u - v) / 2.0L;
    roots[1] = LComplex(re, im);
    roots[2] = LComplex(re, -im);
  }

  std::array<Complex, 3> out;
  for (int k = 0; k < 3; ++k) {
    const LComplex z = polish_root(c2, c1, c0, roots[static_cast<size_t>(k)]);
    out[static_cast<size_t>(k)] =
        Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  std::sort(out.begin(), out.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

double spectral_abscissa(const Mat2& m) {
  const auto ev = eigenvalues(m);
  return std::max(ev[0].real(), ev[1].real());
}

double spectral_abscissa(const Mat3& m) {
  const auto ev = eigenvalues(m);
  return std::max({ev[0].real(), ev[1].real(), ev[2].real()});
}

Complex char_det(const Mat2& m, Complex mu) {
  return (mu - m.a11) * (mu - m.a22) - m.a12 * m.a21;
}

Complex char_det(const Mat3& m, Complex mu) {
  const Complex a = mu - m(0, 0), b = -m(0, 1), c = -m(0, 2);
  const Complex d = -m(1, 0), e = mu - m(1, 1), f = -m(1, 2);
  const Complex g = -m(2, 0), h = -m(2, 1), i = mu - m(2, 2);
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

double charpoly_residual(const Mat2& m, Complex mu) { return std::abs(char_det(m, mu)); }

double charpoly_residual(const Mat3& m, Complex mu) { return std::abs(char_det(m, mu)); }

namespace {

template <int N, typename Mat>
std::array<double, N> expm_apply_impl(const Mat& m, const std::array<double, N>& v, double t,
                                      const std::array<Complex, N>& eig) {
  auto entry = [&m](int i, int j) -> Complex {
    if constexpr (N == 2) {
      const double e[4] = {m.a11, m.a12, m.a21, m.a22};
      return Complex(e[2 * i + j], 0.0);
    } else {
      return Complex(m(i, j), 0.0);
    }
  };

  // Lagrange form: exp(Mt) = sum_i exp(mu_i t) prod_{j != i} (M - mu_j I)/(mu_i - mu_j).
  // Clustered eigenvalues fall back to exp(mu t)(I + t(M - mu I)) around the
  // cluster mean, which is exact for a single Jordan block of size <= 2.
  const double scale = 1.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) min_gap = std::min(min_gap, std::abs(eig[i] - eig[j]));
  }

  std::array<Complex, N> x{};
  for (int i = 0; i < N; ++i) x[static_cast<size_t>(i)] = Complex(v[static_cast<size_t>(i)], 0.0);
  std::array<Complex, N> acc{};

  if (min_gap > 1e-8 * (scale + std::abs(eig[0]))) {
    for (int i = 0; i < N; ++i) {
      std::array<Complex, N> w = x;
      Complex denom(1.0, 0.0);
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        std::array<Complex, N> next{};
        for (int r = 0; r < N; ++r) {
          Complex s(0.0, 0.0);
          for (int ccol = 0; ccol < N; ++ccol) s += entry(r, ccol) * w[static_cast<size_t>(ccol)];
          next[static_cast<size_t>(r)] = s - eig[static_cast<size_t>(j)] * w[static_cast<size_t>(r)];
        }
        w = next;
        denom *= eig[static_cast<size_t>(i)] - eig[static_cast<size_t>(j)];
      }
      const Complex factor = std::exp(eig[static_cast<size_t>(i)] * t) / denom;
      for (int r = 0; r < N; ++r) acc[static_cast<size_t>(r)] += factor * w[static_cast<size_t>(r)];
    }
  } else {
    Complex mu(0.0, 0.0);
    for (const Complex& e : eig) mu += e;
    mu /= static_cast<double>(N);
    // (I + t (M - mu I)) x, then scaled by exp(mu t).
    for (int r = 0; r < N; ++r) {
      Complex s(0.0, 0.0);
      for (int ccol = 0; ccol < N; ++ccol) s += entry(r, ccol) * x[static_cast<size_t>(ccol)];
      acc[static_cast<size_t>(r)] =
          x[static_cast<size_t>(r)] + t * (s - mu * x[static_cast<size_t>(r)]);
    }
    const Complex factor = std::exp(mu * t);
    for (int r = 0; r < N; ++r) acc[static_cast<size_t>(r)] *= factor;
  }

  std::array<double, N> out{};
  for (int r = 0; r < N; ++r) out[static_cast<size_t>(r)] = acc[static_cast<size_t>(r)].real();
  return out;
}

}  // namespace

std::array<double, 2> expm_apply(const Mat2& m, const std::array<double, 2>& v, double t) {
  return expm_apply_impl<2>(m, v, t, eigenvalues(m));
}

std::array<double, 3> expm_apply(const Mat3& m, const std::array<double, 3>& v, double t) {
  return expm_apply_impl<3>(m, v, t, eigenvalues(m));
}

std::pair<int, std::array<double, 2>> real_quadratic_roots(double a, double b, double c) {
  std::array<double, 2> r{0.0, 0.0};
  if (a == 0.0) {
    if (b == 0.0) return {0, r};
    r[0] = -c / b;
    return {1, r};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {0, r};
  const double sq = std::sqrt(disc);
  // Citardauq form for the small root to avoid cancellation.
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r0 = q / a;
  double r1 = (q != 0.0) ? c / q : -b / a - r0;
  if (r0 > r1) std::swap(r0, r1);
  r = {r0, r1};
  return {2, r};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line: need at least two paired samples");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

}  // namespace tme
