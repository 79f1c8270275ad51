#pragma once

#include <array>
#include <complex>
#include <span>

namespace tme {

using Complex = std::complex<double>;

// Dense 2x2, row-major.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
  double frobenius() const;
};

Mat2 operator+(const Mat2& x, const Mat2& y);
Mat2 operator-(const Mat2& x, const Mat2& y);
Mat2 operator*(double s, const Mat2& x);

// Dense 3x3, row-major.
struct Mat3 {
  std::array<double, 9> e{};

  double& operator()(int i, int j) { return e[static_cast<size_t>(3 * i + j)]; }
  double operator()(int i, int j) const { return e[static_cast<size_t>(3 * i + j)]; }

  double trace() const;
  double det() const;
  double frobenius() const;
};

// Closed-form spectra. eigenvalues() of a Mat3 solves the characteristic
// cubic (Cardano / trigonometric branch) and Newton-polishes every root in
// extended precision before returning.
std::array<Complex, 2> eigenvalues(const Mat2& m);
std::array<Complex, 3> eigenvalues(const Mat3& m);

double spectral_abscissa(const Mat2& m);
double spectral_abscissa(const Mat3& m);

// |det(mu I - M)| for a claimed eigenvalue mu.
double charpoly_residual(const Mat2& m, Complex mu);
double charpoly_residual(const Mat3& m, Complex mu);

// det(mu I - M) over the complex numbers (cofactor expansion).
Complex char_det(const Mat2& m, Complex mu);
Complex char_det(const Mat3& m, Complex mu);

// exp(M t) v through the Lagrange spectral formula on the closed-form
// eigenvalues, with a first-order Jordan fallback near defective spectra.
std::array<double, 2> expm_apply(const Mat2& m, const std::array<double, 2>& v, double t);
std::array<double, 3> expm_apply(const Mat3& m, const std::array<double, 3>& v, double t);

// Real roots of a1*x^2 + a2*x + a3 = 0, ascending; count in .first.
std::pair<int, std::array<double, 2>> real_quadratic_roots(double a, double b, double c);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y ~ slope*x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace tme
