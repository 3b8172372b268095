#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/Dense>

#include "rbfilter/atomic_data.hpp"
#include "rbfilter/photon_stats.hpp"

namespace oracle {

// Breit-Rabi energies (Hz) of a J = 1/2 manifold, sorted ascending.
inline std::vector<double> breit_rabi_levels(double a_hz, double nuclear_spin, double g_j,
                                             double g_i, double b_tesla) {
  const long double mu = rbf::constants::bohr_magneton_hz;
  const long double i = nuclear_spin;
  const long double de = a_hz * (i + 0.5L);
  const long double x = (g_j - g_i) * mu * b_tesla / de;
  std::vector<double> e;
  const long double mmax = i + 0.5L;
  for (long double m = -mmax; m <= mmax + 0.1L; m += 1.0L) {
    const long double base = -de / (2 * (2 * i + 1)) + g_i * mu * m * b_tesla;
    if (std::abs(std::abs(m) - mmax) < 1e-9L) {
      // Stretched states: the square root is 1 + x sign(m) without modulus.
      e.push_back(static_cast<double>(base + de / 2 * (1 + (m > 0 ? x : -x))));
    } else {
      const long double root = std::sqrt(1 + 4 * m * x / (2 * i + 1) + x * x);
      e.push_back(static_cast<double>(base + de / 2 * root));
      e.push_back(static_cast<double>(base - de / 2 * root));
    }
  }
  std::sort(e.begin(), e.end());
  return e;
}

inline long double factorial(int n) {
  long double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Racah's closed sums on doubled arguments.
inline long double racah_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0;
  if ((j1 + m1) % 2 || (j2 + m2) % 2 || (j3 + m3) % 2 || (j1 + j2 + j3) % 2) return 0;
  const auto f = [](int twice) { return factorial(twice / 2); };
  const long double tri = f(j1 + j2 - j3) * f(j1 - j2 + j3) * f(-j1 + j2 + j3) / f(j1 + j2 + j3 + 2);
  const long double pre = std::sqrt(tri * f(j1 + m1) * f(j1 - m1) * f(j2 + m2) * f(j2 - m2) *
                                    f(j3 + m3) * f(j3 - m3));
  long double sum = 0;
  for (int k = 0; k <= 200; k += 2) {
    const int a = j3 - j2 + k + m1, b = j3 - j1 + k - m2, c = j1 + j2 - j3 - k, d = j1 - k - m1,
              e = j2 - k + m2;
    if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0) continue;
    const long double term = 1.0L / (f(k) * f(a) * f(b) * f(c) * f(d) * f(e));
    sum += (k / 2) % 2 ? -term : term;
  }
  const int phase = (j1 - j2 - m3) / 2;
  return (phase % 2 ? -1.0L : 1.0L) * pre * sum;
}

inline long double triangle(int a, int b, int c) {
  const auto f = [](int twice) { return factorial(twice / 2); };
  return std::sqrt(f(a + b - c) * f(a - b + c) * f(-a + b + c) / f(a + b + c + 2));
}

inline bool triad(int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0;
}

inline long double racah_6j(int a, int b, int c, int d, int e, int f6) {
  if (!triad(a, b, c) || !triad(a, e, f6) || !triad(d, b, f6) || !triad(d, e, c)) return 0;
  const auto f = [](int twice) { return factorial(twice / 2); };
  const long double pre = triangle(a, b, c) * triangle(a, e, f6) * triangle(d, b, f6) * triangle(d, e, c);
  long double sum = 0;
  for (int t = 0; t <= 400; t += 2) {
    const int x1 = t - a - b - c, x2 = t - a - e - f6, x3 = t - d - b - f6, x4 = t - d - e - c;
    const int y1 = a + b + d + e - t, y2 = a + c + d + f6 - t, y3 = b + c + e + f6 - t;
    if (x1 < 0 || x2 < 0 || x3 < 0 || x4 < 0 || y1 < 0 || y2 < 0 || y3 < 0) continue;
    const long double term =
        f(t + 2) / (f(x1) * f(x2) * f(x3) * f(x4) * f(y1) * f(y2) * f(y3));
    sum += (t / 2) % 2 ? -term : term;
  }
  return pre * sum;
}

// w(z) for Im z >= 0 by adaptive Gauss-Kronrod quadrature.
// Small |z|: w(z) = pi^{-1/2} int_0^inf exp(-t^2/4 + i z t) dt.
// Large |z|: w(z) = (i/pi) int exp(-t^2) / (z - t) dt.
inline std::complex<long double> faddeeva_quadrature(std::complex<double> zd) {
  using boost::math::quadrature::gauss_kronrod;
  using ld = long double;
  const std::complex<ld> z(zd.real(), zd.imag());
  const ld pi = 3.141592653589793238462643383279502884L;
  const ld tol = 1e-14L;
  if (std::abs(z) < 8) {
    const ld x = z.real(), y = z.imag();
    const auto re = [&](ld t) { return std::exp(-t * t / 4 - y * t) * std::cos(x * t); };
    const auto im = [&](ld t) { return std::exp(-t * t / 4 - y * t) * std::sin(x * t); };
    ld r = 0, i = 0;
    for (int k = 0; k < 14; ++k) {
      r += gauss_kronrod<ld, 31>::integrate(re, k, k + 1, 12, tol);
      i += gauss_kronrod<ld, 31>::integrate(im, k, k + 1, 12, tol);
    }
    return std::complex<ld>(r, i) / std::sqrt(pi);
  }
  const auto g = [&](ld t) { return std::exp(-t * t) / (z - t); };
  const auto re = [&](ld t) { return g(t).real(); };
  const auto im = [&](ld t) { return g(t).imag(); };
  std::vector<ld> cuts{-9};
  if (std::abs(z.real()) < 9) cuts.push_back(z.real());
  cuts.push_back(9);
  ld r = 0, i = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    r += gauss_kronrod<ld, 31>::integrate(re, cuts[k], cuts[k + 1], 15, tol);
    i += gauss_kronrod<ld, 31>::integrate(im, cuts[k], cuts[k + 1], 15, tol);
  }
  return std::complex<ld>(0, 1) * std::complex<ld>(r, i) / pi;
}

// erf(x) from its Maclaurin series.
inline long double erf_series(long double x) {
  const long double pi = 3.141592653589793238462643383279502884L;
  long double sum = 0, term = x;
  for (int n = 0; n < 80; ++n) {
    sum += term / (2 * n + 1);
    term *= -x * x / (n + 1);
  }
  return 2 / std::sqrt(pi) * sum;
}

// Principal-value Hilbert transform (1/pi) P int f(t)/(t - x) dt on a uniform
// grid by the odd-point Maclaurin rule, evaluated at the indices given.
inline Eigen::VectorXd hilbert(const Eigen::VectorXd& f, const std::vector<Eigen::Index>& at) {
  const double pi = 3.141592653589793238462643383279502884;
  Eigen::VectorXd out(static_cast<Eigen::Index>(at.size()));
  for (std::size_t k = 0; k < at.size(); ++k) {
    const Eigen::Index i = at[k];
    double s = 0;
    for (Eigen::Index j = (i % 2 == 0) ? 1 : 0; j < f.size(); j += 2) s += f(j) / static_cast<double>(j - i);
    out(static_cast<Eigen::Index>(k)) = 2.0 / pi * s;
  }
  return out;
}

// Moments of a binomially thinned common geometric source plus Poisson noise.
inline double analytic_correlation(const rbf::NoiseModel& m) {
  const double n = m.mean_signal, b = m.background();
  const double es = m.eta_stokes, ea = m.eta_anti_stokes;
  return es * ea * n * (1 + n) / std::sqrt((es * n * (1 + es * n) + b) * (ea * n * (1 + ea * n) + b));
}

inline double analytic_mean(const rbf::NoiseModel& m, double eta) {
  return eta * m.mean_signal + m.background();
}

// pmf of Geometric(mean eta n) convolved with Poisson(b), for k < kmax.
inline std::vector<double> thinned_marginal(const rbf::NoiseModel& m, double eta, int kmax) {
  const double g = eta * m.mean_signal, b = m.background();
  std::vector<double> geo(static_cast<std::size_t>(kmax)), poi(static_cast<std::size_t>(kmax)), out(static_cast<std::size_t>(kmax));
  for (int k = 0; k < kmax; ++k) {
    geo[static_cast<std::size_t>(k)] = std::pow(g / (1 + g), k) / (1 + g);
    poi[static_cast<std::size_t>(k)] = b > 0 ? std::exp(k * std::log(b) - b - std::lgamma(k + 1.0)) : (k == 0 ? 1.0 : 0.0);
  }
  for (int k = 0; k < kmax; ++k)
    for (int j = 0; j <= k; ++j)
      out[static_cast<std::size_t>(k)] += geo[static_cast<std::size_t>(j)] * poi[static_cast<std::size_t>(k - j)];
  return out;
}

inline double chi_square_p_value(double chi2, int dof) {
  return boost::math::gamma_q(dof / 2.0, chi2 / 2.0);
}

}  // namespace oracle
