#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
//
// Upper half-plane evaluation uses J. A. C. Weideman's rational expansion
// (SIAM J. Numer. Anal. 31, 1497 (1994)) with N = 40 terms inside |z| < 15
// and the Laplace continued fraction outside. The lower half-plane follows
// from w(z) = 2 exp(-z^2) - w(-z).

#include <array>
#include <cmath>
#include <complex>

#include "rbfilter/error.hpp"

namespace rbf {

namespace detail {

inline constexpr int weideman_terms = 40;

// Polynomial coefficients a_1..a_N of Weideman's expansion, highest power
// first, computed once by a direct discrete Fourier transform.
inline const std::array<long double, weideman_terms>& weideman_coefficients() {
  static const auto coeffs = [] {
    constexpr int n = weideman_terms;
    constexpr int m = 2 * n;
    const long double pi = 3.141592653589793238462643383279502884L;
    const long double l = std::sqrt(n / std::sqrt(2.0L));
    // f_k for k = -m+1 .. m-1, with f at k = -m set to zero.
    std::array<long double, 2 * m> f{};
    for (int k = -m + 1; k <= m - 1; ++k) {
      const long double t = l * std::tan(k * pi / (2.0L * m));
      f[static_cast<std::size_t>(k + m)] = std::exp(-t * t) * (l * l + t * t);
    }
    // fftshift then real part of the DFT, divided by 2m.
    std::array<long double, weideman_terms> out{};
    for (int j = 1; j <= n; ++j) {
      long double acc = 0.0L;
      for (int s = 0; s < 2 * m; ++s) {
        const long double fs = f[static_cast<std::size_t>((s + m) % (2 * m))];
        acc += fs * std::cos(2.0L * pi * j * s / (2.0L * m));
      }
      out[static_cast<std::size_t>(n - j)] = acc / (2.0L * m);
    }
    return out;
  }();
  return coeffs;
}

template <class T>
std::complex<T> faddeeva_weideman(std::complex<T> z) {
  const auto& a = weideman_coefficients();
  const T l = static_cast<T>(std::sqrt(weideman_terms / std::sqrt(2.0L)));
  const std::complex<T> i(0, 1);
  const std::complex<T> denom = l - i * z;
  const std::complex<T> zz = (l + i * z) / denom;
  std::complex<T> p(0);
  for (const long double c : a) p = p * zz + static_cast<T>(c);
  const T inv_sqrt_pi = static_cast<T>(0.564189583547756286948079451560772586L);
  return T(2) * p / (denom * denom) + inv_sqrt_pi / denom;
}

template <class T>
std::complex<T> faddeeva_continued_fraction(std::complex<T> z) {
  const T inv_sqrt_pi = static_cast<T>(0.564189583547756286948079451560772586L);
  std::complex<T> r(0);
  for (int k = 60; k >= 1; --k) r = (T(k) / T(2)) / (z - r);
  return std::complex<T>(0, inv_sqrt_pi) / (z - r);
}

}  // namespace detail

template <class T>
std::complex<T> faddeeva(std::complex<T> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("faddeeva: argument must be finite");
  if (z.imag() < T(0)) return T(2) * std::exp(-z * z) - faddeeva(-z);
  if (std::abs(z) >= T(15)) return detail::faddeeva_continued_fraction(z);
  return detail::faddeeva_weideman(z);
}

}  // namespace rbf
