#include "rbfilter/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "rbfilter/error.hpp"

namespace rbf {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// Angular momenta are carried as twice their value.
int twice(double x) {
  const double t = 2.0 * x;
  const double r = std::round(t);
  if (!std::isfinite(x) || std::abs(t - r) > 1e-9)
    throw DomainError("angular momentum " + std::to_string(x) + " is not a multiple of 1/2");
  return static_cast<int>(r);
}

cpp_int factorial(int n) {
  cpp_int f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Factorial of a twice-valued argument that is known to be an even number >= 0.
cpp_int fact2(int twice_n) { return factorial(twice_n / 2); }

bool triangle(int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0;
}

// Triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!.
cpp_rational delta(int a, int b, int c) {
  return cpp_rational(fact2(a + b - c) * fact2(a - b + c) * fact2(-a + b + c),
                      fact2(a + b + c + 2));
}

double signed_sqrt(const cpp_rational& radicand, const cpp_rational& sum) {
  if (sum == 0) return 0.0;
  const double mag = std::sqrt(static_cast<double>(cpp_rational(radicand * sum * sum)));
  return sum < 0 ? -mag : mag;
}

}  // namespace

double wigner3j(double j1d, double j2d, double j3d, double m1d, double m2d, double m3d) {
  const int j1 = twice(j1d), j2 = twice(j2d), j3 = twice(j3d);
  const int m1 = twice(m1d), m2 = twice(m2d), m3 = twice(m3d);
  if (j1 < 0 || j2 < 0 || j3 < 0) throw DomainError("wigner3j: negative angular momentum");

  if (m1 + m2 + m3 != 0) return 0.0;
  if (!triangle(j1, j2, j3)) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if ((j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (j3 + m3) % 2 != 0) return 0.0;

  // Summation bounds (twice-valued) for the Racah formula.
  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  cpp_rational sum = 0;
  for (int k = kmin; k <= kmax; k += 2) {
    const cpp_int den = fact2(k) * fact2(j3 - j2 + k + m1) * fact2(j3 - j1 + k - m2) *
                        fact2(j1 + j2 - j3 - k) * fact2(j1 - k - m1) * fact2(j2 - k + m2);
    const cpp_rational term(cpp_int(1), den);
    if ((k / 2) % 2 == 0) sum += term;
    else sum -= term;
  }
  const cpp_rational radicand =
      delta(j1, j2, j3) * cpp_rational(fact2(j1 + m1) * fact2(j1 - m1) * fact2(j2 + m2) *
                                       fact2(j2 - m2) * fact2(j3 + m3) * fact2(j3 - m3));
  const int phase = (j1 - j2 - m3) / 2;
  const double value = signed_sqrt(radicand, sum);
  return (phase % 2 == 0) ? value : -value;
}

double wigner6j(double j1d, double j2d, double j3d, double j4d, double j5d, double j6d) {
  const int j1 = twice(j1d), j2 = twice(j2d), j3 = twice(j3d);
  const int j4 = twice(j4d), j5 = twice(j5d), j6 = twice(j6d);
  if (std::min({j1, j2, j3, j4, j5, j6}) < 0)
    throw DomainError("wigner6j: negative angular momentum");
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) ||
      !triangle(j4, j5, j3))
    return 0.0;

  const int a1 = j1 + j2 + j3, a2 = j1 + j5 + j6, a3 = j4 + j2 + j6, a4 = j4 + j5 + j3;
  const int b1 = j1 + j2 + j4 + j5, b2 = j2 + j3 + j5 + j6, b3 = j3 + j1 + j6 + j4;
  const int tmin = std::max({a1, a2, a3, a4});
  const int tmax = std::min({b1, b2, b3});
  cpp_rational sum = 0;
  for (int t = tmin; t <= tmax; t += 2) {
    const cpp_int den = fact2(t - a1) * fact2(t - a2) * fact2(t - a3) * fact2(t - a4) *
                        fact2(b1 - t) * fact2(b2 - t) * fact2(b3 - t);
    const cpp_rational term(fact2(t + 2), den);
    if ((t / 2) % 2 == 0) sum += term;
    else sum -= term;
  }
  const cpp_rational radicand =
      delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3);
  return signed_sqrt(radicand, sum);
}

}  // namespace rbf
