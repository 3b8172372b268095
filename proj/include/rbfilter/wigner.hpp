#pragma once

namespace rbf {

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).
///
/// Arguments are integers or half-integers. The Racah sum is evaluated in
/// exact rational arithmetic and only the final square root is taken in
/// floating point. Symbols violating a selection rule (triangle condition,
/// m1 + m2 + m3 = 0, |m| <= j, j + m integral) are 0. Throws DomainError if
/// any argument is not a multiple of 1/2 or a j is negative.
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; same conventions as wigner3j.
double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6);

}  // namespace rbf
