#pragma once

// Carlson symmetric integrals and complete Legendre integrals for complex
// arguments. Parameter convention: m = k^2.

#include <complex>

namespace dimers {

using Complex = std::complex<double>;
using ComplexL = std::complex<long double>;

Complex carlson_rf(Complex x, Complex y, Complex z);
Complex carlson_rc(Complex x, Complex y);
Complex carlson_rd(Complex x, Complex y, Complex z);
Complex carlson_rj(Complex x, Complex y, Complex z, Complex p);

/// K(m); m = 1 is a pole and throws std::domain_error.
Complex ellint_k(Complex m);
/// E(m); E(1) = 1.
Complex ellint_e(Complex m);
/// Pi(n|m) = int_0^{pi/2} dt / ((1 - n sin^2 t) sqrt(1 - m sin^2 t)).
Complex ellint_pi(Complex n, Complex m);

/// Extended-precision variants, for expressions with heavy cancellation.
ComplexL ellint_k(ComplexL m);
ComplexL ellint_e(ComplexL m);
ComplexL ellint_pi(ComplexL n, ComplexL m);

// Real arguments select the double-precision overloads.
inline Complex ellint_k(double m) { return ellint_k(Complex(m)); }
inline Complex ellint_e(double m) { return ellint_e(Complex(m)); }
inline Complex ellint_pi(double n, double m) { return ellint_pi(Complex(n), Complex(m)); }

}  // namespace dimers
