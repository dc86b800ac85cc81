#include "dimers/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dimers/errors.hpp"

namespace dimers {

namespace {

constexpr int kMaxIterations = 200;

template <class T>
T max_abs(std::complex<T> a, std::complex<T> b, std::complex<T> c) {
  return std::max({std::abs(a), std::abs(b), std::abs(c)});
}

[[noreturn]] void no_convergence(const char* name) {
  throw NumericError(std::string(name) + ": duplication did not converge");
}

template <class T>
std::complex<T> rf(std::complex<T> x, std::complex<T> y, std::complex<T> z) {
  using Complex = std::complex<T>;
  const T kEps = std::numeric_limits<T>::epsilon();
  const int zeros = (x == T(0)) + (y == T(0)) + (z == T(0));
  if (zeros > 1) throw std::domain_error("carlson_rf: at most one argument may vanish");
  const Complex A0 = (x + y + z) / T(3);
  const T Q = std::pow(3 * kEps, T(-1) / 6) * max_abs(A0 - x, A0 - y, A0 - z);
  Complex A = A0;
  const Complex x0 = x, y0 = y;
  T f = 1;
  int it = 0;
  while (f * Q >= std::abs(A)) {
    if (++it > kMaxIterations) no_convergence("carlson_rf");
    const Complex sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
    const Complex l = sx * sy + sx * sz + sy * sz;
    x = (x + l) / T(4);
    y = (y + l) / T(4);
    z = (z + l) / T(4);
    A = (A + l) / T(4);
    f /= 4;
  }
  const Complex X = (A0 - x0) * f / A;
  const Complex Y = (A0 - y0) * f / A;
  const Complex Z = -X - Y;
  const Complex E2 = X * Y - Z * Z;
  const Complex E3 = X * Y * Z;
  return (T(1) - E2 / T(10) + E3 / T(14) + E2 * E2 / T(24) - T(3) * E2 * E3 / T(44)) / std::sqrt(A);
}

template <class T>
std::complex<T> rj(std::complex<T> x, std::complex<T> y, std::complex<T> z, std::complex<T> p) {
  using Complex = std::complex<T>;
  const T kEps = std::numeric_limits<T>::epsilon();
  if (p == T(0)) throw std::domain_error("carlson_rj: p must be nonzero");
  const Complex A0 = (x + y + z + T(2) * p) / T(5);
  const Complex x0 = x, y0 = y, z0 = z;
  const Complex delta = (p - x) * (p - y) * (p - z);
  const T Q = std::pow(kEps / 4, T(-1) / 6) * std::max(max_abs(A0 - x, A0 - y, A0 - z), std::abs(A0 - p));
  Complex A = A0;
  Complex sum = 0;
  T f = 1;
  int it = 0;
  for (;;) {
    if (f * Q < std::abs(A)) break;
    if (++it > kMaxIterations) no_convergence("carlson_rj");
    const Complex sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z), sp = std::sqrt(p);
    const Complex l = sx * sy + sx * sz + sy * sz;
    const Complex d = (sp + sx) * (sp + sy) * (sp + sz);
    const Complex e = delta * (f * f * f) / (d * d);
    sum += rf(Complex(1), Complex(1) + e, Complex(1) + e) * f / d;
    f /= 4;
    x = (x + l) / T(4);
    y = (y + l) / T(4);
    z = (z + l) / T(4);
    p = (p + l) / T(4);
    A = (A + l) / T(4);
  }
  // The series is taken in the original arguments scaled by 4^-m / A_m.
  const Complex t = f / A;
  const Complex X = (A0 - x0) * t, Y = (A0 - y0) * t, Z = (A0 - z0) * t;
  const Complex P = (-X - Y - Z) / T(2);
  const Complex E2 = X * Y + X * Z + Y * Z - T(3) * P * P;
  const Complex E3 = X * Y * Z + T(2) * E2 * P + T(4) * P * P * P;
  const Complex E4 = (T(2) * X * Y * Z + E2 * P + T(3) * P * P * P) * P;
  const Complex E5 = X * Y * Z * P * P;
  const Complex series = T(1) - T(3) * E2 / T(14) + E3 / T(6) + T(9) * E2 * E2 / T(88) - T(3) * E4 / T(22) -
                         T(9) * E2 * E3 / T(52) + T(3) * E5 / T(26);
  return f * series / (A * std::sqrt(A)) + T(6) * sum;
}

template <class T>
std::complex<T> legendre_k(std::complex<T> m) {
  if (m == T(1)) throw std::domain_error("K(m) diverges at m = 1");
  return rf<T>(0, T(1) - m, 1);
}

template <class T>
std::complex<T> legendre_e(std::complex<T> m) {
  if (m == T(1)) return 1;
  return rf<T>(0, T(1) - m, 1) - m / T(3) * rj<T>(0, T(1) - m, 1, 1);
}

template <class T>
std::complex<T> legendre_pi(std::complex<T> n, std::complex<T> m) {
  if (m == T(1)) throw std::domain_error("Pi(n|m) diverges at m = 1");
  if (n == T(1)) throw std::domain_error("Pi(n|m) diverges at n = 1");
  if (n == T(0)) return legendre_k(m);
  return rf<T>(0, T(1) - m, 1) + n / T(3) * rj<T>(0, T(1) - m, 1, T(1) - n);
}

}  // namespace

Complex carlson_rf(Complex x, Complex y, Complex z) { return rf(x, y, z); }
Complex carlson_rc(Complex x, Complex y) { return rf(x, y, y); }
Complex carlson_rj(Complex x, Complex y, Complex z, Complex p) { return rj(x, y, z, p); }
Complex carlson_rd(Complex x, Complex y, Complex z) { return rj(x, y, z, z); }

Complex ellint_k(Complex m) { return legendre_k(m); }
Complex ellint_e(Complex m) { return legendre_e(m); }
Complex ellint_pi(Complex n, Complex m) { return legendre_pi(n, m); }

ComplexL ellint_k(ComplexL m) { return legendre_k(m); }
ComplexL ellint_e(ComplexL m) { return legendre_e(m); }
ComplexL ellint_pi(ComplexL n, ComplexL m) { return legendre_pi(n, m); }

}  // namespace dimers
