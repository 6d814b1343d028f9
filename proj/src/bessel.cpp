#include "envjust/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace envjust {

namespace {

// sum_k (-1)^k (z/2)^(2k+n) / (k! (k+n)!), without the (z/2)^n factor.
long double series_core(int n, long double z) {
  const long double q = -0.25L * z * z;
  long double term = 1.0L;
  for (int j = 1; j <= n; ++j) term /= j;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) < 1e-21L) break;
  }
  return sum;
}

double hankel(int n, double z) {
  const double mu = 4.0 * n * n;
  double P = 0, Q = 0, term = 1, last = INFINITY;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * 8.0 * z);
    const double mag = std::fabs(term);
    if (mag > last) break;  // asymptotic series starts diverging
    last = mag;
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0)
      P += sgn * term;
    else
      Q += sgn * term;
    if (mag < 1e-18) break;
  }
  const double chi = z - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * z)) * (P * std::cos(chi) - Q * std::sin(chi));
}

}  // namespace

double bessel_j0(double z) {
  const double a = std::fabs(z);
  if (a < kBesselSeriesLimit) return static_cast<double>(series_core(0, a));
  return hankel(0, a);
}

double bessel_j1(double z) {
  const double a = std::fabs(z);
  const double v = a < kBesselSeriesLimit ? static_cast<double>(0.5L * a * series_core(1, a)) : hankel(1, a);
  return z < 0 ? -v : v;
}

double bessel_J(int n, double z) {
  if (n == 0) return bessel_j0(z);
  if (n == 1) return bessel_j1(z);
  throw std::invalid_argument("bessel_J supports orders 0 and 1");
}

double bessel_j1_over_z(double z) {
  const double a = std::fabs(z);
  if (a < kBesselSeriesLimit) return static_cast<double>(0.5L * series_core(1, a));
  return hankel(1, a) / a;
}

}  // namespace envjust
