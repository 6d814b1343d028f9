#pragma once

namespace envjust {

/// Bessel function of the first kind, orders 0 and 1, for real argument.
/// Power series in extended precision for |z| < 20, Hankel expansion beyond.
double bessel_j0(double z);
double bessel_j1(double z);
double bessel_J(int n, double z);

/// J1(z) / z, continuous at 0 where it equals 1/2.
double bessel_j1_over_z(double z);

inline constexpr double kBesselSeriesLimit = 16.0;

}  // namespace envjust
