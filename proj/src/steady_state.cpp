#include "envjust/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "envjust/spectral.hpp"

namespace envjust {

namespace {

long double horner(const std::array<double, 4>& c, long double x) {
  return ((static_cast<long double>(c[0]) * x + c[1]) * x + c[2]) * x + c[3];
}

long double horner_derivative(const std::array<double, 4>& c, long double x) {
  return (3.0L * c[0] * x + 2.0L * c[1]) * x + c[2];
}

double polish(const std::array<double, 4>& c, double x0) {
  long double x = x0;
  for (int it = 0; it < 8; ++it) {
    const long double d = horner_derivative(c, x);
    if (d == 0) break;
    const long double step = horner(c, x) / d;
    x -= step;
    if (std::fabs(step) <= 1e-21L * std::max(1.0L, std::fabs(x))) break;
  }
  return static_cast<double>(x);
}

std::vector<double> cubic_closed_form(double a, double b, double c) {
  // t^3 + p t + q = 0 with x = t - a/3.
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  std::vector<double> t;
  if (disc > 0) {
    const double big = -std::copysign(std::cbrt(0.5 * std::fabs(q) + std::sqrt(disc)), q);
    t.push_back(big != 0 ? big - p / (3.0 * big) : 0.0);
  } else if (p == 0) {
    t.push_back(std::cbrt(-q));
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double th = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) t.push_back(m * std::cos(th - 2.0 * std::numbers::pi * k / 3.0));
  }
  for (auto& v : t) v -= shift;
  return t;
}

}  // namespace

std::array<double, 4> modulus_cubic_coefficients(const ModelParams& p, const DerivedParams& d,
                                                 double kappa) {
  const double g = d.nlsCubic;
  const double s = kappa * kappa + p.nu;
  return {g * g, -2.0 * g * s, 0.25 * p.alpha * p.alpha + s * s,
          -p.h * p.h / (4.0 * d.omega * d.omega)};
}

std::vector<double> real_cubic_roots(const std::array<double, 4>& c) {
  std::vector<double> roots;
  if (c[0] != 0) {
    roots = cubic_closed_form(c[1] / c[0], c[2] / c[0], c[3] / c[0]);
  } else if (c[1] != 0) {
    const double disc = c[2] * c[2] - 4 * c[1] * c[3];
    if (disc >= 0) {
      const double qq = -0.5 * (c[2] + std::copysign(std::sqrt(disc), c[2]));
      if (qq != 0) roots.push_back(qq / c[1]);
      roots.push_back(qq != 0 ? c[3] / qq : 0.0);
    }
  } else if (c[2] != 0) {
    roots.push_back(-c[3] / c[2]);
  }
  for (auto& r : roots) r = polish(c, r);
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) {
                            return std::fabs(x - y) <= 1e-12 * std::max({1.0, std::fabs(x), std::fabs(y)});
                          }),
              roots.end());
  return roots;
}

SteadyState solve_modulus_cubic(const ModelParams& p, const DerivedParams& d, double kappa) {
  const auto c = modulus_cubic_coefficients(p, d, kappa);
  SteadyState s;
  s.kappa = kappa;
  s.allRealRoots = real_cubic_roots(c);
  if (s.allRealRoots.size() != 1) {
    std::ostringstream msg;
    msg << "modulus cubic has " << s.allRealRoots.size() << " real roots (expected one):";
    for (double r : s.allRealRoots) msg << ' ' << r;
    msg << "; coefficients " << c[0] << ", " << c[1] << ", " << c[2] << ", " << c[3];
    throw SteadyStateError(msg.str());
  }
  s.r = s.allRealRoots.front();
  if (s.r < 0) {
    if (s.r > -1e-300 || p.h == 0) {
      s.r = 0;
    } else {
      throw SteadyStateError("modulus cubic root is negative");
    }
  }
  const double scale = std::max({std::fabs(c[0]), std::fabs(c[1]), std::fabs(c[2]), std::fabs(c[3])});
  s.cubicResidual = scale > 0 ? static_cast<double>(std::fabs(horner(c, s.r))) / scale : 0.0;
  return s;
}

SteadyState compute_R(SteadyState s, const ModelParams& p, const DerivedParams& d) {
  const double sk = s.kappa * s.kappa + p.nu;
  const cdouble denom{d.nlsCubic * s.r - sk, 0.5 * p.alpha};
  if (std::abs(denom) == 0) throw SteadyStateError("degenerate parameters: R denominator vanishes");
  s.R = -(p.h / (2.0 * d.omega)) / denom;
  return s;
}

SteadyState solve_steady_state(const ModelParams& p, const DerivedParams& d, double kappa) {
  return compute_R(solve_modulus_cubic(p, d, kappa), p, d);
}

SpectralField eval_background(const SteadyState& s, const GridPtr& xiGrid) {
  SpectralField eta(xiGrid);
  for (std::size_t j = 0; j < xiGrid->count; ++j)
    eta.samples[j] = s.R * std::polar(1.0, -s.kappa * xiGrid->x(j));
  return eta;
}

double steady_lle_residual(const SteadyState& s, const ModelParams& p, const DerivedParams& d) {
  // With A = R e^{-i(kappa xi - nu tau)} every term carries the same phase.
  const double sk = s.kappa * s.kappa + p.nu;
  const double modR2 = std::norm(s.R);
  const cdouble lhs = s.R * cdouble{-sk + d.nlsCubic * modR2, 0.5 * p.alpha};
  const cdouble forcing = -p.h / (2.0 * d.omega);
  return std::abs(lhs - forcing);
}

double steady_lle_residual_on_grid(const SteadyState& s, const GridPtr& xiGrid, double kappaGrid,
                                   const ModelParams& p, const DerivedParams& d, double tau) {
  const std::size_t n = xiGrid->count;
  SpectralField a(xiGrid);
  std::vector<cdouble> forcing(n);
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble phase = std::polar(1.0, -(kappaGrid * xiGrid->x(j) - p.nu * tau));
    a.samples[j] = s.R * phase;
    forcing[j] = -(p.h / (2.0 * d.omega)) * phase;
  }
  const SpectralField axx = spectral_derivative(a, 2);
  double worst = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const cdouble aj = a.samples[j];
    const cdouble aTau = cdouble{0, p.nu} * aj;
    const cdouble res = cdouble{0, 1} * aTau + axx.samples[j] + cdouble{0, 0.5 * p.alpha} * aj +
                        d.nlsCubic * std::norm(aj) * aj - forcing[j];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double phi_linear_coefficient(const SteadyState& s, const ModelParams& p, const DerivedParams& d) {
  return d.nlsCubic * std::norm(s.R) - p.nu;
}

}  // namespace envjust
