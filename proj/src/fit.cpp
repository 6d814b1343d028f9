#include "envjust/fit.hpp"

#include <cmath>

namespace envjust {

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw FitError("power-law fit needs at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& [e, v] : pairs) {
    if (!(e > 0) || !(v > 0) || !std::isfinite(v)) throw FitError("power-law fit needs positive finite values");
    sx += std::log(e);
    sy += std::log(v);
  }
  const double n = static_cast<double>(pairs.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [e, v] : pairs) {
    const double dx = std::log(e) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0) throw FitError("power-law fit needs distinct epsilon values");
  PowerLawFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (const auto& [e, v] : pairs) {
    const double r = std::log(v) - (f.intercept + f.slope * std::log(e));
    ss += r * r;
  }
  f.rmsResidual = std::sqrt(ss / n);
  f.points = pairs.size();
  return f;
}

double observed_order(double h1, double e1, double h2, double e2) {
  return std::log(e1 / e2) / std::log(h1 / h2);
}

}  // namespace envjust
