#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace envjust {

struct PowerLawFit {
  double slope = 0;
  double intercept = 0;  // log of the prefactor
  double rmsResidual = 0;
  std::size_t points = 0;

  bool operator==(const PowerLawFit&) const = default;
};

class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Least squares of log(value) against log(eps). Needs at least 3 pairs with
/// positive entries.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& pairs);

/// Observed order log(e1/e2)/log(h1/h2) from errors at two step sizes.
double observed_order(double h1, double e1, double h2, double e2);

}  // namespace envjust
