#include "envjust/params.hpp"

#include <cmath>
#include <sstream>

namespace envjust {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream os;
  os << "invalid model parameters: ";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) os << "; ";
    os << items[i];
  }
  return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

std::vector<std::string> validate_params(const ModelParams& p) {
  std::vector<std::string> out;
  auto finite = [&](double x, const char* name) {
    if (!std::isfinite(x)) out.push_back(std::string(name) + " must be finite");
    return std::isfinite(x);
  };
  if (finite(p.alpha, "alpha") && !(p.alpha > 0)) out.push_back("alpha must be positive");
  if (finite(p.beta, "beta") && !(p.beta > 0)) out.push_back("beta must be positive");
  if (finite(p.gamma, "gamma") && !(p.gamma > 0)) out.push_back("gamma must be positive");
  if (finite(p.lambda, "lambda") && !(p.lambda < 0)) out.push_back("lambda must be negative");
  if (finite(p.epsilon, "epsilon") && !(p.epsilon > 0 && p.epsilon < 1))
    out.push_back("epsilon must lie in (0, 1)");
  if (finite(p.h, "h") && !(p.h >= 0)) out.push_back("h must be non-negative");
  finite(p.nu, "nu");
  if (finite(p.k, "k") && !(p.k >= 0)) out.push_back("k must be non-negative");
  if (std::isfinite(p.gamma) && std::isfinite(p.epsilon) && std::isfinite(p.alpha) &&
      !(p.gamma > p.epsilon * p.epsilon * p.alpha / 2))
    out.push_back("gamma must exceed epsilon^2 alpha / 2");
  return out;
}

DerivedParams compute_derived(const ModelParams& p) {
  DerivedParams d;
  d.omega = std::sqrt(p.beta * p.k * p.k + p.gamma);
  d.v = p.beta * p.k / d.omega;
  d.c = std::sqrt(2 * d.omega * d.omega * d.omega / (p.gamma * p.beta));
  d.kappa = p.k / p.epsilon;
  d.Omega = p.gamma / d.omega - p.epsilon * p.epsilon * p.nu;
  d.alphaHat = p.epsilon * p.epsilon * p.alpha / 2;
  // 9 beta k^2 - 9 omega^2 + gamma reduces to -8 gamma on the dispersion
  // relation; the reduced form avoids cancellation for large k.
  const double eps3 = p.epsilon * p.epsilon * p.epsilon;
  d.thirdHarmCoeff = -p.lambda * eps3 / (8 * p.gamma);
  d.nlsCubic = 1.5 * p.lambda / d.omega;
  return d;
}

DerivedParams derive_params(const ModelParams& p) {
  auto violations = validate_params(p);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return compute_derived(p);
}

}  // namespace envjust
