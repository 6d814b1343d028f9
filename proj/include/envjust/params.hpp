#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace envjust {

/// Physical and scaling constants of the damped driven phi^4 model and its
/// Lugiato-Lefever envelope.
struct ModelParams {
  double alpha = 1.0;    // damping rate (> 0)
  double beta = 1.0;     // dispersion (> 0)
  double gamma = 1.0;    // restoring coefficient (> 0)
  double lambda = -1.0;  // cubic coefficient (< 0, softening)
  double epsilon = 0.1;  // smallness parameter in (0, 1)
  double h = 0.1;        // drive amplitude (>= 0)
  double nu = 1.0;       // detuning
  double k = 1.0;        // carrier wavenumber (>= 0)

  bool operator==(const ModelParams&) const = default;
};

/// Quantities fixed by the dispersion relation and the multiple-scale ansatz.
struct DerivedParams {
  double omega = 0.0;           // sqrt(beta k^2 + gamma)
  double v = 0.0;               // group velocity beta k / omega
  double c = 0.0;               // slow-space scale sqrt(2 omega^3 / (gamma beta))
  double kappa = 0.0;           // background wavenumber k / epsilon (unsnapped)
  double Omega = 0.0;           // drive frequency gamma / omega - epsilon^2 nu
  double alphaHat = 0.0;        // epsilon^2 alpha / 2
  double thirdHarmCoeff = 0.0;  // lambda eps^3 / (9 beta k^2 - 9 omega^2 + gamma)
  double nlsCubic = 0.0;        // 3 lambda / (2 omega), envelope cubic coefficient

  bool operator==(const DerivedParams&) const = default;
};

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Lists every violated constraint; an empty list means the set is valid.
std::vector<std::string> validate_params(const ModelParams& p);

/// Raw evaluation of the derived constants. Does not validate, so it also
/// serves degenerate configurations (lambda = 0, h = 0) used in tests.
DerivedParams compute_derived(const ModelParams& p);

/// Validating front end; throws ValidationError.
DerivedParams derive_params(const ModelParams& p);

}  // namespace envjust
