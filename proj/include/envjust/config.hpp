#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "envjust/ansatz.hpp"
#include "envjust/grid.hpp"
#include "envjust/params.hpp"

namespace envjust {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  ModelParams model;
  std::vector<double> epsilons{0.2, 0.14, 0.1, 0.07, 0.05};  // descending
  double T0 = 1.0;
  int samples = 64;
  bool refineCheck = true;  // repeat with doubled samples and compare the max error
  bool residualOnly = false;

  // Initial mismatch u(0) = X(0) + eps^2 f, u_t(0) = X_t(0) + eps^3 g.
  double C0 = 0.0;
  std::uint64_t seed = 1;

  // Grids.
  double slowLength = 40.0;
  int pointsPerWavelength = 8;
  std::size_t maxCount = std::size_t{1} << 16;
  BackgroundConvention convention = BackgroundConvention::ScaledCarrier;

  // Envelope.
  double dtau = 1e-4;
  double width = 2.0;
  std::optional<double> amplitude;  // empty: chosen from the smallness threshold
  double energyFraction = 0.5;
  std::uint64_t gnSeed = 7;

  // Carrier: dt = (2 pi / (3 omega)) / carrierDtDivisor.
  double carrierDtDivisor = 200.0;

  AnsatzOptions ansatz;

  bool operator==(const SweepConfig&) const = default;
};

struct OracleConfig {
  double T = 1.0;
  double dt = 0.125;
  double dx = 0.125;
  double halfWidth = 1.0;  // output points in [-halfWidth, halfWidth]
  double outputSpacing = 0.25;
  double tol = 1e-9;
  double X0 = 0.3;         // constant leading approximation of the linear test
  double quadTol = 1e-8;
  // Kernel calibration uses its own parameter set so the candidates separate.
  double calibGamma = 2.0;
  double calibEpsilon = 0.5;
  double calibAlpha = 2.0;

  bool operator==(const OracleConfig&) const = default;
};

struct RunConfig {
  SweepConfig sweep;
  OracleConfig oracle;
  unsigned workers = 1;
  double budget = 5e11;  // estimated work units, see estimate_cost

  bool operator==(const RunConfig&) const = default;
};

/// INI text with sections [model] [grid] [envelope] [carrier] [sweep] [oracle] [run].
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Lists violated constraints of the sweep configuration.
std::vector<std::string> validate_sweep_config(const SweepConfig& c);

/// Writes the configuration back as INI text (parse_config round-trips it).
std::string to_ini(const RunConfig& c);

}  // namespace envjust
