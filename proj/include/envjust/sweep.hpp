#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "envjust/ansatz.hpp"
#include "envjust/carrier.hpp"
#include "envjust/config.hpp"
#include "envjust/duhamel.hpp"
#include "envjust/envelope.hpp"
#include "envjust/fit.hpp"

namespace envjust {

/// Everything a single-epsilon run needs, built from the sweep configuration.
struct RunSetup {
  ModelParams p;
  DerivedParams d;
  CarrierGrid cg;
  GridPtr xiGrid;
  EnvelopeModel model;
  CarrierSystem carrier;
  double gnConstant = 0;
  double smallness = 0;
  double amplitude = 0;
  double E0 = 0;
  double carrierDt = 0;
  SpectralField phi0;
};

RunSetup make_run_setup(const SweepConfig& cfg, double epsilon);

/// 0 followed by n-1 log-spaced times in [tEnd/100, tEnd].
std::vector<double> sample_times(double tEnd, int n);

/// Band-limited real field with |wavenumber| <= kMax, scaled to unit sup-norm.
std::vector<double> band_limited_field(const Grid1D& grid, std::uint64_t seed, double kMax = 2.0, int modes = 8);

struct GronwallInputs {
  double epsilon = 0, alphaHat = 0, lambda = 0, kernelFreq = 0;
  double C0 = 0, CR = 0, CX = 0, D = 0;
  bool operator==(const GronwallInputs&) const = default;
};

struct GronwallVerdict {
  bool holds = true;
  int firstViolation = -1;  // sample index
  double firstViolationTime = 0;
  double M = 0;
  std::vector<double> tube;
  bool operator==(const GronwallVerdict&) const = default;
};

/// a(t) = (1 + ah t + eps t + m^2 t^2 / 2) C0 + eps^2 t^2 CR / 2 + eps^2 M t^2,
/// M = |lambda| (eps^4 D^3 + eps^3 CX D^2) / 2; checks ||y(t)|| <= a(t) exp(|lambda| CX^2 eps^2 t^2 / 2).
GronwallVerdict check_gronwall_tube(const GronwallInputs& in, const std::vector<double>& times,
                                    const std::vector<double>& yNorm);

struct RunRecord {
  double epsilon = 0;
  bool ok = false;
  std::string failure;
  DerivedParams derived;
  std::size_t gridCount = 0;
  double carrierLength = 0, slowLength = 0;
  long carrierMode = 0, backgroundMode = 0;
  double snapOffset = 0;
  double gnConstant = 0, smallness = 0, amplitude = 0, E0 = 0;
  double carrierDt = 0, envelopeDtau = 0;

  std::vector<double> times, error, residual, xnorm, energy;
  double supError = 0, supResidual = 0, D = 0, CX = 0, CR = 0, K = 0;
  bool energyDecay = true;
  GronwallInputs gronwallInputs;
  GronwallVerdict gronwall;
  double refinedSupError = 0, refineChange = 0;
  bool refineOk = true;
  std::vector<std::string> warnings;

  bool operator==(const RunRecord&) const = default;
};

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
  bool operator==(const Verdict&) const = default;
};

struct ReportMetadata {
  std::string config;     // INI echo
  std::string isa;
  unsigned workers = 1;
  double budget = 0, estimatedCost = 0;
  std::string timestamp;  // excluded from determinism comparisons
  bool operator==(const ReportMetadata&) const = default;
};

struct ScalingReport {
  std::vector<RunRecord> perEps;  // epsilon descending
  std::optional<PowerLawFit> errorFit, residualFit;
  double DRatio = 0;              // max/min D over the two smallest epsilons
  std::vector<Verdict> verdicts;
  ReportMetadata metadata;

  bool all_pass() const;
  bool operator==(const ScalingReport&) const = default;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double est) : std::runtime_error(what), estimate(est) {}
  double estimate;
};

/// Work estimate: sum over runs of N log2 N times the step counts.
double estimate_cost(const SweepConfig& cfg);

/// One epsilon: steady state, envelope, ansatz, carrier, errors and residuals.
/// Failures are recorded in the record rather than thrown.
RunRecord run_single(const SweepConfig& cfg, double epsilon, std::size_t index);

ScalingReport run_justification_sweep(const RunConfig& cfg);

struct OracleReport {
  KernelReport calibration;       // at the calibration parameter set
  KernelReport calibrationModel;  // at the model parameters
  PicardResult picard;
  std::vector<std::vector<double>> spectral;  // same layout as picard.y
  double mismatch = 0;                        // sup |picard - spectral|
  double kernelFreq = 0;
  std::vector<Verdict> verdicts;
  bool all_pass() const;
};

/// Linear error equation with constant X = X0 and a smooth source, solved by
/// the Picard/light-cone oracle and by the spectral carrier stepper with the
/// shifted mass gamma - 3 lambda X0^2; plus kernel calibration.
OracleReport run_oracle(const RunConfig& cfg);

/// Fits and verdicts from completed runs (used by the sweep and by `report`).
void assess(ScalingReport& rep, const SweepConfig& cfg);

}  // namespace envjust
