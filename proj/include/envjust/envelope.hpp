#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "envjust/grid.hpp"
#include "envjust/params.hpp"
#include "envjust/split_step.hpp"
#include "envjust/steady_state.hpp"

namespace envjust {

/// The phi-equation on a periodic slow grid:
///   i phi_tau = -phi_xixi - (i alpha/2) phi - c1 phi + N(phi),  c1 = g|R|^2 - nu.
struct EnvelopeModel {
  ModelParams p;
  DerivedParams d;
  GridPtr grid;
  long backgroundMode = 0;  // eta ~ exp(-i kappa xi), kappa = backgroundMode * 2 pi / L
  SteadyState steady;
  SpectralField eta;
  double c1 = 0;
  std::vector<std::string> warnings;

  double g() const { return d.nlsCubic; }
  double kappa() const { return steady.kappa; }
};

/// Solves the steady state for kappa on the grid and assembles the model.
/// A positive c1 (energy quadratic part indefinite) is reported as a warning.
EnvelopeModel make_envelope_model(const ModelParams& p, const DerivedParams& d, GridPtr xiGrid,
                                  long backgroundMode);

struct EnvelopeState {
  double tau = 0;
  SpectralField phi;
  double stepSize = 0;
};

struct EnergyRecord {
  double tau = 0;
  double E = 0;
  double rhs = 0;              // (alpha g / 2) int G |phi|^2
  double dEdtau = 0;
  double balanceResidual = 0;  // |dE/dtau + alpha E - rhs|
};

/// N(phi) = -g [|phi + eta|^2 - |eta|^2](phi + eta), pointwise.
SpectralField nonlinearity_N(const SpectralField& phi, const SpectralField& eta, double g);
/// Same quantity from the five-term expansion of the bracket.
SpectralField nonlinearity_N_expanded(const SpectralField& phi, const SpectralField& eta, double g);

NlsSystem phi_system(const EnvelopeModel& m);

/// One Strang step; builds a fresh stepper (use evolve_envelope for runs).
EnvelopeState step_envelope(const EnvelopeState& s, const EnvelopeModel& m, double dtau);

struct EnvelopeTrajectory {
  std::vector<EnvelopeState> snapshots;  // one per requested output time
  std::vector<EnergyRecord> energy;      // same times
  bool aboveSmallness = false;
};

struct EvolveOptions {
  double smallnessThreshold = 0;  // 0 disables the check
  double blowUpCeiling = 1e8;
};

/// Evolves phi0 from tau = 0 through the ascending outputTimes. Steps land on
/// each output time exactly. Throws BlowUpError.
EnvelopeTrajectory evolve_envelope(const SpectralField& phi0, const EnvelopeModel& m,
                                   const std::vector<double>& outputTimes, double dtau,
                                   const EvolveOptions& opt = {});

double energy(const SpectralField& phi, const EnvelopeModel& m);
double energy_rhs(const SpectralField& phi, const EnvelopeModel& m);

/// Fills dEdtau (differences of order up to 8, stencils shifted inwards at
/// the ends) and balanceResidual. Records must be uniformly spaced; needs at least 5.
void energy_balance_residual(std::vector<EnergyRecord>& records, double alpha);

struct EnergyDecayVerdict {
  double K = 0;                   // max E e^{alpha tau}
  bool decayHolds = true;         // E <= K e^{-alpha tau} with finite K, E >= 0
  double C = 0;                   // constant used in the sharper bound
  bool sharpBoundApplicable = false;  // C sqrt(E0) < 2
  bool sharpBoundHolds = false;
  std::vector<double> violations;  // tau values where the sharper bound fails
};

EnergyDecayVerdict check_energy_decay(const std::vector<EnergyRecord>& records, double alpha,
                                      double C);

/// Smallest constant with ||s phi||_4 <= C ||phi_xi||_2^{1/4} ||s phi||_2^{3/4},
/// s = (3|lambda|/(4 omega))^{1/2}, over Gaussians and seeded random
/// band-limited fields on the grid.
double measure_gn_constant(const GridPtr& grid, double g, std::uint64_t seed, int randomFields = 64);

/// 0.1 * 4 / C^2.
double smallness_threshold(double C);

/// Gaussian a exp(-(xi - center)^2 / (2 width^2)).
SpectralField gaussian(const GridPtr& grid, double amplitude, double center, double width);

/// Amplitude for which the Gaussian family member has energy `target`.
double amplitude_for_energy(const EnvelopeModel& m, double center, double width, double target);

/// A = e^{i nu tau}(phi + eta).
SpectralField reconstruct_A(const EnvelopeState& s, const EnvelopeModel& m);

NlsSystem lle_system(const EnvelopeModel& m);

/// Direct split-step solve of the driven equation for A; one field per output time.
std::vector<SpectralField> solve_lle_direct(const SpectralField& A0, const EnvelopeModel& m,
                                            const std::vector<double>& outputTimes, double dtau);

}  // namespace envjust
