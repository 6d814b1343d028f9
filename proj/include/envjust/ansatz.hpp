#pragma once

#include <optional>
#include <string>
#include <vector>

#include "envjust/carrier.hpp"
#include "envjust/envelope.hpp"

namespace envjust {

struct AnsatzSnapshot {
  double t = 0;
  std::vector<double> X, Xt;
  double supX = 0, supXt = 0;
};

struct ResidualReport {
  double epsilon = 0;
  std::vector<double> times;
  std::vector<double> supRes;
};

enum class SecondDerivative { FiniteDifference, Analytic };

struct AnsatzOptions {
  bool thirdHarmonic = true;
  SecondDerivative secondDerivative = SecondDerivative::FiniteDifference;
  double fdStep = 0;  // 0: (2 pi / (3 omega)) / 100

  bool operator==(const AnsatzOptions&) const = default;
};

/// Envelope and carrier quantities evaluated at one instant, on the carrier grid.
struct SlowFields {
  std::vector<cdouble> A, Axi, Axixi, Atau;   // at xi = eps c (x - v t), tau = eps^2 t
  std::vector<cdouble> Atauxi, Atautau;       // filled only when requested
};

/// The modulated ansatz X = eps A e^{i theta} + b A^3 e^{3 i theta} + c.c. and
/// the residual of the phi^4 equation at X. The slow grid must be the image
/// of the carrier grid (same count, length scaled by eps c).
class Ansatz {
 public:
  Ansatz(const EnvelopeModel& env, const CarrierSystem& carrier, AnsatzOptions opt = {});

  /// A on the slow grid at tau = eps^2 t.
  AnsatzSnapshot build_X(const SpectralField& A, double t) const;
  void build_Xt(const SpectralField& A, double t, AnsatzSnapshot& snap) const;
  AnsatzSnapshot build(const SpectralField& A, double t) const;

  /// Slow-grid A_tau from the envelope equation.
  std::vector<cdouble> A_tau(const SpectralField& A, double tau) const;

  SlowFields slow_fields(const SpectralField& A, double t, bool second) const;

  std::vector<double> Xtt_analytic(const SpectralField& A, double t) const;
  /// Fourth-order central differences of the analytic X_t; A at the
  /// neighbouring times comes from short envelope steps from `s`.
  std::vector<double> Xtt_fd(const EnvelopeState& s, double t, double delta) const;

  /// Res = X_tt + damping X_t - beta X_xx + gamma X - lambda X^3 - drive.
  std::vector<double> residual(const AnsatzSnapshot& snap, const std::vector<double>& Xtt) const;
  /// Residual at the snapshot's time with the configured X_tt method.
  std::vector<double> residual(const EnvelopeState& s, double t) const;

  /// The phi^4 drive at time t on the carrier grid.
  std::vector<double> drive(double t) const;

  const EnvelopeModel& envelope() const { return env_; }
  const CarrierSystem& carrier() const { return sys_; }
  double fd_step() const;
  double third_harmonic_coefficient() const { return b_; }

 private:
  std::vector<cdouble> to_carrier_grid(const std::vector<cdouble>& slow, double t) const;
  std::vector<cdouble> forcing(double tau) const;

  EnvelopeModel env_;
  CarrierSystem sys_;
  AnsatzOptions opt_;
  double b_ = 0;
  GridPtr xgrid_;
};

/// Per-time sup residual for a list of envelope states at tau_i = eps^2 t_i.
ResidualReport compute_residual(const Ansatz& ansatz, const std::vector<EnvelopeState>& states,
                                const std::vector<double>& times);

struct RunSummary {
  double epsilon = 0;
  double supXandXt = 0;  // sup_t (||X_t|| + ||X||)
  double supRes = 0;     // sup_t ||Res||
};

struct AnsatzConstants {
  double CX = 0, CR = 0;
  double epsMin = 0, epsMax = 0;
  std::vector<std::string> warnings;
};

/// C_X = max (||X_t|| + ||X||)/eps, C_R = max ||Res||/eps^4 over the runs.
/// Warns when C_R grows monotonically by more than 2x as eps decreases.
AnsatzConstants measure_constants(const std::vector<RunSummary>& runs);

}  // namespace envjust
