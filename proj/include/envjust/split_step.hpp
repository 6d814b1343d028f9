#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "envjust/grid.hpp"

namespace envjust {

/// Forcing F = amplitude * exp(i K_mode xi) * exp(i frequency tau) on the
/// right-hand side of i u_tau = ... + F.
struct ModeForcing {
  long mode = 0;
  cdouble amplitude{};
  double frequency = 0;
};

/// i u_tau = -u_xixi - (i alpha/2) u - shift u - g [|u + eta|^2 - |eta|^2](u + eta) + F
struct NlsSystem {
  GridPtr grid;
  double alpha = 0;
  double shift = 0;
  double g = 0;
  std::vector<cdouble> eta;  // empty means zero
  std::optional<ModeForcing> forcing;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double tau, std::vector<cdouble> lastFinite)
      : std::runtime_error(what), tau_(tau), last_(std::move(lastFinite)) {}
  double tau() const { return tau_; }
  const std::vector<cdouble>& last_finite_state() const { return last_; }

 private:
  double tau_;
  std::vector<cdouble> last_;
};

/// Strang splitting: exact linear flow (dispersion, damping, shift and the
/// single-mode forcing) for half steps around an RK4 step of the pointwise
/// nonlinearity on a 2x zero-padded grid.
class NlsStepper {
 public:
  explicit NlsStepper(NlsSystem sys);

  /// Advances u (physical samples) from tau to tau + h in place.
  void step(std::vector<cdouble>& u, double tau, double h);

  /// Steps with size at most h, landing exactly on tauEnd.
  void advance(std::vector<cdouble>& u, double tau, double tauEnd, double h);

  const NlsSystem& system() const { return sys_; }

  /// Aborts with BlowUpError when u has non-finite samples or an L2 norm above this.
  double blowUpCeiling = 1e8;

 private:
  struct HalfStep {
    double h = -1;
    std::vector<cdouble> factor;
    cdouble forcingGain{};
  };
  const HalfStep& half_step(double h);
  void linear(std::vector<cdouble>& hat, double tau, double h);
  void check(const std::vector<cdouble>& u, const std::vector<cdouble>& before, double tau) const;

  NlsSystem sys_;
  std::size_t n_, m_;
  std::vector<cdouble> etaPadded_;
  std::vector<cdouble> hat_, padHat_, pad_;
  HalfStep cache_[2];
  int nextSlot_ = 0;
};

/// (e^z - 1) / z, accurate near z = 0.
cdouble phi1(cdouble z);

}  // namespace envjust
