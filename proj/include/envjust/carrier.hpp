#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "envjust/grid.hpp"
#include "envjust/params.hpp"

namespace envjust {

/// amplitude * (exp(i(K_mode x - frequency t)) + c.c.)
struct PlaneWaveDrive {
  long mode = 0;
  double frequency = 0;
  double amplitude = 0;
};

/// u_tt + damping u_t - beta u_xx + gamma u - cubic u^3 = drive + source
struct CarrierSystem {
  GridPtr grid;
  double damping = 0;
  double beta = 1;
  double gamma = 1;
  double cubic = 0;
  PlaneWaveDrive drive;
  /// Optional extra source S(t, x), written into `out` (one value per grid point).
  std::function<void(double t, std::span<double> out)> source;
};

/// The phi^4 model on a commensurate grid. The drive shares the background
/// wavenumber used by the envelope forcing; it is spatially uniform when the
/// background sits exactly at k.
CarrierSystem phi4_system(const ModelParams& p, const DerivedParams& d, const CarrierGrid& cg);

/// Frequency of the phi^4 drive for a given background x-wavenumber.
double drive_frequency(const ModelParams& p, const DerivedParams& d, double backgroundWavenumber);

struct CarrierState {
  double t = 0;
  GridPtr grid;
  std::vector<double> u, ut;
  double stepSize = 0;
};

class CarrierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact propagator over time h of q'' + damping q' + (beta K^2 + gamma) q = 0,
/// as the matrix {m00, m01, m10, m11} acting on (q, q').
std::array<double, 4> oscillator_propagator(double K, double damping, double beta, double gamma,
                                            double h);

/// Strang splitting in transform space: exact damped-oscillator half steps
/// around a kick u_t += dt lambda u^3 (dealiased) + exact drive integral +
/// Simpson integral of the source.
class CarrierStepper {
 public:
  explicit CarrierStepper(CarrierSystem sys);

  /// Advances s to tEnd with steps of at most dt, landing on tEnd exactly.
  void advance(CarrierState& s, double tEnd, double dt);

  const CarrierSystem& system() const { return sys_; }

 private:
  struct Half {
    double h = -1;
    std::vector<double> m00, m01, m10, m11;
  };
  const Half& half(double h);
  void step_spectral(double t, double dt);
  void enforce_reality();

  CarrierSystem sys_;
  std::size_t n_, m_;
  std::vector<cdouble> uHat_, pHat_, padHat_, pad_, work_;
  std::vector<double> src0_, src1_, src2_;
  Half cache_[2];
  int nextSlot_ = 0;
};

CarrierState step_carrier(const CarrierState& s, const CarrierSystem& sys, double dt);

/// Snapshots at the ascending output times (t = tau / epsilon^2 for
/// envelope-aligned sampling).
std::vector<CarrierState> evolve_carrier(const std::vector<double>& u0, const std::vector<double>& ut0,
                                         const CarrierSystem& sys,
                                         const std::vector<double>& outputTimes, double dt);

/// int (u_t^2 + beta u_x^2 + gamma u^2) / 2 dx
double linear_energy(const CarrierState& s, double beta, double gamma);

/// (2 pi / (3 omega)) / 20
double default_carrier_dt(const DerivedParams& d);

}  // namespace envjust
