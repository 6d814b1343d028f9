#include "envjust/carrier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "envjust/kernels.hpp"
#include "envjust/spectral.hpp"
#include "envjust/split_step.hpp"

namespace envjust {

double drive_frequency(const ModelParams& p, const DerivedParams& d, double backgroundWavenumber) {
  return d.omega - backgroundWavenumber * d.v - p.epsilon * p.epsilon * p.nu;
}

CarrierSystem phi4_system(const ModelParams& p, const DerivedParams& d, const CarrierGrid& cg) {
  CarrierSystem s;
  s.grid = cg.grid;
  s.damping = p.epsilon * p.epsilon * p.alpha;
  s.beta = p.beta;
  s.gamma = p.gamma;
  s.cubic = p.lambda;
  s.drive.mode = cg.driveMode();
  s.drive.frequency = drive_frequency(p, d, cg.backgroundWavenumber);
  s.drive.amplitude = p.epsilon * p.epsilon * p.epsilon * p.h;
  return s;
}

std::array<double, 4> oscillator_propagator(double K, double damping, double beta, double gamma,
                                            double h) {
  const double a = 0.5 * damping;
  const double w2 = beta * K * K + gamma - a * a;
  if (!(w2 > 0)) throw CarrierError("overdamped carrier mode: beta K^2 + gamma <= (damping/2)^2");
  const double w = std::sqrt(w2);
  const double e = std::exp(-a * h), cs = std::cos(w * h), sn = std::sin(w * h) / w;
  return {e * (cs + a * sn), e * sn, -e * (w2 + a * a) * sn, e * (cs - a * sn)};
}

CarrierStepper::CarrierStepper(CarrierSystem sys) : sys_(std::move(sys)) {
  n_ = sys_.grid->count;
  m_ = 2 * n_;
  uHat_.resize(n_);
  pHat_.resize(n_);
  work_.resize(n_);
  padHat_.resize(m_);
  pad_.resize(m_);
  if (sys_.source) {
    src0_.resize(n_);
    src1_.resize(n_);
    src2_.resize(n_);
  }
  // Fail at setup rather than mid-run.
  for (double K : sys_.grid->wavenumbers) oscillator_propagator(K, sys_.damping, sys_.beta, sys_.gamma, 0);
}

const CarrierStepper::Half& CarrierStepper::half(double h) {
  for (const auto& c : cache_)
    if (c.h == h) return c;
  Half& c = cache_[nextSlot_];
  nextSlot_ ^= 1;
  c.h = h;
  c.m00.resize(n_);
  c.m01.resize(n_);
  c.m10.resize(n_);
  c.m11.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const auto m = oscillator_propagator(sys_.grid->wavenumbers[j], sys_.damping, sys_.beta, sys_.gamma, h);
    c.m00[j] = m[0];
    c.m01[j] = m[1];
    c.m10[j] = m[2];
    c.m11[j] = m[3];
  }
  return c;
}

void CarrierStepper::step_spectral(double t, double dt) {
  const Half& hs = half(0.5 * dt);
  const kernels::OscillatorTable tab{hs.m00, hs.m01, hs.m10, hs.m11};
  kernels::oscillator_apply(uHat_, pHat_, tab);

  if (sys_.cubic != 0) {
    pad_spectrum(uHat_, padHat_);
    fft_inverse(padHat_, pad_);
    kernels::cube_real(pad_, pad_, sys_.cubic * dt);
    fft_forward(pad_, padHat_);
    truncate_spectrum(padHat_, work_);
    for (std::size_t j = 0; j < n_; ++j) pHat_[j] += work_[j];
  }

  if (sys_.drive.amplitude != 0) {
    const double W = sys_.drive.frequency;
    const cdouble integral = std::polar(1.0, -W * t) * dt * phi1(cdouble{0, -W * dt});
    const cdouble c = static_cast<double>(n_) * sys_.drive.amplitude * integral;
    pHat_[sys_.grid->slot(sys_.drive.mode)] += c;
    pHat_[sys_.grid->slot(-sys_.drive.mode)] += std::conj(c);
  }

  if (sys_.source) {
    sys_.source(t, src0_);
    sys_.source(t + 0.5 * dt, src1_);
    sys_.source(t + dt, src2_);
    for (std::size_t j = 0; j < n_; ++j)
      work_[j] = dt / 6.0 * (src0_[j] + 4.0 * src1_[j] + src2_[j]);
    fft_forward(work_, work_);
    for (std::size_t j = 0; j < n_; ++j) pHat_[j] += work_[j];
  }

  kernels::oscillator_apply(uHat_, pHat_, tab);
}

void CarrierStepper::enforce_reality() {
  double scale = 0, worst = 0;
  for (std::size_t j = 0; j < n_; ++j) scale = std::max({scale, std::abs(uHat_[j]), std::abs(pHat_[j])});
  for (std::size_t j = 0; j <= n_ / 2; ++j) {
    const std::size_t k = (n_ - j) % n_;
    for (auto* v : {&uHat_, &pHat_}) {
      auto& a = (*v)[j];
      auto& b = (*v)[k];
      worst = std::max(worst, std::abs(a - std::conj(b)));
      const cdouble sym = 0.5 * (a + std::conj(b));
      a = sym;
      b = std::conj(sym);
    }
  }
  if (!std::isfinite(scale)) throw CarrierError("non-finite carrier values");
  if (worst > 1e-11 * std::max(scale, 1e-300)) throw CarrierError("carrier field lost conjugate symmetry");
}

void CarrierStepper::advance(CarrierState& s, double tEnd, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
  const long steps = std::max(0L, std::lround(std::ceil((tEnd - s.t) / dt - 1e-9)));
  if (steps == 0) return;
  for (std::size_t j = 0; j < n_; ++j) {
    uHat_[j] = s.u[j];
    pHat_[j] = s.ut[j];
  }
  fft_forward(uHat_, uHat_);
  fft_forward(pHat_, pHat_);
  for (long i = 0; i < steps; ++i) {
    const double t0 = s.t + static_cast<double>(i) * dt;
    const double h = (i + 1 == steps) ? tEnd - t0 : dt;
    if (h > 0) step_spectral(t0, h);
    enforce_reality();
  }
  fft_inverse(uHat_, uHat_);
  fft_inverse(pHat_, pHat_);
  for (std::size_t j = 0; j < n_; ++j) {
    s.u[j] = uHat_[j].real();
    s.ut[j] = pHat_[j].real();
  }
  s.t = tEnd;
  s.stepSize = dt;
}

CarrierState step_carrier(const CarrierState& s, const CarrierSystem& sys, double dt) {
  CarrierStepper st(sys);
  CarrierState out = s;
  st.advance(out, s.t + dt, dt);
  return out;
}

std::vector<CarrierState> evolve_carrier(const std::vector<double>& u0, const std::vector<double>& ut0,
                                         const CarrierSystem& sys,
                                         const std::vector<double>& outputTimes, double dt) {
  if (u0.size() != sys.grid->count || ut0.size() != sys.grid->count)
    throw GridError("carrier initial data does not match the grid");
  if (!std::is_sorted(outputTimes.begin(), outputTimes.end()))
    throw std::invalid_argument("output times must be ascending");
  CarrierStepper st(sys);
  CarrierState s{0.0, sys.grid, u0, ut0, dt};
  std::vector<CarrierState> out;
  out.reserve(outputTimes.size());
  for (double t : outputTimes) {
    st.advance(s, t, dt);
    s.t = t;
    out.push_back(s);
  }
  return out;
}

double linear_energy(const CarrierState& s, double beta, double gamma) {
  const std::size_t n = s.u.size();
  SpectralField u(s.grid);
  for (std::size_t j = 0; j < n; ++j) u.samples[j] = s.u[j];
  const SpectralField ux = spectral_derivative(u, 1);
  std::vector<double> dens(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = ux.samples[j].real();
    dens[j] = 0.5 * (s.ut[j] * s.ut[j] + beta * x * x + gamma * s.u[j] * s.u[j]);
  }
  return integrate(*s.grid, dens);
}

double default_carrier_dt(const DerivedParams& d) {
  return (2 * std::numbers::pi / (3 * d.omega)) / 20.0;
}

}  // namespace envjust
