#include "envjust/split_step.hpp"

#include <cmath>

#include "envjust/kernels.hpp"
#include "envjust/spectral.hpp"

namespace envjust {

cdouble phi1(cdouble z) {
  if (std::abs(z) < 0.1) {
    // Horner form of sum z^k / (k+1)!, k = 0..12.
    cdouble s = 1.0;
    for (int k = 13; k >= 2; --k) s = 1.0 + s * z / static_cast<double>(k);
    return s;
  }
  return (std::exp(z) - 1.0) / z;
}

NlsStepper::NlsStepper(NlsSystem sys) : sys_(std::move(sys)) {
  n_ = sys_.grid->count;
  m_ = 2 * n_;
  hat_.resize(n_);
  padHat_.resize(m_);
  pad_.resize(m_);
  etaPadded_.assign(m_, cdouble{});
  if (!sys_.eta.empty()) {
    if (sys_.eta.size() != n_) throw GridError("background length does not match grid");
    auto etaHat = fft_forward(sys_.eta);
    std::vector<cdouble> padded(m_);
    pad_spectrum(etaHat, padded);
    fft_inverse(padded, etaPadded_);
  }
}

const NlsStepper::HalfStep& NlsStepper::half_step(double h) {
  for (const auto& c : cache_)
    if (c.h == h) return c;
  HalfStep& c = cache_[nextSlot_];
  nextSlot_ ^= 1;
  c.h = h;
  c.factor.resize(n_);
  const auto& k = sys_.grid->wavenumbers;
  for (std::size_t j = 0; j < n_; ++j) {
    const cdouble L{-0.5 * sys_.alpha, -(k[j] * k[j] - sys_.shift)};
    c.factor[j] = std::exp(L * h);
  }
  if (sys_.forcing) {
    const std::size_t s = sys_.grid->slot(sys_.forcing->mode);
    const double kf = sys_.grid->wavenumbers[s];
    const cdouble L{-0.5 * sys_.alpha, -(kf * kf - sys_.shift)};
    const cdouble iw{0, sys_.forcing->frequency};
    c.forcingGain = c.factor[s] * h * phi1((iw - L) * h);
  }
  return c;
}

void NlsStepper::linear(std::vector<cdouble>& hat, double tau, double h) {
  const HalfStep& hs = half_step(h);
  kernels::complex_multiply(hat, hs.factor);
  if (sys_.forcing) {
    // u_tau = L u - i F: the forced mode picks up the exact Duhamel integral.
    const std::size_t s = sys_.grid->slot(sys_.forcing->mode);
    const cdouble src = cdouble{0, -1} * static_cast<double>(n_) * sys_.forcing->amplitude *
                        std::polar(1.0, sys_.forcing->frequency * tau);
    hat[s] += src * hs.forcingGain;
  }
}

void NlsStepper::check(const std::vector<cdouble>& u, const std::vector<cdouble>& before,
                       double tau) const {
  double s = 0;
  for (const auto& v : u) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw BlowUpError("non-finite envelope values", tau, before);
    s += std::norm(v);
  }
  const double norm = std::sqrt(s * sys_.grid->spacing());
  if (norm > blowUpCeiling) throw BlowUpError("envelope norm exceeded the blow-up ceiling", tau, before);
}

void NlsStepper::step(std::vector<cdouble>& u, double tau, double h) {
  const std::vector<cdouble> before = u;
  const double hh = 0.5 * h;
  fft_forward(u, hat_);
  linear(hat_, tau, hh);
  pad_spectrum(hat_, padHat_);
  fft_inverse(padHat_, pad_);
  kernels::nls_rk4(pad_, etaPadded_, sys_.g, h);
  fft_forward(pad_, padHat_);
  truncate_spectrum(padHat_, hat_);
  linear(hat_, tau + hh, hh);
  fft_inverse(hat_, u);
  check(u, before, tau + h);
}

void NlsStepper::advance(std::vector<cdouble>& u, double tau, double tauEnd, double h) {
  if (!(h > 0)) throw std::invalid_argument("step size must be positive");
  const long steps = std::max(0L, std::lround(std::ceil((tauEnd - tau) / h - 1e-9)));
  for (long i = 0; i < steps; ++i) {
    const double t0 = tau + static_cast<double>(i) * h;
    const double dt = (i + 1 == steps) ? tauEnd - t0 : h;
    if (dt > 0) step(u, t0, dt);
  }
}

}  // namespace envjust
