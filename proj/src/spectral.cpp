#include "envjust/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace envjust {

namespace {

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class PlanCache {
 public:
  ~PlanCache() {
    std::lock_guard lock(planner_mutex());
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n, int sign, bool inPlace) {
    const auto key = std::make_tuple(n, sign, inPlace);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cdouble> a(n), b(n);
    auto* src = reinterpret_cast<fftw_complex*>(a.data());
    auto* dst = inPlace ? src : reinterpret_cast<fftw_complex*>(b.data());
    fftw_plan plan;
    {
      std::lock_guard lock(planner_mutex());
      plan = fftw_plan_dft_1d(static_cast<int>(n), src, dst, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::map<std::tuple<std::size_t, int, bool>, fftw_plan> plans_;
};

PlanCache& plans() {
  thread_local PlanCache cache;
  return cache;
}

void execute(std::span<const cdouble> in, std::span<cdouble> out, int sign) {
  if (in.size() != out.size()) throw GridError("fft size mismatch");
  fftw_plan plan = plans().get(in.size(), sign, in.data() == out.data());
  // FFTW's new-array interface takes a non-const input even for out-of-place
  // transforms; it does not write to it.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void fft_forward(std::span<const cdouble> in, std::span<cdouble> out) {
  execute(in, out, FFTW_FORWARD);
}

void fft_inverse(std::span<const cdouble> in, std::span<cdouble> out) {
  execute(in, out, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
}

std::vector<cdouble> fft_forward(std::span<const cdouble> in) {
  std::vector<cdouble> out(in.size());
  fft_forward(in, out);
  return out;
}

std::vector<cdouble> fft_inverse(std::span<const cdouble> in) {
  std::vector<cdouble> out(in.size());
  fft_inverse(in, out);
  return out;
}

SpectralField spectral_derivative(const SpectralField& f, int order) {
  if (order != 1 && order != 2) throw GridError("spectral derivative order must be 1 or 2");
  const Grid1D& g = *f.grid;
  auto hat = fft_forward(f.samples);
  const std::size_t nyq = g.count / 2;
  for (std::size_t j = 0; j < g.count; ++j) {
    const double kw = g.wavenumbers[j];
    if (order == 1)
      hat[j] *= (j == nyq) ? cdouble{} : cdouble{0, kw};
    else
      hat[j] *= -kw * kw;
  }
  return SpectralField(f.grid, fft_inverse(hat));
}

SpectralField spectral_shift(const SpectralField& f, double shift) {
  const Grid1D& g = *f.grid;
  auto hat = fft_forward(f.samples);
  const std::size_t nyq = g.count / 2;
  for (std::size_t j = 0; j < g.count; ++j) {
    if (j == nyq) {
      hat[j] = {};
      continue;
    }
    const double ph = -g.wavenumbers[j] * shift;
    hat[j] *= cdouble{std::cos(ph), std::sin(ph)};
  }
  return SpectralField(f.grid, fft_inverse(hat));
}

void pad_spectrum(std::span<const cdouble> in, std::span<cdouble> out) {
  const std::size_t n = in.size(), m = out.size();
  if (m < n) throw GridError("padding target smaller than source");
  const double scale = static_cast<double>(m) / static_cast<double>(n);
  std::fill(out.begin(), out.end(), cdouble{});
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < half; ++j) out[j] = in[j] * scale;
  for (std::size_t j = half + 1; j < n; ++j) out[m - n + j] = in[j] * scale;
}

void truncate_spectrum(std::span<const cdouble> in, std::span<cdouble> out) {
  const std::size_t m = in.size(), n = out.size();
  if (m < n) throw GridError("truncation target larger than source");
  const double scale = static_cast<double>(n) / static_cast<double>(m);
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < half; ++j) out[j] = in[j] * scale;
  out[half] = {};
  for (std::size_t j = half + 1; j < n; ++j) out[j] = in[m - n + j] * scale;
}

double integrate(const Grid1D& g, std::span<const double> values) {
  double s = 0;
  for (double v : values) s += v;
  return s * g.spacing();
}

double l2_norm(const SpectralField& f) {
  double s = 0;
  for (const auto& v : f.samples) s += std::norm(v);
  return std::sqrt(s * f.grid->spacing());
}

double l2_norm_spectral(const SpectralField& f) {
  auto hat = fft_forward(f.samples);
  double s = 0;
  for (const auto& v : hat) s += std::norm(v);
  const double n = static_cast<double>(f.grid->count);
  return std::sqrt(s / n * f.grid->spacing());
}

double sup_norm(std::span<const cdouble> v) {
  double m = 0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_norm(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace envjust
