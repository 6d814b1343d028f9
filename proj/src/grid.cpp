#include "envjust/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace envjust {

double Grid1D::fundamental() const { return 2 * std::numbers::pi / length; }

std::size_t Grid1D::slot(long m) const {
  const long n = static_cast<long>(count);
  long s = m % n;
  if (s < 0) s += n;
  return static_cast<std::size_t>(s);
}

long Grid1D::mode_index(std::size_t s) const {
  const long n = static_cast<long>(count);
  const long m = static_cast<long>(s);
  return m < n / 2 ? m : m - n;
}

GridPtr make_grid(double length, std::size_t count) {
  if (!(length > 0) || count < 2 || (count & (count - 1)) != 0)
    throw GridError("grid needs positive length and a power-of-two sample count");
  auto g = std::make_shared<Grid1D>();
  g->length = length;
  g->count = count;
  g->wavenumbers.resize(count);
  const double k0 = g->fundamental();
  for (std::size_t j = 0; j < count; ++j)
    g->wavenumbers[j] = k0 * static_cast<double>(g->mode_index(j));
  return g;
}

SpectralField::SpectralField(GridPtr g, std::vector<cdouble> s)
    : grid(std::move(g)), samples(std::move(s)) {
  if (samples.size() != grid->count)
    throw GridError("field length does not match grid count");
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

CarrierGrid make_commensurate_grid(const ModelParams& p, const DerivedParams& d,
                                   const GridRequest& req) {
  if (!(req.targetLength > 0)) throw GridError("target length must be positive");
  if (req.pointsPerWavelength < 2) throw GridError("need at least 2 points per wavelength");
  const double twoPi = 2 * std::numbers::pi;

  CarrierGrid cg;
  cg.convention = req.convention;
  double length = req.targetLength;
  if (p.k > 0) {
    cg.carrierMode = std::max(1L, std::lround(p.k * req.targetLength / twoPi));
    length = twoPi * static_cast<double>(cg.carrierMode) / p.k;
  }
  const double k0 = twoPi / length;

  cg.backgroundTarget =
      req.convention == BackgroundConvention::ScaledCarrier ? p.k * d.c : p.k;
  cg.backgroundMode = std::lround(cg.backgroundTarget / k0);
  if (req.convention == BackgroundConvention::CarrierLocked) cg.backgroundMode = cg.carrierMode;
  cg.backgroundWavenumber = k0 * static_cast<double>(cg.backgroundMode);
  cg.snapOffset = cg.backgroundWavenumber - cg.backgroundTarget;

  const double driveWavenumber = std::abs(k0 * static_cast<double>(cg.driveMode()));
  cg.maxWavenumber = std::max({3 * p.k, std::abs(cg.backgroundWavenumber), 3 * driveWavenumber});
  if (cg.maxWavenumber == 0) cg.maxWavenumber = k0;

  const double needed = req.pointsPerWavelength * cg.maxWavenumber * length / twoPi;
  const std::size_t count = next_pow2(static_cast<std::size_t>(std::ceil(needed - 1e-9)));
  if (count > req.maxCount)
    throw GridError("grid needs " + std::to_string(count) + " points, above the limit of " +
                    std::to_string(req.maxCount));
  cg.grid = make_grid(length, std::max<std::size_t>(count, 16));
  return cg;
}

GridPtr make_envelope_grid(const CarrierGrid& cg, const ModelParams& p, const DerivedParams& d) {
  return make_grid(p.epsilon * d.c * cg.grid->length, cg.grid->count);
}

double envelope_background_wavenumber(const CarrierGrid& cg, const ModelParams& p,
                                      const DerivedParams& d) {
  return cg.backgroundWavenumber / (p.epsilon * d.c);
}

}  // namespace envjust
