#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "envjust/params.hpp"

namespace envjust {

using cdouble = std::complex<double>;

/// Uniform periodic grid on [0, length).
struct Grid1D {
  double length = 0.0;
  std::size_t count = 0;
  std::vector<double> wavenumbers;  // FFT ordering: 0, 1, ..., N/2-1, -N/2, ..., -1

  double spacing() const { return length / static_cast<double>(count); }
  double x(std::size_t j) const { return spacing() * static_cast<double>(j); }
  double fundamental() const;
  /// Array slot of the Fourier mode with integer index m (m may be negative).
  std::size_t slot(long m) const;
  long mode_index(std::size_t slot) const;
};

using GridPtr = std::shared_ptr<const Grid1D>;

GridPtr make_grid(double length, std::size_t count);

/// Complex samples on a periodic grid.
struct SpectralField {
  GridPtr grid;
  std::vector<cdouble> samples;

  SpectralField() = default;
  explicit SpectralField(GridPtr g) : grid(std::move(g)), samples(grid->count) {}
  SpectralField(GridPtr g, std::vector<cdouble> s);

  std::size_t size() const { return samples.size(); }
};

/// Which slow wavenumber the background carries in carrier coordinates.
enum class BackgroundConvention {
  ScaledCarrier,  // kappa = k / epsilon, i.e. k * c in x units (snapped)
  CarrierLocked,  // kappa = k / (epsilon c), i.e. exactly k in x units
};

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carrier-coordinate grid with the carrier and the background both sitting on
/// exact grid wavenumbers.
struct CarrierGrid {
  GridPtr grid;
  long carrierMode = 0;          // n with k = 2 pi n / L
  long backgroundMode = 0;       // n' with kappa' = 2 pi n' / L
  double backgroundTarget = 0;   // unsnapped x-wavenumber of the background
  double backgroundWavenumber = 0;
  double snapOffset = 0;         // kappa' - target
  double maxWavenumber = 0;      // finest wavenumber the grid was sized for
  BackgroundConvention convention = BackgroundConvention::ScaledCarrier;

  /// x-wavenumber of the drive plane wave: k - kappa'.
  long driveMode() const { return carrierMode - backgroundMode; }
};

struct GridRequest {
  double targetLength = 0;
  int pointsPerWavelength = 8;
  std::size_t maxCount = std::size_t{1} << 20;
  BackgroundConvention convention = BackgroundConvention::ScaledCarrier;
};

CarrierGrid make_commensurate_grid(const ModelParams& p, const DerivedParams& d,
                                   const GridRequest& req);

/// Slow-variable grid that is the image of the carrier grid under
/// xi = epsilon c x: same sample count, length epsilon c L.
GridPtr make_envelope_grid(const CarrierGrid& cg, const ModelParams& p, const DerivedParams& d);

/// Slow background wavenumber on the envelope grid (kappa' / (epsilon c)).
double envelope_background_wavenumber(const CarrierGrid& cg, const ModelParams& p,
                                      const DerivedParams& d);

std::size_t next_pow2(std::size_t n);

}  // namespace envjust
