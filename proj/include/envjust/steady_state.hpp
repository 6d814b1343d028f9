#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "envjust/grid.hpp"
#include "envjust/params.hpp"

namespace envjust {

/// Plane-wave background of the envelope equation, A_p = R exp(-i(kappa xi - nu tau)).
struct SteadyState {
  double kappa = 0;                 // slow wavenumber used in the cubic
  double r = 0;                     // |R|^2
  cdouble R{};
  std::vector<double> allRealRoots;
  double cubicResidual = 0;         // |P(r)| / max |coefficient|
};

class SteadyStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficients {c3, c2, c1, c0} of the cubic in r = |R|^2.
std::array<double, 4> modulus_cubic_coefficients(const ModelParams& p, const DerivedParams& d,
                                                 double kappa);

/// All real roots of c3 r^3 + c2 r^2 + c1 r + c0 (closed form, then Newton
/// polishing in extended precision), ascending. Degree drops when c3 = 0.
std::vector<double> real_cubic_roots(const std::array<double, 4>& c);

/// Fills r and allRealRoots. Throws SteadyStateError unless exactly one real
/// root exists and it is non-negative.
SteadyState solve_modulus_cubic(const ModelParams& p, const DerivedParams& d, double kappa);

/// Fills R from r. Throws SteadyStateError on a vanishing denominator.
SteadyState compute_R(SteadyState s, const ModelParams& p, const DerivedParams& d);

/// Both steps.
SteadyState solve_steady_state(const ModelParams& p, const DerivedParams& d, double kappa);

/// eta(xi) = R exp(-i kappa xi) on the slow grid.
SpectralField eval_background(const SteadyState& s, const GridPtr& xiGrid);

/// Sup-norm of i A_tau + A_xixi + (i alpha/2) A + g|A|^2 A - F at A = A_p,
/// evaluated in closed form (no grid).
double steady_lle_residual(const SteadyState& s, const ModelParams& p, const DerivedParams& d);

/// Same residual on a grid: A_p and F carry the wavenumber kappaGrid, the
/// amplitude R comes from s, and A_xixi is taken spectrally.
double steady_lle_residual_on_grid(const SteadyState& s, const GridPtr& xiGrid, double kappaGrid,
                                   const ModelParams& p, const DerivedParams& d, double tau = 0);

/// Coefficient g|R|^2 - nu of the linear term of the phi-equation. The energy
/// is non-negative for small data only when this is <= 0.
double phi_linear_coefficient(const SteadyState& s, const ModelParams& p, const DerivedParams& d);

}  // namespace envjust
