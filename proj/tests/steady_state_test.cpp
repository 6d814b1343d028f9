#include <doctest.h>

#include <cmath>

#include "checks.hpp"
#include "envjust/spectral.hpp"
#include "envjust/steady_state.hpp"

using namespace envjust;

namespace {

ModelParams reference_params() {
  // omega = 1 (k = 0), kappa^2 + nu = 0 below.
  ModelParams p;
  p.k = 0;
  p.nu = 0;
  return p;
}

}  // namespace

TEST_CASE("zero drive gives the trivial background") {
  ModelParams p;
  p.h = 0;
  const DerivedParams d = derive_params(p);
  const SteadyState s = solve_steady_state(p, d, d.kappa);
  CHECK(s.r == 0.0);
  CHECK(std::abs(s.R) == 0.0);
  CHECK(steady_lle_residual(s, p, d) == 0.0);
  const SpectralField eta = eval_background(s, make_grid(10, 32));
  CHECK(sup_norm(std::span<const cdouble>(eta.samples)) == 0.0);
}

TEST_CASE("reference cubic against bisection") {
  const ModelParams p = reference_params();
  const DerivedParams d = derive_params(p);
  CHECK(d.omega == 1.0);
  const SteadyState s = solve_steady_state(p, d, 0.0);
  REQUIRE(s.allRealRoots.size() == 1);
  // (9/4) r^3 + (1/4) r - 0.0025 = 0 on [0, 1].
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((2.25 * mid * mid * mid + 0.25 * mid - 0.0025) > 0 ? hi : lo) = mid;
  }
  CHECK(std::fabs(s.r - lo) <= 1e-12 * lo);
  const cdouble R = -0.05 / cdouble(-1.5 * s.r, 0.5);
  CHECK(std::abs(s.R - R) < 1e-14);
  CHECK(std::fabs(std::norm(s.R) - s.r) < 1e-10 * s.r);
  CHECK(steady_lle_residual(s, p, d) < 1e-12);
}

TEST_CASE("weak nonlinearity limit is linear response") {
  ModelParams p;
  p.lambda = -1e-9;
  const DerivedParams d = derive_params(p);
  const SteadyState s = solve_modulus_cubic(p, d, d.kappa);
  const double sk = d.kappa * d.kappa + p.nu;
  const double lin = (p.h * p.h / (4 * d.omega * d.omega)) / (p.alpha * p.alpha / 4 + sk * sk);
  CHECK(s.r == doctest::Approx(lin).epsilon(1e-6));
}

TEST_CASE("real cubic roots") {
  auto roots = real_cubic_roots({1, -6, 11, -6});
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(1).epsilon(1e-14));
  CHECK(roots[1] == doctest::Approx(2).epsilon(1e-14));
  CHECK(roots[2] == doctest::Approx(3).epsilon(1e-14));
  roots = real_cubic_roots({0, 1, -3, 2});
  REQUIRE(roots.size() == 2);
  roots = real_cubic_roots({1, 0, 1, -2});
  REQUIRE(roots.size() == 1);
  CHECK(roots[0] == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("random parameter sets have one root matching bisection") {
  const auto sweep = checks::random_steady_sweep(1000, 12345);
  CHECK(sweep.sets == 1000);
  CHECK(sweep.rootCountFailures == 0);
  CHECK(sweep.worstRootRel < 1e-12);
  CHECK(sweep.worstResidual < 1e-10);
}

TEST_CASE("background field") {
  ModelParams p;
  const DerivedParams d = derive_params(p);
  const GridPtr g = make_grid(40, 256);
  const long mode = 5;
  const double kappa = g->fundamental() * mode;
  const SteadyState s = solve_steady_state(p, d, kappa);
  const SpectralField eta = eval_background(s, g);
  double worst = 0;
  for (const auto& v : eta.samples) worst = std::max(worst, std::fabs(std::abs(v) - std::abs(s.R)));
  CHECK(worst < 1e-14);
  const auto hat = fft_forward(std::span<const cdouble>(eta.samples));
  for (std::size_t j = 0; j < hat.size(); ++j) {
    if (g->mode_index(j) == -mode) CHECK(std::abs(hat[j]) > 0.5 * std::abs(s.R));
    else CHECK(std::abs(hat[j]) < 1e-12);
  }
  // On-grid residual with the same wavenumber is at rounding level.
  CHECK(steady_lle_residual_on_grid(s, g, kappa, p, d) < 1e-12);
}

TEST_CASE("snapping error is proportional to the offset") {
  ModelParams p;
  p.epsilon = 0.07;
  const DerivedParams d = derive_params(p);
  const SteadyState s = solve_steady_state(p, d, d.kappa);
  std::vector<double> ratios;
  for (int n : {10, 13, 17, 23}) {
    const GridPtr g = make_grid(2 * M_PI * n, 4096);
    const double k0 = g->fundamental();
    const double snapped = k0 * std::round(d.kappa / k0);
    const double offset = std::fabs(snapped - d.kappa);
    if (offset < 1e-3) continue;
    ratios.push_back(steady_lle_residual_on_grid(s, g, snapped, p, d) / offset);
  }
  REQUIRE(ratios.size() >= 2);
  for (double r : ratios) CHECK(r == doctest::Approx(ratios.front()).epsilon(0.05));
  MESSAGE("residual per unit snap offset " << ratios.front());
}
