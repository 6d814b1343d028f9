#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "envjust/ansatz.hpp"
#include "envjust/config.hpp"
#include "envjust/spectral.hpp"
#include "envjust/steady_state.hpp"
#include "envjust/sweep.hpp"

namespace envjust::checks {

namespace {

double sup_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  return m;
}

}  // namespace

double bisect_modulus(const ModelParams& p, const DerivedParams& d, double kappa) {
  using ld = long double;
  const ld g = d.nlsCubic, s = ld(kappa) * kappa + p.nu, a2 = ld(p.alpha) * p.alpha / 4;
  const ld H = ld(p.h) * p.h / (4 * ld(d.omega) * d.omega);
  if (H == 0) return 0;
  auto f = [&](ld r) { return r * ((g * r - s) * (g * r - s) + a2) - H; };
  ld lo = 0, hi = H / a2;
  for (int i = 0; i < 400 && hi - lo > 1e-19L * hi; ++i) {
    const ld mid = 0.5L * (lo + hi);
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

ModelParams random_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  ModelParams p;
  do {
    p.alpha = u(0.05, 3);
    p.beta = u(0.1, 3);
    p.gamma = u(0.1, 3);
    p.lambda = -u(0.05, 3);
    p.epsilon = u(0.02, 0.5);
    p.h = u(0.001, 2);
    p.nu = u(0, 3);
    p.k = u(0, 3);
  } while (!validate_params(p).empty());
  return p;
}

SteadySweep random_steady_sweep(int n, std::uint64_t seed) {
  SteadySweep out;
  for (int i = 0; i < n; ++i) {
    const ModelParams p = random_params(seed + static_cast<std::uint64_t>(i));
    const DerivedParams d = derive_params(p);
    ++out.sets;
    try {
      const SteadyState s = solve_steady_state(p, d, d.kappa);
      if (s.allRealRoots.size() != 1) {
        ++out.rootCountFailures;
        if (out.firstFailure.empty()) out.firstFailure = "set " + std::to_string(i) + ": several real roots";
      }
      const double ref = bisect_modulus(p, d, d.kappa);
      out.worstRootRel = std::max(out.worstRootRel, std::fabs(s.r - ref) / std::max(ref, 1e-300));
      out.worstResidual = std::max(out.worstResidual, steady_lle_residual(s, p, d));
    } catch (const std::exception& e) {
      ++out.rootCountFailures;
      if (out.firstFailure.empty()) out.firstFailure = "set " + std::to_string(i) + ": " + e.what();
    }
  }
  return out;
}

EnvelopeModel small_model(const ModelParams& p, double length, std::size_t count, long backgroundMode) {
  return make_envelope_model(p, compute_derived(p), make_grid(length, count), backgroundMode);
}

SpectralField gaussian_bump(const EnvelopeModel& m, double amplitude, double width) {
  return gaussian(m.grid, amplitude, 0.5 * m.grid->length, width);
}

Conservation energy_conservation(double tauEnd, double dtau) {
  ModelParams p;
  p.alpha = 0;
  const EnvelopeModel m = small_model(p, 40, 256, 3);
  const SpectralField phi0 = gaussian_bump(m, 0.3, 2);
  std::vector<double> taus;
  for (int i = 0; i <= 100; ++i) taus.push_back(tauEnd * i / 100);
  const auto tr = evolve_envelope(phi0, m, taus, dtau);
  Conservation c;
  const double E0 = tr.energy.front().E;
  for (const auto& r : tr.energy) c.drift = std::max(c.drift, std::fabs(r.E - E0) / std::fabs(E0));
  return c;
}

DecayCheck energy_decay(double tauEnd, double dtau) {
  ModelParams p;
  const EnvelopeModel m = small_model(p, 40, 256, 3);
  const double C = measure_gn_constant(m.grid, m.g(), 7);
  const double target = 0.5 * smallness_threshold(C);
  const SpectralField phi0 = gaussian(m.grid, amplitude_for_energy(m, 20, 2, target), 20, 2);
  std::vector<double> taus;
  for (int i = 0; i <= 200; ++i) taus.push_back(tauEnd * i / 200);
  const auto tr = evolve_envelope(phi0, m, taus, dtau);
  const EnergyDecayVerdict v = check_energy_decay(tr.energy, p.alpha, C);
  return {v.K, v.decayHolds && std::isfinite(v.K), tr.energy.front().E};
}

BalanceStudy balance_refinement(double dtau) {
  ModelParams p;
  const EnvelopeModel m = small_model(p, 40, 256, 3);
  const SpectralField phi0 = gaussian_bump(m, 0.3, 2);
  std::vector<double> taus;
  for (int i = 0; i <= 100; ++i) taus.push_back(0.01 * i);
  BalanceStudy b;
  for (int r = 0; r < 3; ++r) {
    auto tr = evolve_envelope(phi0, m, taus, dtau / (1 << r));
    energy_balance_residual(tr.energy, p.alpha);
    for (const auto& e : tr.energy) b.residual[r] = std::max(b.residual[r], e.balanceResidual);
  }
  b.order01 = std::log2(b.residual[0] / b.residual[1]);
  b.order12 = std::log2(b.residual[1] / b.residual[2]);
  return b;
}

double decomposition_mismatch(double epsilon, double tauEnd, double dtau) {
  SweepConfig cfg;
  const RunSetup s = make_run_setup(cfg, epsilon);
  const auto tr = evolve_envelope(s.phi0, s.model, {tauEnd}, dtau);
  const SpectralField viaPhi = reconstruct_A(tr.snapshots.back(), s.model);
  SpectralField A0(s.xiGrid);
  for (std::size_t j = 0; j < A0.size(); ++j) A0.samples[j] = s.phi0.samples[j] + s.model.eta.samples[j];
  const auto direct = solve_lle_direct(A0, s.model, {tauEnd}, dtau);
  return sup_diff(direct.back().samples, viaPhi.samples);
}

double envelope_order(double dtau) {
  SweepConfig cfg;
  const RunSetup s = make_run_setup(cfg, 0.1);
  std::vector<cdouble> u[3];
  for (int r = 0; r < 3; ++r) u[r] = evolve_envelope(s.phi0, s.model, {1.0}, dtau / (1 << r)).snapshots.back().phi.samples;
  return std::log2(sup_diff(u[0], u[1]) / sup_diff(u[1], u[2]));
}

double carrier_order(double epsilon, double divisor) {
  SweepConfig cfg;
  const RunSetup s = make_run_setup(cfg, epsilon);
  const auto tr = evolve_envelope(s.phi0, s.model, {0.0}, cfg.dtau);
  const Ansatz an(s.model, s.carrier, cfg.ansatz);
  const AnsatzSnapshot x0 = an.build(reconstruct_A(tr.snapshots[0], s.model), 0.0);
  const double period = 2 * std::numbers::pi / s.d.omega, tEnd = 1.0 / epsilon;
  std::vector<double> u[3];
  for (int r = 0; r < 3; ++r) u[r] = evolve_carrier(x0.X, x0.Xt, s.carrier, {tEnd}, period / (divisor * (1 << r))).back().u;
  return std::log2(sup_diff(u[0], u[1]) / sup_diff(u[1], u[2]));
}

double spectral_derivative_error() {
  const double L = 12.0, k0 = 2 * std::numbers::pi / L;
  const GridPtr g = make_grid(L, 256);
  SpectralField f(g);
  std::vector<cdouble> d1(g->count), d2(g->count);
  const int modes[] = {1, 7, 30, 90, 127};
  const double amps[] = {1.0, -0.4, 0.3, 0.2, 0.05};
  for (std::size_t j = 0; j < g->count; ++j) {
    const double x = g->x(j);
    for (int i = 0; i < 5; ++i) {
      const double q = modes[i] * k0;
      f.samples[j] += amps[i] * std::polar(1.0, q * x);
      d1[j] += amps[i] * cdouble(0, q) * std::polar(1.0, q * x);
      d2[j] += -amps[i] * q * q * std::polar(1.0, q * x);
    }
  }
  const SpectralField s1 = spectral_derivative(f, 1), s2 = spectral_derivative(f, 2);
  const double n1 = sup_norm(std::span<const cdouble>(d1)), n2 = sup_norm(std::span<const cdouble>(d2));
  return std::max(sup_diff(s1.samples, d1) / n1, sup_diff(s2.samples, d2) / n2);
}

}  // namespace envjust::checks
