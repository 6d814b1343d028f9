#include "envjust/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "envjust/spectral.hpp"

namespace envjust {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double trapezoid(const Grid1D& g, const std::vector<double>& v) { return integrate(g, v); }

}  // namespace

EnvelopeModel make_envelope_model(const ModelParams& p, const DerivedParams& d, GridPtr xiGrid,
                                  long backgroundMode) {
  EnvelopeModel m;
  m.p = p;
  m.d = d;
  m.grid = std::move(xiGrid);
  m.backgroundMode = backgroundMode;
  const double kappa = m.grid->fundamental() * static_cast<double>(backgroundMode);
  m.steady = solve_steady_state(p, d, kappa);
  m.eta = eval_background(m.steady, m.grid);
  m.c1 = phi_linear_coefficient(m.steady, p, d);
  if (m.c1 > 0) {
    std::ostringstream w;
    w << "linear coefficient g|R|^2 - nu = " << m.c1
      << " is positive; the quadratic part of the energy is indefinite";
    m.warnings.push_back(w.str());
  }
  return m;
}

SpectralField nonlinearity_N(const SpectralField& phi, const SpectralField& eta, double g) {
  SpectralField out(phi.grid);
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const cdouble w = phi.samples[j] + eta.samples[j];
    out.samples[j] = -g * (std::norm(w) - std::norm(eta.samples[j])) * w;
  }
  return out;
}

SpectralField nonlinearity_N_expanded(const SpectralField& phi, const SpectralField& eta, double g) {
  SpectralField out(phi.grid);
  for (std::size_t j = 0; j < phi.size(); ++j) {
    const cdouble f = phi.samples[j], e = eta.samples[j];
    const double f2 = std::norm(f), e2 = std::norm(e);
    const cdouble bracket = f2 * f + 2.0 * f2 * e + e2 * f + e * e * std::conj(f) + f * f * std::conj(e);
    out.samples[j] = -g * bracket;
  }
  return out;
}

NlsSystem phi_system(const EnvelopeModel& m) {
  NlsSystem s;
  s.grid = m.grid;
  s.alpha = m.p.alpha;
  s.shift = m.c1;
  s.g = m.g();
  s.eta = m.eta.samples;
  return s;
}

EnvelopeState step_envelope(const EnvelopeState& s, const EnvelopeModel& m, double dtau) {
  if (!(dtau > 0)) throw std::invalid_argument("dtau must be positive");
  NlsStepper stepper(phi_system(m));
  EnvelopeState out = s;
  stepper.step(out.phi.samples, s.tau, dtau);
  out.tau = s.tau + dtau;
  out.stepSize = dtau;
  return out;
}

double energy(const SpectralField& phi, const EnvelopeModel& m) {
  const Grid1D& g = *phi.grid;
  const SpectralField dphi = spectral_derivative(phi, 1);
  std::vector<double> density(g.count);
  const double half = 0.5 * m.g();
  for (std::size_t j = 0; j < g.count; ++j) {
    const cdouble f = phi.samples[j], e = m.eta.samples[j];
    const double G = std::norm(f + e) - std::norm(e);
    density[j] = std::norm(dphi.samples[j]) - m.c1 * std::norm(f) - half * G * G;
  }
  return trapezoid(g, density);
}

double energy_rhs(const SpectralField& phi, const EnvelopeModel& m) {
  const Grid1D& g = *phi.grid;
  std::vector<double> density(g.count);
  for (std::size_t j = 0; j < g.count; ++j) {
    const cdouble f = phi.samples[j], e = m.eta.samples[j];
    density[j] = (std::norm(f + e) - std::norm(e)) * std::norm(f);
  }
  return 0.5 * m.p.alpha * m.g() * trapezoid(g, density);
}

EnvelopeTrajectory evolve_envelope(const SpectralField& phi0, const EnvelopeModel& m,
                                   const std::vector<double>& outputTimes, double dtau,
                                   const EvolveOptions& opt) {
  if (!(dtau > 0)) throw std::invalid_argument("dtau must be positive");
  if (!std::is_sorted(outputTimes.begin(), outputTimes.end()) ||
      (!outputTimes.empty() && outputTimes.front() < 0))
    throw std::invalid_argument("output times must be non-negative and ascending");
  NlsStepper stepper(phi_system(m));
  stepper.blowUpCeiling = opt.blowUpCeiling;

  EnvelopeTrajectory traj;
  if (opt.smallnessThreshold > 0) traj.aboveSmallness = energy(phi0, m) > opt.smallnessThreshold;
  std::vector<cdouble> u = phi0.samples;
  double tau = 0;
  for (double target : outputTimes) {
    stepper.advance(u, tau, target, dtau);
    tau = target;
    EnvelopeState s{tau, SpectralField(m.grid, u), dtau};
    EnergyRecord r;
    r.tau = tau;
    r.E = energy(s.phi, m);
    r.rhs = energy_rhs(s.phi, m);
    traj.energy.push_back(r);
    traj.snapshots.push_back(std::move(s));
  }
  return traj;
}

namespace {

// First-derivative weights at z for the nodes x (Fornberg's recursion).
std::vector<double> fd_weights(double z, const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1, c4 = x[0] - z;
  c[0][0] = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace

void energy_balance_residual(std::vector<EnergyRecord>& rec, double alpha) {
  const std::size_t n = rec.size();
  if (n < 5) throw std::invalid_argument("energy balance needs at least 5 records");
  const double h = rec[1].tau - rec[0].tau;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (std::fabs((rec[i + 1].tau - rec[i].tau) - h) > 1e-9 * std::max(1.0, std::fabs(h)))
      throw std::invalid_argument("energy records must be uniformly spaced");
  // Up to 9-point stencils (8th order), shifted inwards near the ends.
  const std::size_t m = std::min<std::size_t>(9, n);
  std::vector<double> nodes(m);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i > m / 2 ? i - m / 2 : 0, n - m);
    for (std::size_t j = 0; j < m; ++j) nodes[j] = static_cast<double>(lo + j) - static_cast<double>(i);
    const auto w = fd_weights(0.0, nodes);
    double d = 0;
    for (std::size_t j = 0; j < m; ++j) d += w[j] * rec[lo + j].E;
    d /= h;
    rec[i].dEdtau = d;
    rec[i].balanceResidual = std::fabs(d + alpha * rec[i].E - rec[i].rhs);
  }
}

EnergyDecayVerdict check_energy_decay(const std::vector<EnergyRecord>& records, double alpha,
                                      double C) {
  EnergyDecayVerdict v;
  v.C = C;
  if (records.empty()) return v;
  double scale = 0;
  for (const auto& r : records) scale = std::max(scale, std::fabs(r.E));
  for (const auto& r : records) {
    if (!std::isfinite(r.E)) {
      v.decayHolds = false;
      v.K = std::numeric_limits<double>::infinity();
      return v;
    }
    if (r.E < -1e-12 * std::max(scale, 1e-300)) v.decayHolds = false;
    v.K = std::max(v.K, r.E * std::exp(alpha * r.tau));
  }
  const double E0 = records.front().E;
  v.sharpBoundApplicable = E0 >= 0 && C * std::sqrt(std::max(E0, 0.0)) < 2;
  if (v.sharpBoundApplicable) {
    v.sharpBoundHolds = true;
    for (const auto& r : records) {
      const double e = std::exp(0.5 * alpha * r.tau);
      const double den = C * std::sqrt(E0) * (1 - e) + 2 * e;
      const double bound = 4 * E0 / (den * den);
      if (r.E > bound * (1 + 1e-9) + 1e-14) {
        v.sharpBoundHolds = false;
        v.violations.push_back(r.tau);
      }
    }
  }
  return v;
}

SpectralField gaussian(const GridPtr& grid, double amplitude, double center, double width) {
  SpectralField f(grid);
  for (std::size_t j = 0; j < grid->count; ++j) {
    const double x = grid->x(j) - center;
    f.samples[j] = amplitude * std::exp(-x * x / (2 * width * width));
  }
  return f;
}

double measure_gn_constant(const GridPtr& grid, double g, std::uint64_t seed, int randomFields) {
  // 3|lambda| / (4 omega) = |g| / 2.
  const double scale = std::sqrt(0.5 * std::fabs(g));
  const Grid1D& gr = *grid;
  auto ratio = [&](const SpectralField& f) {
    const SpectralField df = spectral_derivative(f, 1);
    std::vector<double> p4(gr.count), p2(gr.count), d2(gr.count);
    for (std::size_t j = 0; j < gr.count; ++j) {
      const double a = scale * std::abs(f.samples[j]);
      p4[j] = a * a * a * a;
      p2[j] = a * a;
      d2[j] = std::norm(df.samples[j]);
    }
    const double l4 = std::pow(integrate(gr, p4), 0.25);
    const double l2 = std::sqrt(integrate(gr, p2));
    const double dl2 = std::sqrt(integrate(gr, d2));
    if (l2 == 0 || dl2 == 0) return 0.0;
    return l4 / (std::pow(dl2, 0.25) * std::pow(l2, 0.75));
  };

  const double L = gr.length, center = 0.5 * L;
  const double minWidth = 4 * gr.spacing(), maxWidth = L / 12;
  double best = 0;
  for (int i = 0; i <= 8 && minWidth < maxWidth; ++i) {
    const double w = minWidth * std::pow(maxWidth / minWidth, i / 8.0);
    best = std::max(best, ratio(gaussian(grid, 1.0, center, w)));
  }

  std::mt19937_64 rng(seed);
  const int maxMode = 6;
  for (int r = 0; r < randomFields; ++r) {
    const double width = L / 16 + uniform01(rng) * L / 16;
    const double k0 = 2 * std::numbers::pi / width;
    std::vector<cdouble> coef(2 * maxMode + 1);
    for (auto& c : coef) c = {2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1};
    SpectralField f(grid);
    for (std::size_t j = 0; j < gr.count; ++j) {
      const double x = gr.x(j) - center;
      cdouble acc{};
      for (int m = -maxMode; m <= maxMode; ++m)
        acc += coef[m + maxMode] * std::polar(1.0, 0.25 * k0 * m * x);
      f.samples[j] = acc * std::exp(-x * x / (2 * width * width / 4));
    }
    best = std::max(best, ratio(f));
  }
  return best;
}

double smallness_threshold(double C) { return 0.1 * 4.0 / (C * C); }

double amplitude_for_energy(const EnvelopeModel& m, double center, double width, double target) {
  if (!(target > 0)) return 0.0;
  auto E = [&](double a) { return energy(gaussian(m.grid, a, center, width), m); };
  double lo = 0, hi = 1e-3;
  while (E(hi) < target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e6) throw std::runtime_error("could not bracket the requested initial energy");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (E(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SpectralField reconstruct_A(const EnvelopeState& s, const EnvelopeModel& m) {
  SpectralField a(s.phi.grid);
  const cdouble rot = std::polar(1.0, m.p.nu * s.tau);
  for (std::size_t j = 0; j < a.size(); ++j) a.samples[j] = rot * (s.phi.samples[j] + m.eta.samples[j]);
  return a;
}

NlsSystem lle_system(const EnvelopeModel& m) {
  NlsSystem s;
  s.grid = m.grid;
  s.alpha = m.p.alpha;
  s.shift = 0;
  s.g = m.g();
  s.forcing = ModeForcing{-m.backgroundMode, cdouble{-m.p.h / (2 * m.d.omega), 0}, m.p.nu};
  return s;
}

std::vector<SpectralField> solve_lle_direct(const SpectralField& A0, const EnvelopeModel& m,
                                            const std::vector<double>& outputTimes, double dtau) {
  NlsStepper stepper(lle_system(m));
  std::vector<cdouble> u = A0.samples;
  std::vector<SpectralField> out;
  double tau = 0;
  for (double target : outputTimes) {
    stepper.advance(u, tau, target, dtau);
    tau = target;
    out.emplace_back(m.grid, u);
  }
  return out;
}

}  // namespace envjust
