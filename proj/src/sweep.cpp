#include "envjust/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "envjust/duhamel.hpp"
#include "envjust/kernels.hpp"
#include "envjust/spectral.hpp"

namespace envjust {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sup_of(const std::vector<double>& v) { return sup_norm(std::span<const double>(v)); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  return m;
}

GridRequest grid_request(const SweepConfig& cfg, const DerivedParams& d, double eps) {
  GridRequest req;
  req.targetLength = cfg.slowLength / (eps * d.c);
  req.pointsPerWavelength = cfg.pointsPerWavelength;
  req.maxCount = cfg.maxCount;
  req.convention = cfg.convention;
  return req;
}

struct Trace {
  std::vector<double> error, residual, xnorm, energy;
  std::vector<EnvelopeState> states;
  std::vector<EnergyRecord> energyRecords;
};

// Envelope, ansatz and (unless residualOnly) carrier over the given times.
Trace trace(const RunSetup& s, const SweepConfig& cfg, const std::vector<double>& times, bool withResidual,
            const std::vector<double>& f, const std::vector<double>& g) {
  const double eps = s.p.epsilon;
  std::vector<double> taus;
  for (double t : times) taus.push_back(eps * eps * t);
  EvolveOptions eo;
  eo.smallnessThreshold = s.smallness;
  const EnvelopeTrajectory tr = evolve_envelope(s.phi0, s.model, taus, cfg.dtau, eo);
  const Ansatz an(s.model, s.carrier, cfg.ansatz);

  Trace out;
  out.states = tr.snapshots;
  out.energyRecords = tr.energy;
  std::vector<AnsatzSnapshot> snaps;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const SpectralField A = reconstruct_A(tr.snapshots[i], s.model);
    snaps.push_back(an.build(A, times[i]));
    out.xnorm.push_back(snaps.back().supX + snaps.back().supXt);
    out.energy.push_back(tr.energy[i].E);
    if (withResidual) out.residual.push_back(sup_of(an.residual(tr.snapshots[i], times[i])));
  }
  if (cfg.residualOnly) return out;

  const double e2 = eps * eps, e3 = e2 * eps;
  std::vector<double> u0 = snaps[0].X, ut0 = snaps[0].Xt;
  for (std::size_t j = 0; j < u0.size(); ++j) {
    u0[j] += e2 * f[j];
    ut0[j] += e3 * g[j];
  }
  const auto states = evolve_carrier(u0, ut0, s.carrier, times, s.carrierDt);
  for (std::size_t i = 0; i < times.size(); ++i) out.error.push_back(sup_diff(states[i].u, snaps[i].X));
  return out;
}

}  // namespace

RunSetup make_run_setup(const SweepConfig& cfg, double epsilon) {
  RunSetup s;
  s.p = cfg.model;
  s.p.epsilon = epsilon;
  s.d = derive_params(s.p);
  s.cg = make_commensurate_grid(s.p, s.d, grid_request(cfg, s.d, epsilon));
  s.xiGrid = make_envelope_grid(s.cg, s.p, s.d);
  s.model = make_envelope_model(s.p, s.d, s.xiGrid, s.cg.backgroundMode);
  s.carrier = phi4_system(s.p, s.d, s.cg);
  s.gnConstant = measure_gn_constant(s.xiGrid, s.model.g(), cfg.gnSeed);
  s.smallness = smallness_threshold(s.gnConstant);
  const double center = 0.5 * s.xiGrid->length;
  s.amplitude = cfg.amplitude ? *cfg.amplitude
                              : amplitude_for_energy(s.model, center, cfg.width, cfg.energyFraction * s.smallness);
  s.phi0 = gaussian(s.xiGrid, s.amplitude, center, cfg.width);
  s.E0 = energy(s.phi0, s.model);
  s.carrierDt = (2 * std::numbers::pi / (3 * s.d.omega)) / cfg.carrierDtDivisor;
  return s;
}

std::vector<double> sample_times(double tEnd, int n) {
  std::vector<double> t{0.0};
  if (n < 2) return t;
  const double lo = std::log(tEnd / 100), hi = std::log(tEnd);
  for (int i = 0; i < n - 1; ++i) {
    const double f = n == 2 ? 1.0 : static_cast<double>(i) / (n - 2);
    t.push_back(i == n - 2 ? tEnd : std::exp(lo + f * (hi - lo)));
  }
  return t;
}

std::vector<double> band_limited_field(const Grid1D& grid, std::uint64_t seed, double kMax, int modes) {
  std::mt19937_64 rng(seed);
  const long maxMode = std::max(1L, static_cast<long>(std::floor(kMax / grid.fundamental())));
  std::vector<double> out(grid.count, 0.0);
  for (int m = 0; m < modes; ++m) {
    const long n = 1 + static_cast<long>(unit_uniform(rng) * static_cast<double>(maxMode));
    const double a = unit_uniform(rng) * 2 - 1;
    const double ph = 2 * std::numbers::pi * unit_uniform(rng);
    const double K = grid.fundamental() * static_cast<double>(std::min(n, maxMode));
    for (std::size_t j = 0; j < grid.count; ++j) out[j] += a * std::cos(K * grid.x(j) + ph);
  }
  const double s = sup_of(out);
  if (s > 0)
    for (double& v : out) v /= s;
  return out;
}

GronwallVerdict check_gronwall_tube(const GronwallInputs& in, const std::vector<double>& times,
                                    const std::vector<double>& yNorm) {
  GronwallVerdict v;
  const double e = in.epsilon, lam = std::fabs(in.lambda), m = in.kernelFreq;
  v.M = 0.5 * lam * (std::pow(e, 4) * std::pow(in.D, 3) + std::pow(e, 3) * in.CX * in.D * in.D);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double a = (1 + in.alphaHat * t + e * t + 0.5 * m * m * t * t) * in.C0 + 0.5 * e * e * t * t * in.CR +
                     e * e * v.M * t * t;
    const double tube = a * std::exp(0.5 * lam * in.CX * in.CX * e * e * t * t);
    v.tube.push_back(tube);
    if (yNorm[i] > tube * (1 + 1e-12) && v.holds) {
      v.holds = false;
      v.firstViolation = static_cast<int>(i);
      v.firstViolationTime = t;
    }
  }
  return v;
}

double estimate_cost(const SweepConfig& cfg) {
  double total = 0;
  for (double eps : cfg.epsilons) {
    ModelParams p = cfg.model;
    p.epsilon = eps;
    const DerivedParams d = compute_derived(p);
    const CarrierGrid cg = make_commensurate_grid(p, d, grid_request(cfg, d, eps));
    const double N = static_cast<double>(cg.grid->count);
    const double unit = N * std::log2(N);
    const double tEnd = cfg.T0 / eps;
    const double carrierSteps = cfg.residualOnly ? 0 : tEnd / ((2 * std::numbers::pi / (3 * d.omega)) / cfg.carrierDtDivisor);
    const double envSteps = eps * eps * tEnd / cfg.dtau;
    const double residualEvals = cfg.samples * (cfg.ansatz.secondDerivative == SecondDerivative::Analytic ? 6.0 : 24.0);
    const double passes = cfg.refineCheck && !cfg.residualOnly ? 3.0 : 1.0;  // 64 + 128 samples
    total += passes * unit * (4 * carrierSteps + 4 * envSteps + residualEvals);
  }
  return total;
}

RunRecord run_single(const SweepConfig& cfg, double epsilon, std::size_t index) {
  RunRecord r;
  r.epsilon = epsilon;
  try {
    const RunSetup s = make_run_setup(cfg, epsilon);
    r.derived = s.d;
    r.gridCount = s.cg.grid->count;
    r.carrierLength = s.cg.grid->length;
    r.slowLength = s.xiGrid->length;
    r.carrierMode = s.cg.carrierMode;
    r.backgroundMode = s.cg.backgroundMode;
    r.snapOffset = s.cg.snapOffset;
    r.gnConstant = s.gnConstant;
    r.smallness = s.smallness;
    r.amplitude = s.amplitude;
    r.E0 = s.E0;
    r.carrierDt = s.carrierDt;
    r.envelopeDtau = cfg.dtau;
    r.warnings = s.model.warnings;
    if (s.E0 > s.smallness) r.warnings.push_back("initial energy is above the smallness threshold");

    const std::uint64_t base = cfg.seed * 1000003ULL + 2 * index;
    std::vector<double> f = band_limited_field(*s.cg.grid, base), g = band_limited_field(*s.cg.grid, base + 1);
    for (double& v : f) v *= cfg.C0;
    for (double& v : g) v *= cfg.C0;

    const double tEnd = cfg.T0 / epsilon;
    r.times = sample_times(tEnd, cfg.samples);
    const Trace tr = trace(s, cfg, r.times, true, f, g);
    r.residual = tr.residual;
    r.xnorm = tr.xnorm;
    r.energy = tr.energy;
    r.error = tr.error;

    const double e2 = epsilon * epsilon, e4 = e2 * e2;
    r.supResidual = sup_of(r.residual);
    r.CR = r.supResidual / e4;
    r.CX = sup_of(r.xnorm) / epsilon;
    const EnergyDecayVerdict ev = check_energy_decay(tr.energyRecords, s.p.alpha, s.gnConstant);
    r.K = ev.K;
    r.energyDecay = ev.decayHolds;

    if (!cfg.residualOnly) {
      r.supError = sup_of(r.error);
      r.D = r.supError / e2;
      std::vector<double> y;
      for (double e : r.error) y.push_back(e / e2);
      r.gronwallInputs = {epsilon, s.d.alphaHat, s.p.lambda, kernel_freq_dimensional(s.p.gamma, s.d.alphaHat),
                          cfg.C0, r.CR, r.CX, r.D};
      r.gronwall = check_gronwall_tube(r.gronwallInputs, r.times, y);

      if (cfg.refineCheck) {
        const Trace fine = trace(s, cfg, sample_times(tEnd, 2 * cfg.samples), false, f, g);
        r.refinedSupError = sup_of(fine.error);
        r.refineChange = r.refinedSupError > 0 ? std::fabs(r.refinedSupError - r.supError) / r.refinedSupError : 0.0;
        r.refineOk = r.refineChange < 0.02;
      }
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.failure = e.what();
  }
  return r;
}

bool ScalingReport::all_pass() const {
  return !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

void assess(ScalingReport& rep, const SweepConfig& cfg) {
  rep.verdicts.clear();
  rep.errorFit.reset();
  rep.residualFit.reset();
  rep.DRatio = 0;
  auto fmt = [](double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
  };

  std::vector<const RunRecord*> ok;
  std::string failed;
  for (const auto& r : rep.perEps) {
    if (r.ok)
      ok.push_back(&r);
    else
      failed += " eps=" + fmt(r.epsilon) + ": " + r.failure + ";";
  }
  rep.verdicts.push_back({"runs_complete", failed.empty(), failed.empty() ? "all runs completed" : failed});

  std::vector<std::pair<double, double>> res, err;
  for (const auto* r : ok) {
    if (r->supResidual > 0) res.emplace_back(r->epsilon, r->supResidual);
    if (!cfg.residualOnly && r->supError > 0) err.emplace_back(r->epsilon, r->supError);
  }

  const double rlo = cfg.ansatz.thirdHarmonic ? 3.6 : 2.6, rhi = cfg.ansatz.thirdHarmonic ? 4.4 : 3.4;
  try {
    rep.residualFit = fit_power_law(res);
    const double s = rep.residualFit->slope;
    rep.verdicts.push_back({"residual_slope", s >= rlo && s <= rhi,
                            "slope " + fmt(s) + " expected in [" + fmt(rlo) + ", " + fmt(rhi) + "]"});
  } catch (const FitError& e) {
    rep.verdicts.push_back({"residual_slope", false, std::string("incomplete fit: ") + e.what()});
  }

  bool decay = true;
  for (const auto* r : ok) decay = decay && r->energyDecay;
  rep.verdicts.push_back({"energy_decay", decay && !ok.empty(), decay ? "E <= K exp(-alpha tau) on all runs" : "decay bound violated"});

  if (cfg.residualOnly) return;

  try {
    rep.errorFit = fit_power_law(err);
    const double s = rep.errorFit->slope;
    rep.verdicts.push_back({"error_slope", s >= 1.7 && s <= 2.6, "slope " + fmt(s) + " expected in [1.7, 2.6]"});
  } catch (const FitError& e) {
    rep.verdicts.push_back({"error_slope", false, std::string("incomplete fit: ") + e.what()});
  }

  if (ok.size() >= 2) {
    const double d1 = ok[ok.size() - 1]->D, d2 = ok[ok.size() - 2]->D;
    rep.DRatio = std::max(d1, d2) / std::min(d1, d2);
    rep.verdicts.push_back({"D_stable", rep.DRatio <= 2.0, "D ratio over the two smallest eps " + fmt(rep.DRatio)});
  } else {
    rep.verdicts.push_back({"D_stable", false, "fewer than two completed runs"});
  }

  bool tube = !ok.empty();
  std::string where;
  for (const auto* r : ok)
    if (!r->gronwall.holds) {
      tube = false;
      where += " eps=" + fmt(r->epsilon) + " first at t=" + fmt(r->gronwall.firstViolationTime) + ";";
    }
  rep.verdicts.push_back({"gronwall_tube", tube, tube ? "tube holds at all sample times" : "violated:" + where});

  if (cfg.refineCheck) {
    bool refine = !ok.empty();
    double worst = 0;
    for (const auto* r : ok) {
      refine = refine && r->refineOk;
      worst = std::max(worst, r->refineChange);
    }
    rep.verdicts.push_back({"sample_refinement", refine, "max relative change " + fmt(worst) + " (limit 0.02)"});
  }
}

ScalingReport run_justification_sweep(const RunConfig& rc) {
  const SweepConfig& cfg = rc.sweep;
  const auto problems = validate_sweep_config(cfg);
  if (!problems.empty()) throw ConfigError("invalid sweep configuration: " + problems.front());
  const double cost = estimate_cost(cfg);
  if (cost > rc.budget) {
    std::ostringstream o;
    o << "estimated cost " << cost << " exceeds the budget " << rc.budget;
    throw BudgetExceeded(o.str(), cost);
  }

  ScalingReport rep;
  rep.perEps.resize(cfg.epsilons.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.epsilons.size();)
      rep.perEps[i] = run_single(cfg, cfg.epsilons[i], i);
  };
  const unsigned w = std::max(1u, std::min<unsigned>(rc.workers, static_cast<unsigned>(cfg.epsilons.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < w; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  assess(rep, cfg);
  rep.metadata.config = to_ini(rc);
  rep.metadata.isa = kernels::isa_name(kernels::active_isa());
  rep.metadata.workers = rc.workers;
  rep.metadata.budget = rc.budget;
  rep.metadata.estimatedCost = cost;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  rep.metadata.timestamp = buf;
  return rep;
}

}  // namespace envjust

namespace envjust {

bool OracleReport::all_pass() const {
  return !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

OracleReport run_oracle(const RunConfig& rc) {
  const OracleConfig& oc = rc.oracle;
  const ModelParams p = rc.sweep.model;
  const DerivedParams d = derive_params(p);
  const double eps = p.epsilon, X0 = oc.X0;
  OracleReport rep;

  ModelParams cp = p;
  cp.gamma = oc.calibGamma;
  cp.epsilon = oc.calibEpsilon;
  cp.alpha = oc.calibAlpha;
  rep.calibration = validate_kernel(cp, oc.T);
  rep.calibrationModel = validate_kernel(p, oc.T);

  PicardProblem prob;
  prob.kp = make_kernel_params(p, d);
  prob.kp.tol = oc.quadTol;
  rep.kernelFreq = prob.kp.kernelFreq;
  prob.lambda = p.lambda;
  prob.f = {[](double x) { return std::exp(-x * x); }, 1.0};
  prob.g = {[](double x) { return x * std::exp(-0.5 * x * x); }, std::exp(-0.5)};
  prob.X = [X0](double, double) { return X0; };
  prob.Res = [eps](double s, double x) { return eps * eps * std::sin(s) * std::exp(-0.5 * x * x); };
  prob.linear = true;
  prob.T = oc.T;
  prob.dt = oc.dt;
  prob.dx = oc.dx;
  prob.tol = oc.tol;
  prob.workers = rc.workers;
  const int half = static_cast<int>(std::lround(oc.halfWidth / oc.outputSpacing));
  for (int i = -half; i <= half; ++i) prob.xOut.push_back(i * oc.outputSpacing);
  rep.picard = picard_solve_error(prob);

  // Spectral reference on a centred periodic domain; output points are grid points.
  const double spacing = oc.outputSpacing / 4;
  const std::size_t N = 1024;
  const double L = spacing * static_cast<double>(N);
  const GridPtr grid = make_grid(L, N);
  auto xp = [&](std::size_t j) { return grid->x(j) - 0.5 * L; };
  CarrierSystem sys;
  sys.grid = grid;
  sys.damping = eps * eps * p.alpha;
  sys.beta = p.beta;
  sys.gamma = p.gamma - 3 * p.lambda * X0 * X0;
  sys.source = [&](double t, std::span<double> out) {
    for (std::size_t j = 0; j < N; ++j) out[j] = -prob.Res(t, xp(j)) / (eps * eps);
  };
  std::vector<double> u0(N), ut0(N);
  for (std::size_t j = 0; j < N; ++j) {
    u0[j] = prob.f.eval(xp(j));
    ut0[j] = eps * prob.g.eval(xp(j));
  }
  const auto states = evolve_carrier(u0, ut0, sys, rep.picard.times, 1e-3);
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::vector<double> row;
    for (int o = -half; o <= half; ++o) {
      const std::size_t j = N / 2 + static_cast<std::size_t>(4 * o);
      row.push_back(states[i].u[j]);
      rep.mismatch = std::max(rep.mismatch, std::fabs(states[i].u[j] - rep.picard.y[i][row.size() - 1]));
    }
    rep.spectral.push_back(std::move(row));
  }

  auto fmt = [](double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
  };
  rep.verdicts.push_back({"picard_converged", rep.picard.converged,
                          std::to_string(rep.picard.iterations) + " iterations, final defect " +
                              fmt(rep.picard.finalDefect)});
  rep.verdicts.push_back({"oracle_matches_spectral", rep.mismatch <= 1e-4,
                          "sup mismatch " + fmt(rep.mismatch) + " (limit 1e-4)"});
  const auto& sel = rep.calibration.candidates[rep.calibration.selected];
  rep.verdicts.push_back({"kernel_calibration", sel.mismatch <= 1e-4,
                          "selected " + sel.name + " with mismatch " + fmt(sel.mismatch) +
                              "; alternative form mismatch " + fmt(rep.calibration.alternativeMismatch)});
  return rep;
}

}  // namespace envjust
