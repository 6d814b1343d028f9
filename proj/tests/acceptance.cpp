// Runs every acceptance check at default settings and prints one PASS/FAIL
// line per criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "checks.hpp"
#include "envjust/config.hpp"
#include "envjust/kernels.hpp"
#include "envjust/sweep.hpp"

using namespace envjust;

namespace {

int failures = 0;

std::string num(double v) {
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

const Verdict* find(const ScalingReport& r, const std::string& name) {
  for (const auto& v : r.verdicts)
    if (v.name == name) return &v;
  return nullptr;
}

bool passed(const ScalingReport& r, const std::string& name) {
  const Verdict* v = find(r, name);
  return v && v->pass;
}

void verdict(int id, const char* title, bool ok, const std::string& detail, double seconds) {
  if (!ok) ++failures;
  std::printf("%s  %d. %s: %s [%.1fs]\n", ok ? "PASS" : "FAIL", id, title, detail.c_str(), seconds);
  std::fflush(stdout);
}

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

int main() {
  std::printf("kernels: %s\n", std::string(kernels::isa_name(kernels::active_isa())).c_str());
  Stopwatch sw;

  {
    const auto s = checks::random_steady_sweep(1000, 20260915);
    const bool ok = s.rootCountFailures == 0 && s.worstRootRel < 1e-12 && s.worstResidual < 1e-10;
    verdict(1, "steady state", ok,
            std::to_string(s.sets) + " sets, " + std::to_string(s.rootCountFailures) + " root-count failures, root rel " +
                num(s.worstRootRel) + ", residual " + num(s.worstResidual) +
                (s.firstFailure.empty() ? "" : ", first failure: " + s.firstFailure),
            sw.lap());
  }

  RunConfig rc;  // default physics, eps 0.2 .. 0.05, T0 = 1, C0 = 0
  const ScalingReport main = run_justification_sweep(rc);
  const double sweepSeconds = sw.lap();

  {
    RunConfig plain = rc;
    plain.sweep.ansatz.thirdHarmonic = false;
    plain.sweep.residualOnly = true;
    const ScalingReport bare = run_justification_sweep(plain);
    const bool with = passed(main, "residual_slope"), without = passed(bare, "residual_slope");
    const double s1 = main.residualFit ? main.residualFit->slope : NAN;
    const double s2 = bare.residualFit ? bare.residualFit->slope : NAN;
    verdict(2, "residual scaling", with && without && passed(main, "runs_complete"),
            "slope " + num(s1) + " in [3.6, 4.4]: " + (with ? "yes" : "no") + "; without third harmonic " + num(s2) +
                " in [2.6, 3.4]: " + (without ? "yes" : "no"),
            sw.lap() + sweepSeconds);
  }

  {
    const bool slope = passed(main, "error_slope"), ratio = passed(main, "D_stable");
    const double s = main.errorFit ? main.errorFit->slope : NAN;
    std::string ds;
    for (const auto& r : main.perEps) ds += (ds.empty() ? "" : ", ") + num(r.D);
    verdict(3, "error scaling", slope && ratio && passed(main, "runs_complete"),
            "error slope " + num(s) + " in [1.7, 2.6]: " + (slope ? "yes" : "no") + "; D ratio " + num(main.DRatio) +
                " <= 2: " + (ratio ? "yes" : "no") + "; D = {" + ds + "}",
            sweepSeconds);
  }

  {
    const auto cons = checks::energy_conservation(10, 1e-3);
    const auto decay = checks::energy_decay(10, 1e-3);
    const auto bal = checks::balance_refinement(0.01);
    const bool ok = cons.drift < 1e-7 && decay.holds && std::isfinite(decay.K) && bal.order01 >= 1.9 &&
                    bal.order12 >= 1.9;
    verdict(4, "energy law", ok,
            "conservation drift " + num(cons.drift) + ", decay " + (decay.holds ? "holds" : "violated") + " with K " +
                num(decay.K) + ", balance orders " + num(bal.order01) + " " + num(bal.order12),
            sw.lap());
  }

  {
    const double m = checks::decomposition_mismatch(0.1, 1.0, 1e-3);
    verdict(5, "decomposition", m < 1e-6, "sup mismatch at tau = 1: " + num(m), sw.lap());
  }

  {
    const OracleReport o = run_oracle(rc);
    const auto& sel = o.calibration.candidates[o.calibration.selected];
    verdict(6, "light-cone oracle", o.all_pass(),
            "mismatch " + num(o.mismatch) + " after " + std::to_string(o.picard.iterations) +
                " iterations; kernel " + sel.name + " mismatch " + num(sel.mismatch) + ", alternative form " +
                num(o.calibration.alternativeMismatch),
            sw.lap());
  }

  {
    bool samples = !main.perEps.empty();
    for (const auto& r : main.perEps) samples = samples && r.ok && r.times.size() == 64;
    const Verdict* v = find(main, "gronwall_tube");
    verdict(7, "Gronwall tube", v && v->pass && samples, v ? v->detail : "missing verdict", 0.0);
  }

  {
    const double env = checks::envelope_order(0.01);
    const double car = checks::carrier_order(0.1, 20);
    const double spec = checks::spectral_derivative_error();
    const bool ok = env >= 1.7 && env <= 2.3 && car >= 1.7 && car <= 2.3 && spec < 1e-12;
    verdict(8, "solver orders", ok,
            "envelope " + num(env) + ", carrier " + num(car) + ", spectral derivative error " + num(spec), sw.lap());
  }

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
