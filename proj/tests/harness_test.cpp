#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "envjust/config.hpp"
#include "envjust/fit.hpp"
#include "envjust/kernels.hpp"
#include "envjust/report.hpp"
#include "envjust/sweep.hpp"

using namespace envjust;

namespace {

RunConfig small_config() {
  RunConfig rc;
  rc.sweep.epsilons = {0.3, 0.25, 0.2};
  rc.sweep.T0 = 0.3;
  rc.sweep.samples = 8;
  rc.sweep.refineCheck = false;
  rc.sweep.dtau = 1e-3;
  rc.sweep.carrierDtDivisor = 60;
  rc.workers = 1;
  return rc;
}

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::size_t n = 0;
  for (std::string line; std::getline(f, line);)
    if (!line.empty()) ++n;
  return n;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("envjust_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("power-law fit recovers exact exponents") {
  std::vector<std::pair<double, double>> quartic, quad;
  for (double e : {0.2, 0.14, 0.1, 0.07, 0.05}) {
    quartic.emplace_back(e, std::pow(e, 4));
    quad.emplace_back(e, 3 * e * e);
  }
  const auto f4 = fit_power_law(quartic);
  CHECK(std::fabs(f4.slope - 4) < 1e-12);
  CHECK(f4.points == 5);
  const auto f2 = fit_power_law(quad);
  CHECK(std::fabs(f2.slope - 2) < 1e-12);
  CHECK(std::fabs(f2.intercept - std::log(3.0)) < 1e-12);
  CHECK(f2.rmsResidual < 1e-12);
}

TEST_CASE("power-law fit tolerates 5% multiplicative noise") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (double e : {0.2, 0.14, 0.1, 0.07, 0.05}) pts.emplace_back(e, e * e * (1 + u(rng)));
    const double s = fit_power_law(pts).slope;
    CHECK(s >= 1.85);
    CHECK(s <= 2.15);
  }
}

TEST_CASE("power-law fit rejects unusable input") {
  CHECK_THROWS_AS(fit_power_law({{0.1, 1e-4}, {0.05, 1e-5}}), FitError);
  CHECK_THROWS_AS(fit_power_law({{0.1, 1e-4}, {0.05, 0.0}, {0.02, 1e-6}}), FitError);
  CHECK_THROWS_AS(fit_power_law({{0.1, 1e-4}, {-0.05, 1e-5}, {0.02, 1e-6}}), FitError);
}

TEST_CASE("observed order") {
  CHECK(observed_order(0.1, 1e-4, 0.05, 2.5e-5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(observed_order(0.2, 1.6e-3, 0.1, 1e-4) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("config round-trips through INI text") {
  RunConfig c;
  c.sweep.model.alpha = 0.7;
  c.sweep.model.lambda = -0.5;
  c.sweep.epsilons = {0.3, 0.2, 0.15, 0.1};
  c.sweep.T0 = 0.75;
  c.sweep.samples = 33;
  c.sweep.convention = BackgroundConvention::CarrierLocked;
  c.sweep.amplitude = 0.125;
  c.sweep.ansatz.thirdHarmonic = false;
  c.sweep.ansatz.secondDerivative = SecondDerivative::Analytic;
  c.oracle.X0 = 0.2;
  c.workers = 3;
  c.budget = 1e9;
  const RunConfig back = parse_config(to_ini(c));
  CHECK(back == c);
  CHECK(parse_config(to_ini(RunConfig{})) == RunConfig{});
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(parse_config("[model]\nalpah = 1\n"), doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[modle]\nalpha = 1\n"), doctest::Contains("unknown config section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[model]\nalpha = fast\n"), doctest::Contains("expected a number"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[sweep]\nepsilons = 0.1, 0.2, 0.05\n"),
                       doctest::Contains("strictly descending"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[sweep]\nepsilons = 0.2, 0.1\n"), doctest::Contains("at least 3"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[sweep]\nepsilons = 1.5, 0.2, 0.1\n"), doctest::Contains("(0, 1)"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/envjust.ini"), ConfigError);
}

TEST_CASE("sample times") {
  const auto t = sample_times(10.0, 64);
  REQUIRE(t.size() == 64);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(t.back() == 10.0);
  for (std::size_t i = 2; i < t.size(); ++i) {
    CHECK(t[i] > t[i - 1]);
    CHECK(t[i] / t[i - 1] == doctest::Approx(t[2] / t[1]).epsilon(1e-9));
  }
  CHECK(sample_times(5.0, 2) == std::vector<double>{0.0, 5.0});
}

TEST_CASE("band-limited field") {
  const auto g = make_grid(40.0, 256);
  const auto f = band_limited_field(*g, 5, 2.0);
  double sup = 0;
  for (double v : f) sup = std::max(sup, std::fabs(v));
  CHECK(sup == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f == band_limited_field(*g, 5, 2.0));
  CHECK(f != band_limited_field(*g, 6, 2.0));
}

TEST_CASE("Gronwall tube") {
  const std::vector<double> times{0, 0.5, 1, 2, 4};
  SUBCASE("zero inputs give a zero tube that zero error satisfies") {
    const auto v = check_gronwall_tube({0.1, 0, -1, 1, 0, 0, 0, 0}, times, std::vector<double>(5, 0.0));
    CHECK(v.holds);
    for (double a : v.tube) CHECK(a == 0.0);
  }
  SUBCASE("without nonlinearity the tube is the polynomial prefactor") {
    const GronwallInputs in{0.1, 0.02, 0.0, 1.3, 0.5, 2.0, 1.0, 3.0};
    const auto v = check_gronwall_tube(in, times, std::vector<double>(5, 0.0));
    CHECK(v.M == 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      const double a = (1 + 0.02 * t + 0.1 * t + 0.5 * 1.69 * t * t) * 0.5 + 0.5 * 0.01 * t * t * 2.0;
      CHECK(v.tube[i] == doctest::Approx(a).epsilon(1e-14));
    }
  }
  SUBCASE("first violation is reported") {
    const GronwallInputs in{0.1, 0.0, -1.0, 1.0, 0.0, 1.0, 1.0, 1.0};
    auto probe = check_gronwall_tube(in, times, std::vector<double>(5, 0.0));
    std::vector<double> y = probe.tube;
    y[0] = 0;
    y[3] *= 1.01;
    y[4] *= 2;
    const auto v = check_gronwall_tube(in, times, y);
    CHECK_FALSE(v.holds);
    CHECK(v.firstViolation == 3);
    CHECK(v.firstViolationTime == 2.0);
  }
}

TEST_CASE("budget refusal happens before any work") {
  RunConfig rc = small_config();
  rc.budget = 1;
  try {
    run_justification_sweep(rc);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.estimate > 1);
    CHECK(e.estimate == doctest::Approx(estimate_cost(rc.sweep)));
  }
}

TEST_CASE("error vanishes at t = 0 without an initial perturbation") {
  RunConfig rc = small_config();
  rc.sweep.C0 = 0;
  const RunRecord r = run_single(rc.sweep, 0.3, 0);
  REQUIRE(r.ok);
  REQUIRE(!r.error.empty());
  CHECK(r.error[0] == 0.0);
  CHECK(r.supError > 0);
}

TEST_CASE("small sweep: determinism, JSON and report files") {
  const RunConfig rc = small_config();
  ScalingReport a = run_justification_sweep(rc);
  ScalingReport b = run_justification_sweep(rc);
  REQUIRE(a.perEps.size() == 3);
  for (const auto& r : a.perEps) CHECK_MESSAGE(r.ok, r.failure);
  a.metadata.timestamp.clear();
  b.metadata.timestamp.clear();
  CHECK(a == b);

  SUBCASE("JSON round-trip is exact") {
    const ScalingReport back = report_from_json(nlohmann::json::parse(to_json(a).dump()));
    CHECK(back == a);
  }
  SUBCASE("assess is reproducible from the stored config") {
    ScalingReport c = a;
    assess(c, parse_config(c.metadata.config).sweep);
    CHECK(c.verdicts == a.verdicts);
  }
  SUBCASE("emitted files") {
    const auto dir = scratch_dir("small");
    const ReportPaths paths = emit_report(a, dir);
    CHECK(count_lines(paths.runsCsv) == 4);
    CHECK(count_lines(paths.samplesCsv) == 1 + 3 * 8);
    CHECK(load_report(paths.json) == a);
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("emit_report") {
  ScalingReport r;
  CHECK_THROWS_WITH_AS(emit_report(r, scratch_dir("empty")), "no runs", ReportError);
  for (double e : {0.2, 0.14, 0.1, 0.07, 0.05}) {
    RunRecord rec;
    rec.epsilon = e;
    rec.ok = true;
    r.perEps.push_back(rec);
  }
  const auto dir = scratch_dir("five");
  const ReportPaths p = emit_report(r, dir);
  CHECK(count_lines(p.runsCsv) == 6);
  CHECK(std::filesystem::exists(p.json));
  CHECK(std::filesystem::exists(p.log));
  CHECK_THROWS_AS(load_report(dir / "missing.json"), ReportError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep results agree between scalar and AVX2 kernels") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) return;
  const RunConfig rc = small_config();
  const kernels::Isa before = kernels::active_isa();
  kernels::force_isa(kernels::Isa::Scalar);
  const ScalingReport s = run_justification_sweep(rc);
  kernels::force_isa(kernels::Isa::Avx2);
  const ScalingReport v = run_justification_sweep(rc);
  kernels::force_isa(before);
  REQUIRE(s.perEps.size() == v.perEps.size());
  for (std::size_t i = 0; i < s.perEps.size(); ++i) {
    const auto &x = s.perEps[i], &y = v.perEps[i];
    CHECK(std::fabs(x.supError - y.supError) <= 1e-10 * x.supError);
    CHECK(std::fabs(x.supResidual - y.supResidual) <= 1e-10 * x.supResidual);
  }
  CHECK(s.verdicts == v.verdicts);
}
