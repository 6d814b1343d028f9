#include "envjust/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace envjust {

using nlohmann::json;

// Field maps for the JSON form. NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE needs the
// types in this namespace, which they are.
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DerivedParams, omega, v, c, kappa, Omega, alphaHat, thirdHarmCoeff, nlsCubic)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GronwallInputs, epsilon, alphaHat, lambda, kernelFreq, C0, CR, CX, D)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GronwallVerdict, holds, firstViolation, firstViolationTime, M, tube)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunRecord, epsilon, ok, failure, derived, gridCount, carrierLength, slowLength,
                                   carrierMode, backgroundMode, snapOffset, gnConstant, smallness, amplitude, E0,
                                   carrierDt, envelopeDtau, times, error, residual, xnorm, energy, supError,
                                   supResidual, D, CX, CR, K, energyDecay, gronwallInputs, gronwall,
                                   refinedSupError, refineChange, refineOk, warnings)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Verdict, name, pass, detail)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReportMetadata, config, isa, workers, budget, estimatedCost, timestamp)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PowerLawFit, slope, intercept, rmsResidual, points)

namespace {

json opt_fit(const std::optional<PowerLawFit>& f) { return f ? json(*f) : json(nullptr); }

std::optional<PowerLawFit> opt_fit(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<PowerLawFit>();
}

}  // namespace

json to_json(const ScalingReport& r) {
  json j;
  j["perEps"] = r.perEps;
  j["errorFit"] = opt_fit(r.errorFit);
  j["residualFit"] = opt_fit(r.residualFit);
  j["DRatio"] = r.DRatio;
  j["verdicts"] = r.verdicts;
  j["allPass"] = r.all_pass();
  j["metadata"] = r.metadata;
  return j;
}

ScalingReport report_from_json(const json& j) {
  try {
    ScalingReport r;
    r.perEps = j.at("perEps").get<std::vector<RunRecord>>();
    r.errorFit = opt_fit(j.at("errorFit"));
    r.residualFit = opt_fit(j.at("residualFit"));
    r.DRatio = j.at("DRatio").get<double>();
    r.verdicts = j.at("verdicts").get<std::vector<Verdict>>();
    r.metadata = j.at("metadata").get<ReportMetadata>();
    return r;
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string runs_csv(const ScalingReport& r) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "epsilon,ok,N,carrier_length,slow_length,snap_offset,amplitude,E0,sup_error,sup_residual,D,C_X,C_R,K,"
       "gronwall_holds,refine_change\n";
  for (const auto& x : r.perEps)
    o << x.epsilon << ',' << (x.ok ? 1 : 0) << ',' << x.gridCount << ',' << x.carrierLength << ','
      << x.slowLength << ',' << x.snapOffset << ',' << x.amplitude << ',' << x.E0 << ',' << x.supError << ','
      << x.supResidual << ',' << x.D << ',' << x.CX << ',' << x.CR << ',' << x.K << ','
      << (x.gronwall.holds ? 1 : 0) << ',' << x.refineChange << '\n';
  return o.str();
}

std::string samples_csv(const ScalingReport& r) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "epsilon,t,error,residual,xnorm,energy,y,tube\n";
  for (const auto& x : r.perEps) {
    const double e2 = x.epsilon * x.epsilon;
    for (std::size_t i = 0; i < x.times.size(); ++i) {
      auto at = [i](const std::vector<double>& v) { return i < v.size() ? v[i] : 0.0; };
      o << x.epsilon << ',' << x.times[i] << ',' << at(x.error) << ',' << at(x.residual) << ',' << at(x.xnorm)
        << ',' << at(x.energy) << ',' << at(x.error) / e2 << ',' << at(x.gronwall.tube) << '\n';
    }
  }
  return o.str();
}

std::string summary_text(const ScalingReport& r) {
  std::ostringstream o;
  o << std::setprecision(6);
  for (const auto& x : r.perEps) {
    o << "eps=" << x.epsilon;
    if (!x.ok) {
      o << " FAILED: " << x.failure << '\n';
      continue;
    }
    o << " N=" << x.gridCount << " sup|u-X|=" << x.supError << " sup|Res|=" << x.supResidual << " D=" << x.D
      << " C_X=" << x.CX << " C_R=" << x.CR << " K=" << x.K << '\n';
    for (const auto& w : x.warnings) o << "  warning: " << w << '\n';
  }
  if (r.residualFit) o << "residual slope " << r.residualFit->slope << '\n';
  if (r.errorFit) o << "error slope " << r.errorFit->slope << '\n';
  for (const auto& v : r.verdicts) o << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
  return o.str();
}

void write_text(const std::filesystem::path& p, const std::string& text, bool append) {
  std::ofstream f(p, append ? std::ios::app : std::ios::trunc);
  if (!f) throw ReportError("cannot open '" + p.string() + "' for writing");
  f << text;
  if (!f) throw ReportError("write failed for '" + p.string() + "'");
}

ReportPaths emit_report(const ScalingReport& r, const std::filesystem::path& dir) {
  if (r.perEps.empty()) throw ReportError("no runs");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ReportError("cannot create '" + dir.string() + "': " + ec.message());
  ReportPaths p{dir / "runs.csv", dir / "samples.csv", dir / "summary.json", dir / "run.log"};
  write_text(p.runsCsv, runs_csv(r));
  write_text(p.samplesCsv, samples_csv(r));
  write_text(p.json, to_json(r).dump(2) + "\n");
  write_text(p.log, summary_text(r), true);
  return p;
}

ScalingReport load_report(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ReportError("cannot open '" + path.string() + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ReportError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace envjust
