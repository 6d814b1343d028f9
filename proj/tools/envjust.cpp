#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "envjust/ansatz.hpp"
#include "envjust/config.hpp"
#include "envjust/kernels.hpp"
#include "envjust/report.hpp"
#include "envjust/spectral.hpp"
#include "envjust/steady_state.hpp"
#include "envjust/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace envjust;

namespace {

struct Globals {
  std::string config;
  std::string out = "out";
  unsigned workers = 0;  // 0: keep the config value
  double budget = 0;     // 0: keep the config value
};

RunConfig load(const Globals& g) {
  RunConfig rc = g.config.empty() ? RunConfig{} : load_config(g.config);
  if (g.workers > 0) rc.workers = g.workers;
  if (g.budget > 0) rc.budget = g.budget;
  return rc;
}

fs::path out_dir(const Globals& g) {
  fs::create_directories(g.out);
  return g.out;
}

void log_line(const fs::path& dir, const std::string& text) {
  write_text(dir / "run.log", text, true);
  std::cout << text;
}

std::string verdict_lines(const std::vector<Verdict>& vs) {
  std::ostringstream o;
  for (const auto& v : vs) o << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
  return o.str();
}

std::string num(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

int exit_code(const std::vector<Verdict>& vs) {
  for (const auto& v : vs)
    if (!v.pass) return 1;
  return 0;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", eps);
  return buf;
}

int cmd_steady(const Globals& g) {
  const RunConfig rc = load(g);
  const ModelParams& p = rc.sweep.model;
  const DerivedParams d = derive_params(p);
  std::vector<Verdict> vs;
  json j;
  j["params"] = {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"lambda", p.lambda},
                 {"epsilon", p.epsilon}, {"h", p.h}, {"nu", p.nu}, {"k", p.k}};
  j["derived"] = {{"omega", d.omega}, {"v", d.v}, {"c", d.c}, {"kappa", d.kappa}, {"Omega", d.Omega},
                  {"alphaHat", d.alphaHat}, {"thirdHarmCoeff", d.thirdHarmCoeff}, {"nlsCubic", d.nlsCubic}};
  try {
    const SteadyState s = solve_steady_state(p, d, d.kappa);
    const double lle = steady_lle_residual(s, p, d);
    j["r"] = s.r;
    j["R"] = {{"re", s.R.real()}, {"im", s.R.imag()}};
    j["roots"] = s.allRealRoots;
    j["cubicResidual"] = s.cubicResidual;
    j["lleResidual"] = lle;
    j["phiLinearCoefficient"] = phi_linear_coefficient(s, p, d);
    vs.push_back({"single_root", s.allRealRoots.size() == 1, std::to_string(s.allRealRoots.size()) + " real roots"});
    vs.push_back({"steady_residual", lle < 1e-10, "steady residual " + num(lle)});
  } catch (const SteadyStateError& e) {
    j["error"] = e.what();
    vs.push_back({"single_root", false, e.what()});
  }
  j["verdicts"] = json::array();
  for (const auto& v : vs) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  const fs::path dir = out_dir(g);
  write_text(dir / "steady.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << '\n';
  write_text(dir / "run.log", "steady\n" + verdict_lines(vs), true);
  return exit_code(vs);
}

int cmd_envelope(const Globals& g, double tauEnd, int outputs) {
  const RunConfig rc = load(g);
  const SweepConfig& cfg = rc.sweep;
  const RunSetup s = make_run_setup(cfg, cfg.model.epsilon);
  if (tauEnd <= 0) tauEnd = cfg.T0;
  std::vector<double> taus;
  for (int i = 0; i < outputs; ++i) taus.push_back(tauEnd * i / (outputs - 1));
  const EnvelopeTrajectory tr = evolve_envelope(s.phi0, s.model, taus, cfg.dtau);
  std::vector<EnergyRecord> rec = tr.energy;
  energy_balance_residual(rec, s.p.alpha);

  std::ostringstream ts;
  ts.precision(17);
  ts << "tau,l2,sup,E,balance_residual\n";
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& phi = tr.snapshots[i].phi;
    ts << rec[i].tau << ',' << l2_norm(phi) << ',' << sup_norm(std::span<const cdouble>(phi.samples)) << ','
       << rec[i].E << ',' << rec[i].balanceResidual << '\n';
  }
  std::ostringstream fd;
  fd.precision(17);
  fd << "xi,re_phi,im_phi\n";
  const auto& last = tr.snapshots.back().phi;
  for (std::size_t j = 0; j < last.size(); ++j)
    fd << last.grid->x(j) << ',' << last.samples[j].real() << ',' << last.samples[j].imag() << '\n';

  const fs::path dir = out_dir(g);
  write_text(dir / "envelope.csv", ts.str());
  write_text(dir / "envelope_final.csv", fd.str());
  const EnergyDecayVerdict ev = check_energy_decay(rec, s.p.alpha, s.gnConstant);
  std::vector<Verdict> vs{{"energy_decay", ev.decayHolds, "K " + num(ev.K)}};
  log_line(dir, "envelope eps=" + eps_tag(s.p.epsilon) + " E0=" + num(s.E0) +
                    " smallness=" + num(s.smallness) + "\n" + verdict_lines(vs));
  return exit_code(vs);
}

int cmd_carrier(const Globals& g, int outputs) {
  const RunConfig rc = load(g);
  const SweepConfig& cfg = rc.sweep;
  const RunSetup s = make_run_setup(cfg, cfg.model.epsilon);
  const double eps = s.p.epsilon, tEnd = cfg.T0 / eps;
  // Uniform in t, hence in tau = eps^2 t as well.
  std::vector<double> ts;
  for (int i = 0; i < outputs; ++i) ts.push_back(tEnd * i / (outputs - 1));
  const EnvelopeTrajectory tr = evolve_envelope(s.phi0, s.model, {0.0}, cfg.dtau);
  const Ansatz an(s.model, s.carrier, cfg.ansatz);
  const AnsatzSnapshot x0 = an.build(reconstruct_A(tr.snapshots[0], s.model), 0.0);
  const auto states = evolve_carrier(x0.X, x0.Xt, s.carrier, ts, s.carrierDt);

  std::ostringstream o;
  o.precision(17);
  o << "t,tau,sup_u,linear_energy\n";
  bool finite = true;
  for (const auto& st : states) {
    const double su = sup_norm(std::span<const double>(st.u));
    finite = finite && std::isfinite(su);
    o << st.t << ',' << eps * eps * st.t << ',' << su << ',' << linear_energy(st, s.p.beta, s.p.gamma) << '\n';
  }
  std::ostringstream snap;
  snap.precision(17);
  snap << "x,u,u_t\n";
  const auto& last = states.back();
  for (std::size_t j = 0; j < last.u.size(); ++j) snap << last.grid->x(j) << ',' << last.u[j] << ',' << last.ut[j] << '\n';

  const fs::path dir = out_dir(g);
  write_text(dir / "carrier.csv", o.str());
  write_text(dir / "carrier_final.csv", snap.str());
  std::vector<Verdict> vs{{"carrier_finite", finite, "N=" + std::to_string(s.cg.grid->count)}};
  log_line(dir, "carrier eps=" + eps_tag(eps) + " t_end=" + num(ts.back()) + "\n" + verdict_lines(vs));
  return exit_code(vs);
}

int cmd_residual(const Globals& g, bool noThird) {
  RunConfig rc = load(g);
  rc.sweep.residualOnly = true;
  if (noThird) rc.sweep.ansatz.thirdHarmonic = false;
  const ScalingReport rep = run_justification_sweep(rc);
  const fs::path dir = out_dir(g);
  emit_report(rep, dir);
  for (const auto& r : rep.perEps) {
    std::ostringstream o;
    o.precision(17);
    o << "t,sup_res\n";
    for (std::size_t i = 0; i < r.times.size() && i < r.residual.size(); ++i) o << r.times[i] << ',' << r.residual[i] << '\n';
    write_text(dir / ("residual_eps_" + eps_tag(r.epsilon) + ".csv"), o.str());
  }
  std::cout << summary_text(rep);
  return rep.all_pass() ? 0 : 1;
}

int cmd_oracle(const Globals& g) {
  const RunConfig rc = load(g);
  const OracleReport rep = run_oracle(rc);
  const fs::path dir = out_dir(g);

  std::ostringstream d;
  d.precision(17);
  d << "iteration,defect\n";
  for (std::size_t i = 0; i < rep.picard.defects.size(); ++i) d << i + 1 << ',' << rep.picard.defects[i] << '\n';
  write_text(dir / "oracle_defects.csv", d.str());

  std::ostringstream y;
  y.precision(17);
  y << "t,x,picard,spectral\n";
  for (std::size_t i = 0; i < rep.picard.times.size(); ++i)
    for (std::size_t j = 0; j < rep.picard.xOut.size(); ++j)
      y << rep.picard.times[i] << ',' << rep.picard.xOut[j] << ',' << rep.picard.y[i][j] << ','
        << rep.spectral[i][j] << '\n';
  write_text(dir / "oracle_y.csv", y.str());

  auto calib = [](const KernelReport& k) {
    json c = json::array();
    for (const auto& cand : k.candidates) c.push_back({{"name", cand.name}, {"freq", cand.freq}, {"mismatch", cand.mismatch}});
    return json{{"candidates", c}, {"selected", k.candidates[k.selected].name}, {"alternativeMismatch", k.alternativeMismatch}};
  };
  json j;
  j["calibration"] = calib(rep.calibration);
  j["calibrationModel"] = calib(rep.calibrationModel);
  j["kernelFreq"] = rep.kernelFreq;
  j["iterations"] = rep.picard.iterations;
  j["converged"] = rep.picard.converged;
  j["finalDefect"] = rep.picard.finalDefect;
  j["mismatch"] = rep.mismatch;
  j["verdicts"] = json::array();
  for (const auto& v : rep.verdicts) j["verdicts"].push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  write_text(dir / "oracle.json", j.dump(2) + "\n");
  log_line(dir, "oracle\n" + verdict_lines(rep.verdicts));
  return rep.all_pass() ? 0 : 1;
}

int cmd_sweep(const Globals& g) {
  const RunConfig rc = load(g);
  const ScalingReport rep = run_justification_sweep(rc);
  const ReportPaths p = emit_report(rep, out_dir(g));
  std::cout << summary_text(rep) << "report written to " << p.json.string() << '\n';
  return rep.all_pass() ? 0 : 1;
}

int cmd_report(const Globals& g, const std::string& input) {
  const fs::path path = input.empty() ? fs::path(g.out) / "summary.json" : fs::path(input);
  ScalingReport rep = load_report(path);
  // Re-derive verdicts from the stored runs under the stored configuration.
  const RunConfig rc = rep.metadata.config.empty() ? load(g) : parse_config(rep.metadata.config);
  rep.verdicts.clear();
  assess(rep, rc.sweep);
  std::cout << summary_text(rep);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Envelope-approximation justification harness"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--workers", g.workers, "worker threads (overrides the config)");
  app.add_option("--budget", g.budget, "work budget (overrides the config)");
  std::string isa;
  app.add_option("--isa", isa, "force kernel set: scalar or avx2");

  auto* steady = app.add_subcommand("steady", "background amplitude and residuals");
  auto* envelope = app.add_subcommand("envelope", "evolve the envelope equation");
  double tauEnd = 0;
  int envOutputs = 101;
  envelope->add_option("--tau", tauEnd, "final slow time (default T0)");
  envelope->add_option("--outputs", envOutputs, "number of output times")->check(CLI::Range(5, 1000000));
  auto* carrier = app.add_subcommand("carrier", "evolve the carrier equation from the ansatz");
  int carOutputs = 65;
  carrier->add_option("--outputs", carOutputs, "number of output times")->check(CLI::Range(2, 1000000));
  auto* residual = app.add_subcommand("residual", "ansatz residual sweep");
  bool noThird = false;
  residual->add_flag("--no-third-harmonic", noThird, "drop the third-harmonic correction");
  auto* oracle = app.add_subcommand("oracle", "light-cone oracle and kernel calibration");
  auto* sweep = app.add_subcommand("sweep", "full epsilon sweep with verdicts");
  auto* report = app.add_subcommand("report", "re-assess a stored summary");
  std::string input;
  report->add_option("--input", input, "summary.json (default <out>/summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help and version exit cleanly
  }
  try {
    if (isa == "scalar") kernels::force_isa(kernels::Isa::Scalar);
    else if (isa == "avx2") kernels::force_isa(kernels::Isa::Avx2);
    else if (!isa.empty()) throw CLI::ValidationError("--isa", "expected scalar or avx2");

    if (*steady) return cmd_steady(g);
    if (*envelope) return cmd_envelope(g, tauEnd, envOutputs);
    if (*carrier) return cmd_carrier(g, carOutputs);
    if (*residual) return cmd_residual(g, noThird);
    if (*oracle) return cmd_oracle(g);
    if (*sweep) return cmd_sweep(g);
    if (*report) return cmd_report(g, input);
  } catch (const BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
