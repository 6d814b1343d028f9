#include "envjust/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace envjust {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(to_double(key, item.substr(b, e - b + 1)));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"model",
       {{"alpha", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.alpha = to_double(k, v); }},
        {"beta", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.beta = to_double(k, v); }},
        {"gamma", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.gamma = to_double(k, v); }},
        {"lambda", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.lambda = to_double(k, v); }},
        {"epsilon", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.epsilon = to_double(k, v); }},
        {"h", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.h = to_double(k, v); }},
        {"nu", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.nu = to_double(k, v); }},
        {"k", [](RunConfig& c, auto& k, auto& v) { c.sweep.model.k = to_double(k, v); }}}},
      {"grid",
       {{"slow_length", [](RunConfig& c, auto& k, auto& v) { c.sweep.slowLength = to_double(k, v); }},
        {"points_per_wavelength",
         [](RunConfig& c, auto& k, auto& v) { c.sweep.pointsPerWavelength = static_cast<int>(to_u64(k, v)); }},
        {"max_count", [](RunConfig& c, auto& k, auto& v) { c.sweep.maxCount = to_u64(k, v); }},
        {"convention",
         [](RunConfig& c, auto& k, auto& v) {
           if (v == "scaled")
             c.sweep.convention = BackgroundConvention::ScaledCarrier;
           else if (v == "locked")
             c.sweep.convention = BackgroundConvention::CarrierLocked;
           else
             throw ConfigError("'" + k + "': expected scaled or locked");
         }}}},
      {"envelope",
       {{"dtau", [](RunConfig& c, auto& k, auto& v) { c.sweep.dtau = to_double(k, v); }},
        {"width", [](RunConfig& c, auto& k, auto& v) { c.sweep.width = to_double(k, v); }},
        {"amplitude",
         [](RunConfig& c, auto& k, auto& v) {
           if (v == "auto")
             c.sweep.amplitude.reset();
           else
             c.sweep.amplitude = to_double(k, v);
         }},
        {"energy_fraction", [](RunConfig& c, auto& k, auto& v) { c.sweep.energyFraction = to_double(k, v); }},
        {"gn_seed", [](RunConfig& c, auto& k, auto& v) { c.sweep.gnSeed = to_u64(k, v); }}}},
      {"carrier",
       {{"dt_divisor", [](RunConfig& c, auto& k, auto& v) { c.sweep.carrierDtDivisor = to_double(k, v); }}}},
      {"ansatz",
       {{"third_harmonic", [](RunConfig& c, auto& k, auto& v) { c.sweep.ansatz.thirdHarmonic = to_bool(k, v); }},
        {"second_derivative",
         [](RunConfig& c, auto& k, auto& v) {
           if (v == "fd")
             c.sweep.ansatz.secondDerivative = SecondDerivative::FiniteDifference;
           else if (v == "analytic")
             c.sweep.ansatz.secondDerivative = SecondDerivative::Analytic;
           else
             throw ConfigError("'" + k + "': expected fd or analytic");
         }},
        {"fd_step", [](RunConfig& c, auto& k, auto& v) { c.sweep.ansatz.fdStep = to_double(k, v); }}}},
      {"sweep",
       {{"epsilons", [](RunConfig& c, auto& k, auto& v) { c.sweep.epsilons = to_list(k, v); }},
        {"T0", [](RunConfig& c, auto& k, auto& v) { c.sweep.T0 = to_double(k, v); }},
        {"samples", [](RunConfig& c, auto& k, auto& v) { c.sweep.samples = static_cast<int>(to_u64(k, v)); }},
        {"refine_check", [](RunConfig& c, auto& k, auto& v) { c.sweep.refineCheck = to_bool(k, v); }},
        {"residual_only", [](RunConfig& c, auto& k, auto& v) { c.sweep.residualOnly = to_bool(k, v); }},
        {"C0", [](RunConfig& c, auto& k, auto& v) { c.sweep.C0 = to_double(k, v); }},
        {"seed", [](RunConfig& c, auto& k, auto& v) { c.sweep.seed = to_u64(k, v); }}}},
      {"oracle",
       {{"T", [](RunConfig& c, auto& k, auto& v) { c.oracle.T = to_double(k, v); }},
        {"dt", [](RunConfig& c, auto& k, auto& v) { c.oracle.dt = to_double(k, v); }},
        {"dx", [](RunConfig& c, auto& k, auto& v) { c.oracle.dx = to_double(k, v); }},
        {"half_width", [](RunConfig& c, auto& k, auto& v) { c.oracle.halfWidth = to_double(k, v); }},
        {"output_spacing", [](RunConfig& c, auto& k, auto& v) { c.oracle.outputSpacing = to_double(k, v); }},
        {"tol", [](RunConfig& c, auto& k, auto& v) { c.oracle.tol = to_double(k, v); }},
        {"X0", [](RunConfig& c, auto& k, auto& v) { c.oracle.X0 = to_double(k, v); }},
        {"quad_tol", [](RunConfig& c, auto& k, auto& v) { c.oracle.quadTol = to_double(k, v); }},
        {"calib_gamma", [](RunConfig& c, auto& k, auto& v) { c.oracle.calibGamma = to_double(k, v); }},
        {"calib_epsilon", [](RunConfig& c, auto& k, auto& v) { c.oracle.calibEpsilon = to_double(k, v); }},
        {"calib_alpha", [](RunConfig& c, auto& k, auto& v) { c.oracle.calibAlpha = to_double(k, v); }}}},
      {"run",
       {{"workers", [](RunConfig& c, auto& k, auto& v) { c.workers = static_cast<unsigned>(to_u64(k, v)); }},
        {"budget", [](RunConfig& c, auto& k, auto& v) { c.budget = to_double(k, v); }}}},
  };
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig c;
  const auto& sch = schema();
  for (const auto& [section, body] : tree) {
    const auto sit = sch.find(section);
    if (sit == sch.end()) throw ConfigError("unknown config section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, node] : body) {
      const auto kit = sit->second.find(key);
      if (kit == sit->second.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      kit->second(c, section + "." + key, node.data());
    }
  }
  const auto problems = validate_sweep_config(c.sweep);
  if (!problems.empty()) {
    std::string msg = "invalid sweep configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> validate_sweep_config(const SweepConfig& c) {
  std::vector<std::string> v;
  if (c.epsilons.size() < 3) v.push_back("at least 3 epsilon values are required");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > 0 && c.epsilons[i] < 1)) v.push_back("epsilon values must lie in (0, 1)");
    if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1])) v.push_back("epsilon values must be strictly descending");
  }
  if (!(c.T0 > 0)) v.push_back("T0 must be positive");
  if (c.samples < 2) v.push_back("samples must be at least 2");
  if (!(c.C0 >= 0)) v.push_back("C0 must be non-negative");
  if (!(c.slowLength > 0)) v.push_back("slow_length must be positive");
  if (c.pointsPerWavelength < 2) v.push_back("points_per_wavelength must be at least 2");
  if (!(c.dtau > 0)) v.push_back("dtau must be positive");
  if (!(c.width > 0)) v.push_back("width must be positive");
  if (c.amplitude && !(*c.amplitude >= 0)) v.push_back("amplitude must be non-negative");
  if (!(c.energyFraction > 0 && c.energyFraction < 1)) v.push_back("energy_fraction must lie in (0, 1)");
  if (!(c.carrierDtDivisor >= 1)) v.push_back("dt_divisor must be at least 1");
  for (double e : c.epsilons) {
    ModelParams p = c.model;
    p.epsilon = e;
    for (const auto& s : validate_params(p)) v.push_back("epsilon " + std::to_string(e) + ": " + s);
  }
  return v;
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  const auto& s = c.sweep;
  const auto& m = s.model;
  o << "[model]\nalpha = " << m.alpha << "\nbeta = " << m.beta << "\ngamma = " << m.gamma
    << "\nlambda = " << m.lambda << "\nepsilon = " << m.epsilon << "\nh = " << m.h << "\nnu = " << m.nu
    << "\nk = " << m.k << "\n\n";
  o << "[grid]\nslow_length = " << s.slowLength << "\npoints_per_wavelength = " << s.pointsPerWavelength
    << "\nmax_count = " << s.maxCount << "\nconvention = "
    << (s.convention == BackgroundConvention::ScaledCarrier ? "scaled" : "locked") << "\n\n";
  o << "[envelope]\ndtau = " << s.dtau << "\nwidth = " << s.width << "\namplitude = ";
  if (s.amplitude)
    o << *s.amplitude;
  else
    o << "auto";
  o << "\nenergy_fraction = " << s.energyFraction << "\ngn_seed = " << s.gnSeed << "\n\n";
  o << "[carrier]\ndt_divisor = " << s.carrierDtDivisor << "\n\n";
  o << "[ansatz]\nthird_harmonic = " << (s.ansatz.thirdHarmonic ? "true" : "false")
    << "\nsecond_derivative = "
    << (s.ansatz.secondDerivative == SecondDerivative::Analytic ? "analytic" : "fd")
    << "\nfd_step = " << s.ansatz.fdStep << "\n\n";
  o << "[sweep]\nepsilons = ";
  for (std::size_t i = 0; i < s.epsilons.size(); ++i) o << (i ? ", " : "") << s.epsilons[i];
  o << "\nT0 = " << s.T0 << "\nsamples = " << s.samples << "\nrefine_check = " << (s.refineCheck ? "true" : "false")
    << "\nresidual_only = " << (s.residualOnly ? "true" : "false") << "\nC0 = " << s.C0 << "\nseed = " << s.seed
    << "\n\n";
  const auto& q = c.oracle;
  o << "[oracle]\nT = " << q.T << "\ndt = " << q.dt << "\ndx = " << q.dx << "\nhalf_width = " << q.halfWidth
    << "\noutput_spacing = " << q.outputSpacing << "\ntol = " << q.tol << "\nX0 = " << q.X0
    << "\nquad_tol = " << q.quadTol << "\ncalib_gamma = " << q.calibGamma << "\ncalib_epsilon = " << q.calibEpsilon
    << "\ncalib_alpha = " << q.calibAlpha << "\n\n";
  o << "[run]\nworkers = " << c.workers << "\nbudget = " << c.budget << "\n";
  return o.str();
}

}  // namespace envjust
