#include "envjust/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "envjust/spectral.hpp"

namespace envjust {

namespace {

constexpr cdouble I{0, 1};

double sup_abs(const std::vector<double>& v) { return sup_norm(std::span<const double>(v)); }

}  // namespace

Ansatz::Ansatz(const EnvelopeModel& env, const CarrierSystem& carrier, AnsatzOptions opt)
    : env_(env), sys_(carrier), opt_(opt), xgrid_(carrier.grid) {
  if (env_.grid->count != xgrid_->count)
    throw GridError("slow and carrier grids must have the same sample count");
  const double expected = env_.p.epsilon * env_.d.c * xgrid_->length;
  if (std::fabs(env_.grid->length - expected) > 1e-9 * expected)
    throw GridError("slow grid is not the image of the carrier grid");
  b_ = opt_.thirdHarmonic ? env_.d.thirdHarmCoeff : 0.0;
}

double Ansatz::fd_step() const {
  return opt_.fdStep > 0 ? opt_.fdStep : (2 * std::numbers::pi / (3 * env_.d.omega)) / 100.0;
}

std::vector<cdouble> Ansatz::to_carrier_grid(const std::vector<cdouble>& slow, double t) const {
  // Same samples on the x-grid represent f(x) = slow(eps c x); evaluate at x - v t.
  return spectral_shift(SpectralField(xgrid_, slow), env_.d.v * t).samples;
}

std::vector<cdouble> Ansatz::forcing(double tau) const {
  const Grid1D& g = *env_.grid;
  std::vector<cdouble> f(g.count);
  const double amp = -env_.p.h / (2 * env_.d.omega);
  for (std::size_t j = 0; j < g.count; ++j)
    f[j] = amp * std::polar(1.0, -(env_.kappa() * g.x(j) - env_.p.nu * tau));
  return f;
}

std::vector<cdouble> Ansatz::A_tau(const SpectralField& A, double tau) const {
  const SpectralField Axx = spectral_derivative(A, 2);
  const auto F = forcing(tau);
  const double g = env_.g(), ha = 0.5 * env_.p.alpha;
  std::vector<cdouble> out(A.size());
  for (std::size_t j = 0; j < A.size(); ++j) {
    const cdouble a = A.samples[j];
    out[j] = I * (Axx.samples[j] + I * ha * a + g * std::norm(a) * a - F[j]);
  }
  return out;
}

SlowFields Ansatz::slow_fields(const SpectralField& A, double t, bool second) const {
  const double eps = env_.p.epsilon, tau = eps * eps * t;
  SlowFields f;
  const SpectralField Ax = spectral_derivative(A, 1);
  const SpectralField Axx = spectral_derivative(A, 2);
  const auto At = A_tau(A, tau);
  f.A = to_carrier_grid(A.samples, t);
  f.Axi = to_carrier_grid(Ax.samples, t);
  f.Axixi = to_carrier_grid(Axx.samples, t);
  f.Atau = to_carrier_grid(At, t);
  if (second) {
    const SpectralField AtF(env_.grid, At);
    const SpectralField Atx = spectral_derivative(AtF, 1);
    const SpectralField Atxx = spectral_derivative(AtF, 2);
    const auto F = forcing(tau);
    const double g = env_.g(), ha = 0.5 * env_.p.alpha, nu = env_.p.nu;
    std::vector<cdouble> Att(A.size());
    for (std::size_t j = 0; j < A.size(); ++j) {
      const cdouble a = A.samples[j], at = At[j];
      Att[j] = I * (Atxx.samples[j] + I * ha * at +
                    g * (2.0 * std::norm(a) * at + a * a * std::conj(at)) - I * nu * F[j]);
    }
    f.Atauxi = to_carrier_grid(Atx.samples, t);
    f.Atautau = to_carrier_grid(Att, t);
  }
  return f;
}

AnsatzSnapshot Ansatz::build_X(const SpectralField& A, double t) const {
  const auto a = to_carrier_grid(A.samples, t);
  const double eps = env_.p.epsilon, k = env_.p.k, w = env_.d.omega;
  AnsatzSnapshot s;
  s.t = t;
  s.X.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const cdouble e1 = std::polar(1.0, k * xgrid_->x(j) - w * t);
    const cdouble e3 = e1 * e1 * e1;
    const cdouble z = eps * a[j] * e1 + b_ * a[j] * a[j] * a[j] * e3;
    s.X[j] = 2 * z.real();
  }
  s.supX = sup_abs(s.X);
  return s;
}

void Ansatz::build_Xt(const SpectralField& A, double t, AnsatzSnapshot& s) const {
  const SlowFields f = slow_fields(A, t, false);
  const double eps = env_.p.epsilon, k = env_.p.k, w = env_.d.omega;
  const double cv = env_.d.c * env_.d.v;
  s.t = t;
  s.Xt.resize(f.A.size());
  for (std::size_t j = 0; j < f.A.size(); ++j) {
    const cdouble a = f.A[j];
    const cdouble Da = eps * eps * f.Atau[j] - eps * cv * f.Axi[j];
    const cdouble e1 = std::polar(1.0, k * xgrid_->x(j) - w * t);
    const cdouble e3 = e1 * e1 * e1;
    const cdouble z = eps * (Da - I * w * a) * e1 + b_ * (3.0 * a * a * Da - 3.0 * I * w * a * a * a) * e3;
    s.Xt[j] = 2 * z.real();
  }
  s.supXt = sup_abs(s.Xt);
}

AnsatzSnapshot Ansatz::build(const SpectralField& A, double t) const {
  AnsatzSnapshot s = build_X(A, t);
  build_Xt(A, t, s);
  return s;
}

std::vector<double> Ansatz::Xtt_analytic(const SpectralField& A, double t) const {
  const SlowFields f = slow_fields(A, t, true);
  const double eps = env_.p.epsilon, k = env_.p.k, w = env_.d.omega;
  const double c = env_.d.c, v = env_.d.v, cv = c * v;
  const double e2 = eps * eps, e3 = e2 * eps, e4 = e3 * eps;
  std::vector<double> out(f.A.size());
  for (std::size_t j = 0; j < f.A.size(); ++j) {
    const cdouble a = f.A[j];
    const cdouble Da = e2 * f.Atau[j] - eps * cv * f.Axi[j];
    const cdouble DDa = e4 * f.Atautau[j] - 2 * e3 * cv * f.Atauxi[j] + e2 * c * c * v * v * f.Axixi[j];
    const cdouble ph1 = std::polar(1.0, k * xgrid_->x(j) - w * t);
    const cdouble ph3 = ph1 * ph1 * ph1;
    const cdouble q = a * a * a, Dq = 3.0 * a * a * Da, DDq = 6.0 * a * Da * Da + 3.0 * a * a * DDa;
    const cdouble z = eps * (DDa - 2.0 * I * w * Da - w * w * a) * ph1 +
                      b_ * (DDq - 6.0 * I * w * Dq - 9.0 * w * w * q) * ph3;
    out[j] = 2 * z.real();
  }
  return out;
}

std::vector<double> Ansatz::Xtt_fd(const EnvelopeState& s, double t, double delta) const {
  const double e2 = env_.p.epsilon * env_.p.epsilon;
  NlsStepper stepper(phi_system(env_));
  auto Xt_at = [&](int j) {
    EnvelopeState shifted = s;
    if (j != 0) {
      stepper.step(shifted.phi.samples, s.tau, e2 * j * delta);
      shifted.tau = s.tau + e2 * j * delta;
    }
    AnsatzSnapshot snap;
    build_Xt(reconstruct_A(shifted, env_), t + j * delta, snap);
    return snap.Xt;
  };
  const auto m2 = Xt_at(-2), m1 = Xt_at(-1), p1 = Xt_at(1), p2 = Xt_at(2);
  std::vector<double> out(m1.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = (m2[j] - 8 * m1[j] + 8 * p1[j] - p2[j]) / (12 * delta);
  return out;
}

std::vector<double> Ansatz::drive(double t) const {
  std::vector<double> d(xgrid_->count);
  if (sys_.drive.amplitude == 0) return d;
  const double q = xgrid_->wavenumbers[xgrid_->slot(sys_.drive.mode)];
  for (std::size_t j = 0; j < d.size(); ++j)
    d[j] = 2 * sys_.drive.amplitude * std::cos(q * xgrid_->x(j) - sys_.drive.frequency * t);
  return d;
}

std::vector<double> Ansatz::residual(const AnsatzSnapshot& snap, const std::vector<double>& Xtt) const {
  const std::size_t n = snap.X.size();
  SpectralField X(xgrid_);
  for (std::size_t j = 0; j < n; ++j) X.samples[j] = snap.X[j];
  const SpectralField Xxx = spectral_derivative(X, 2);
  const auto D = drive(snap.t);
  std::vector<double> r(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = snap.X[j];
    r[j] = Xtt[j] + sys_.damping * snap.Xt[j] - sys_.beta * Xxx.samples[j].real() + sys_.gamma * x -
           sys_.cubic * x * x * x - D[j];
  }
  return r;
}

std::vector<double> Ansatz::residual(const EnvelopeState& s, double t) const {
  const SpectralField A = reconstruct_A(s, env_);
  const AnsatzSnapshot snap = build(A, t);
  const auto Xtt = opt_.secondDerivative == SecondDerivative::Analytic ? Xtt_analytic(A, t)
                                                                       : Xtt_fd(s, t, fd_step());
  return residual(snap, Xtt);
}

ResidualReport compute_residual(const Ansatz& ansatz, const std::vector<EnvelopeState>& states,
                                const std::vector<double>& times) {
  if (states.size() != times.size()) throw std::invalid_argument("states and times differ in length");
  ResidualReport rep;
  rep.epsilon = ansatz.envelope().p.epsilon;
  rep.times = times;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto r = ansatz.residual(states[i], times[i]);
    rep.supRes.push_back(sup_abs(r));
  }
  return rep;
}

AnsatzConstants measure_constants(const std::vector<RunSummary>& runs) {
  AnsatzConstants c;
  if (runs.empty()) return c;
  std::vector<RunSummary> sorted = runs;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
  c.epsMax = sorted.front().epsilon;
  c.epsMin = sorted.back().epsilon;
  std::vector<double> cr;
  for (const auto& r : sorted) {
    c.CX = std::max(c.CX, r.supXandXt / r.epsilon);
    const double v = r.supRes / std::pow(r.epsilon, 4);
    cr.push_back(v);
    c.CR = std::max(c.CR, v);
  }
  if (cr.size() >= 2 && cr.front() > 0) {
    bool increasing = true;
    for (std::size_t i = 1; i < cr.size(); ++i) increasing = increasing && cr[i] > cr[i - 1];
    if (increasing && cr.back() > 2 * cr.front())
      c.warnings.push_back("C_R grows monotonically by more than 2x as epsilon decreases");
  }
  return c;
}

}  // namespace envjust
