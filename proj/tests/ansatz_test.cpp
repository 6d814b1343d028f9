#include <doctest.h>

#include <cmath>

#include "envjust/ansatz.hpp"
#include "envjust/spectral.hpp"

using namespace envjust;

namespace {

struct Setup {
  ModelParams p;
  DerivedParams d;
  CarrierGrid cg;
  EnvelopeModel env;
  CarrierSystem sys;
};

Setup make_setup(const ModelParams& p, double slowLength = 40) {
  Setup s;
  s.p = p;
  s.d = compute_derived(p);
  GridRequest req;
  req.targetLength = slowLength / (p.epsilon * s.d.c);
  s.cg = make_commensurate_grid(p, s.d, req);
  s.env = make_envelope_model(p, s.d, make_envelope_grid(s.cg, p, s.d), s.cg.backgroundMode);
  s.sys = phi4_system(p, s.d, s.cg);
  return s;
}

SpectralField constant(const GridPtr& g, cdouble a) {
  SpectralField f(g);
  for (auto& v : f.samples) v = a;
  return f;
}

double sup(const std::vector<double>& v) { return sup_norm(std::span<const double>(v)); }

}  // namespace

TEST_CASE("zero envelope gives zero ansatz") {
  ModelParams p;
  p.h = 0;
  const Setup s = make_setup(p);
  const Ansatz an(s.env, s.sys);
  const SpectralField A(s.env.grid);
  const AnsatzSnapshot snap = an.build(A, 3.0);
  CHECK(sup(snap.X) == 0.0);
  CHECK(sup(snap.Xt) == 0.0);
  const EnvelopeState st{0.0, A, 0};
  CHECK(sup(an.residual(st, 0.0)) == 0.0);
}

TEST_CASE("constant envelope gives the two harmonics") {
  ModelParams p;
  const Setup s = make_setup(p);
  const Ansatz an(s.env, s.sys);
  const double a = 0.4, t = 1.7, eps = p.epsilon;
  CHECK(an.third_harmonic_coefficient() == doctest::Approx(-p.lambda * eps * eps * eps / (8 * p.gamma)));
  const AnsatzSnapshot snap = an.build_X(constant(s.env.grid, a), t);
  const double b = an.third_harmonic_coefficient();
  double err = 0;
  for (std::size_t j = 0; j < snap.X.size(); ++j) {
    const double th = p.k * s.cg.grid->x(j) - s.d.omega * t;
    err = std::max(err, std::fabs(snap.X[j] - (2 * eps * a * std::cos(th) + 2 * b * a * a * a * std::cos(3 * th))));
  }
  CHECK(err < 1e-14);

  AnsatzOptions off;
  off.thirdHarmonic = false;
  CHECK(Ansatz(s.env, s.sys, off).third_harmonic_coefficient() == 0.0);
}

TEST_CASE("plane-wave envelope time derivative in closed form") {
  ModelParams p;
  p.alpha = 0;
  p.lambda = 0;
  p.h = 0;
  const Setup s = make_setup(p);
  const Ansatz an(s.env, s.sys);
  const double mu = s.env.grid->fundamental() * 3, eps = p.epsilon, c = s.d.c, v = s.d.v, w = s.d.omega;
  SpectralField A(s.env.grid);
  for (std::size_t j = 0; j < A.size(); ++j) A.samples[j] = std::polar(1.0, mu * s.env.grid->x(j));
  const double t = 2.3;
  AnsatzSnapshot snap;
  an.build_Xt(A, t, snap);
  // A = exp(i mu xi) now, A_tau = -i mu^2 A, xi = eps c (x - v t), tau = eps^2 t.
  double err = 0;
  for (std::size_t j = 0; j < snap.Xt.size(); ++j) {
    const double x = s.cg.grid->x(j);
    const double phase = mu * eps * c * (x - v * t) + p.k * x - w * t;
    const double rate = -mu * eps * c * v - mu * mu * eps * eps - w;
    err = std::max(err, std::fabs(snap.Xt[j] + 2 * eps * rate * std::sin(phase)));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("second time derivative: differences against the analytic form") {
  ModelParams p;
  p.epsilon = 0.2;
  const Setup s = make_setup(p);
  const SpectralField phi0 = gaussian(s.env.grid, 0.3, 0.5 * s.env.grid->length, 2.0);
  const EnvelopeState st{0.0, phi0, 0};
  const SpectralField A = reconstruct_A(st, s.env);
  const double t = 0.0;
  AnsatzOptions o;
  const Ansatz an(s.env, s.sys, o);
  const auto exact = an.Xtt_analytic(A, t);
  std::vector<double> errs;
  for (double delta : {0.4, 0.2, 0.1, an.fd_step()}) {
    const auto fd = an.Xtt_fd(st, t, delta);
    double e = 0;
    for (std::size_t j = 0; j < fd.size(); ++j) e = std::max(e, std::fabs(fd[j] - exact[j]));
    errs.push_back(e);
  }
  MESSAGE("Xtt differences " << errs[0] << " " << errs[1] << " " << errs[2] << " " << errs[3]);
  CHECK(std::log2(errs[0] / errs[1]) > 3.5);
  CHECK(std::log2(errs[1] / errs[2]) > 3.5);
  CHECK(errs[3] < 1e-7 * sup(exact));
}

TEST_CASE("residual without drive vanishes for zero data and is small for an envelope") {
  ModelParams p;
  const Setup s = make_setup(p);
  const Ansatz an(s.env, s.sys);
  const SpectralField phi0 = gaussian(s.env.grid, 0.2, 0.5 * s.env.grid->length, 2.0);
  const auto res = an.residual(EnvelopeState{0.0, phi0, 0}, 0.0);
  const double eps = p.epsilon;
  CHECK(sup(res) < eps * eps * eps);
}

TEST_CASE("grid mismatch is rejected") {
  ModelParams p;
  Setup s = make_setup(p);
  s.env.grid = make_grid(s.env.grid->length * 1.1, s.env.grid->count);
  CHECK_THROWS_AS(Ansatz(s.env, s.sys), GridError);
}

TEST_CASE("residual report and constants") {
  ModelParams p;
  const Setup s = make_setup(p);
  const Ansatz an(s.env, s.sys);
  CHECK_THROWS(compute_residual(an, {}, {1.0}));

  const AnsatzConstants zero = measure_constants({{0.2, 0, 0}, {0.1, 0, 0}});
  CHECK(zero.CX == 0.0);
  CHECK(zero.CR == 0.0);

  const AnsatzConstants c = measure_constants({{0.2, 0.4, 2 * 0.0016}, {0.1, 0.25, 3 * 1e-4}, {0.05, 0.1, 4 * 6.25e-6}});
  CHECK(c.CX == doctest::Approx(2.5));
  CHECK(c.CR == doctest::Approx(4.0));
  CHECK(c.epsMin == 0.05);
  CHECK(c.warnings.empty());

  const AnsatzConstants g = measure_constants({{0.2, 1, 1 * 0.0016}, {0.1, 1, 2.5 * 1e-4}, {0.05, 1, 5 * 6.25e-6}});
  CHECK(g.warnings.size() == 1);
}
