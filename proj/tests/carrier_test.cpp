#include <doctest.h>

#include <cmath>
#include <numbers>

#include "checks.hpp"
#include "envjust/carrier.hpp"
#include "envjust/kernels.hpp"
#include "envjust/spectral.hpp"

using namespace envjust;
constexpr double kPi = std::numbers::pi;

namespace {

CarrierSystem linear_system(double length, std::size_t n, double damping) {
  CarrierSystem s;
  s.grid = make_grid(length, n);
  s.damping = damping;
  s.beta = 1.0;
  s.gamma = 1.0;
  s.cubic = 0.0;
  return s;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::fabs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("propagator matches the damped oscillator") {
  const double K = 1.3, d = 0.2, h = 0.7;
  const auto M = oscillator_propagator(K, d, 1.0, 1.0, h);
  const double a = 0.1, w = std::sqrt(K * K + 1 - a * a);
  // q = e^{-a t} cos(w t): q(0) = 1, q'(0) = -a.
  const double q = std::exp(-a * h) * std::cos(w * h);
  const double qp = std::exp(-a * h) * (-a * std::cos(w * h) - w * std::sin(w * h));
  CHECK(M[0] * 1 + M[1] * (-a) == doctest::Approx(q).epsilon(1e-14));
  CHECK(M[2] * 1 + M[3] * (-a) == doctest::Approx(qp).epsilon(1e-14));
  CHECK_THROWS_AS(oscillator_propagator(0, 3.0, 1.0, 1.0, h), CarrierError);
}

TEST_CASE("decaying linear mode is reproduced") {
  const double eps = 0.1, alpha = 1.0, ah = eps * eps * alpha / 2;
  const double L = 2 * kPi * 4, K = 2 * kPi * 3 / L;
  CarrierSystem sys = linear_system(L, 64, 2 * ah);
  const double wt = std::sqrt(K * K + 1 - ah * ah);
  std::vector<double> u0(64), ut0(64);
  for (std::size_t j = 0; j < 64; ++j) {
    const double x = sys.grid->x(j);
    u0[j] = std::cos(K * x);
    ut0[j] = -ah * std::cos(K * x) + wt * std::sin(K * x);
  }
  const double period = 2 * kPi / wt;
  std::vector<double> ts;
  for (int i = 1; i <= 8; ++i) ts.push_back(period * i / 8);
  const auto states = evolve_carrier(u0, ut0, sys, ts, period / 50);
  for (const auto& s : states) {
    double err = 0;
    for (std::size_t j = 0; j < 64; ++j)
      err = std::max(err, std::fabs(s.u[j] - std::exp(-ah * s.t) * std::cos(K * sys.grid->x(j) - wt * s.t)));
    CHECK(err < 1e-8);
  }
}

TEST_CASE("zero data without drive stays zero") {
  CarrierSystem sys = linear_system(10, 32, 0.01);
  sys.cubic = -1;
  const auto st = evolve_carrier(std::vector<double>(32), std::vector<double>(32), sys, {1.0, 5.0}, 0.05);
  for (const auto& s : st) CHECK(sup_norm(std::span<const double>(s.u)) == 0.0);
}

TEST_CASE("driven mode stays on its particular solution") {
  CarrierSystem sys = linear_system(2 * kPi * 5, 64, 0.02);
  sys.drive = {3, 0.9, 0.05};
  const double q = sys.grid->fundamental() * 3, W = 0.9;
  const double w02 = q * q + 1;
  const cdouble C = 2 * 0.05 / cdouble(w02 - W * W, -0.02 * W);
  auto u_at = [&](double t, double x) { return (C * std::polar(1.0, q * x - W * t)).real(); };
  auto ut_at = [&](double t, double x) { return (cdouble(0, -W) * C * std::polar(1.0, q * x - W * t)).real(); };
  std::vector<double> u0(64), ut0(64);
  for (std::size_t j = 0; j < 64; ++j) u0[j] = u_at(0, sys.grid->x(j)), ut0[j] = ut_at(0, sys.grid->x(j));
  // The drive enters as a kick between oscillator half steps: exact in the limit, second order.
  std::vector<double> errs;
  for (double dt : {0.1, 0.05, 0.01}) {
    const auto st = evolve_carrier(u0, ut0, sys, {17.0}, dt);
    double err = 0;
    for (std::size_t j = 0; j < 64; ++j) err = std::max(err, std::fabs(st.back().u[j] - u_at(17.0, sys.grid->x(j))));
    errs.push_back(err);
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(errs[2] < 1e-6);
}

TEST_CASE("uniform source against a fine ODE solve") {
  CarrierSystem sys = linear_system(6, 16, 0.1);
  sys.source = [](double t, std::span<double> out) {
    for (double& v : out) v = std::sin(2 * t);
  };
  const auto st = evolve_carrier(std::vector<double>(16), std::vector<double>(16), sys, {4.0}, 1e-3);
  // q'' + 0.1 q' + q = sin 2t with RK4 at a much finer step.
  double q = 0, p = 0, t = 0;
  const double h = 1e-4;
  auto f = [](double tt, double qq, double pp) { return std::sin(2 * tt) - 0.1 * pp - qq; };
  for (int i = 0; i < 40000; ++i) {
    const double k1q = p, k1p = f(t, q, p);
    const double k2q = p + 0.5 * h * k1p, k2p = f(t + 0.5 * h, q + 0.5 * h * k1q, p + 0.5 * h * k1p);
    const double k3q = p + 0.5 * h * k2p, k3p = f(t + 0.5 * h, q + 0.5 * h * k2q, p + 0.5 * h * k2p);
    const double k4q = p + h * k3p, k4p = f(t + h, q + h * k3q, p + h * k3p);
    q += h * (k1q + 2 * k2q + 2 * k3q + k4q) / 6;
    p += h * (k1p + 2 * k2p + 2 * k3p + k4p) / 6;
    t += h;
  }
  for (double v : st.back().u) CHECK(v == doctest::Approx(q).epsilon(1e-6));
}

TEST_CASE("temporal self-convergence is second order") {
  const double order = checks::carrier_order(0.1, 20);
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}

TEST_CASE("linear energy decays") {
  CarrierSystem sys = linear_system(20, 64, 0.05);
  std::vector<double> u0(64), ut0(64);
  for (std::size_t j = 0; j < 64; ++j) u0[j] = 1e-3 * std::exp(-std::pow(sys.grid->x(j) - 10, 2));
  std::vector<double> ts;
  for (int i = 1; i <= 40; ++i) ts.push_back(2.0 * i);
  const auto st = evolve_carrier(u0, ut0, sys, ts, 0.05);
  // Averages over windows of several oscillation periods decrease.
  double prev = 1e300;
  for (std::size_t w = 0; w + 8 <= st.size(); w += 8) {
    double avg = 0;
    for (std::size_t i = w; i < w + 8; ++i) avg += linear_energy(st[i], 1, 1);
    CHECK(avg < prev);
    prev = avg;
  }
}

TEST_CASE("kernel variants give the same carrier run") {
  if (!kernels::isa_available(kernels::Isa::Avx2)) return;
  CarrierSystem sys = linear_system(2 * kPi * 4, 128, 0.01);
  sys.cubic = -1;
  sys.drive = {2, 1.1, 0.01};
  std::vector<double> u0(128), ut0(128);
  for (std::size_t j = 0; j < 128; ++j) u0[j] = 0.3 * std::cos(sys.grid->fundamental() * 4 * sys.grid->x(j));
  const auto before = kernels::active_isa();
  kernels::force_isa(kernels::Isa::Scalar);
  const auto a = evolve_carrier(u0, ut0, sys, {10.0}, 0.02);
  kernels::force_isa(kernels::Isa::Avx2);
  const auto b = evolve_carrier(u0, ut0, sys, {10.0}, 0.02);
  kernels::force_isa(before);
  CHECK(sup_diff(a.back().u, b.back().u) < 1e-12);
}
