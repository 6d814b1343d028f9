#include "envjust/kernels.hpp"

namespace envjust::kernels::scalar {

void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    a[i] = {ar * br - ai * bi, ai * br + ar * bi};
  }
}

void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const cdouble ui = u[i], pi = p[i];
    u[i] = {m.m00[i] * ui.real() + m.m01[i] * pi.real(), m.m00[i] * ui.imag() + m.m01[i] * pi.imag()};
    p[i] = {m.m10[i] * ui.real() + m.m11[i] * pi.real(), m.m10[i] * ui.imag() + m.m11[i] * pi.imag()};
  }
}

void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = u[i].real();
    out[i] = {coef * (x * x * x), 0.0};
  }
}

namespace {

struct C {
  double re, im;
};

inline C rhs(C phi, C eta, double eta2, double g) {
  const double wr = phi.re + eta.re, wi = phi.im + eta.im;
  const double s = g * ((wr * wr + wi * wi) - eta2);
  // i * s * w
  return {-(s * wi), s * wr};
}

}  // namespace

void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt) {
  const double half = 0.5 * dt, sixth = dt / 6.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const C p{phi[i].real(), phi[i].imag()};
    const C e{eta[i].real(), eta[i].imag()};
    const double e2 = e.re * e.re + e.im * e.im;
    const C k1 = rhs(p, e, e2, g);
    const C k2 = rhs({p.re + half * k1.re, p.im + half * k1.im}, e, e2, g);
    const C k3 = rhs({p.re + half * k2.re, p.im + half * k2.im}, e, e2, g);
    const C k4 = rhs({p.re + dt * k3.re, p.im + dt * k3.im}, e, e2, g);
    phi[i] = {p.re + sixth * (k1.re + 2.0 * k2.re + 2.0 * k3.re + k4.re),
              p.im + sixth * (k1.im + 2.0 * k2.im + 2.0 * k3.im + k4.im)};
  }
}

}  // namespace envjust::kernels::scalar
