#pragma once

// Pointwise inner loops of the split-step solvers. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2 variant; the variant is
// picked once at runtime from the CPU feature flags. Complex arrays use the
// interleaved std::complex<double> layout.

#include <complex>
#include <span>
#include <string_view>

namespace envjust::kernels {

using cdouble = std::complex<double>;

enum class Isa { Scalar, Avx2 };

bool isa_available(Isa isa);
Isa active_isa();
/// Overrides the runtime choice (tests, benchmarking). Throws if unavailable.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

/// Per-mode 2x2 real propagator for (u_hat, p_hat) pairs.
struct OscillatorTable {
  std::span<const double> m00, m01, m10, m11;
};

/// a[i] *= b[i]
void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b);

/// (u, p)[i] <- M[i] (u, p)[i]
void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m);

/// out[i] = coef * Re(u[i])^3
void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef);

/// One classical RK4 step of size dt for the pointwise ODE
///   phi' = i g (|phi + eta|^2 - |eta|^2) (phi + eta),
/// i.e. i phi' = N(phi) with N(phi) = -g [|phi + eta|^2 - |eta|^2] (phi + eta).
void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt);

namespace scalar {
void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b);
void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m);
void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef);
void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt);
}  // namespace scalar

namespace avx2 {
void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b);
void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m);
void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef);
void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt);
}  // namespace avx2

}  // namespace envjust::kernels
