#include <atomic>
#include <stdexcept>

#include "envjust/kernels.hpp"

namespace envjust::kernels {

#if !ENVJUST_HAVE_AVX2
namespace avx2 {
// Never selected: isa_available(Avx2) is false in this build.
void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b) {
  scalar::complex_multiply(a, b);
}
void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m) {
  scalar::oscillator_apply(u, p, m);
}
void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef) {
  scalar::cube_real(u, out, coef);
}
void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt) {
  scalar::nls_rk4(phi, eta, g, dt);
}
}  // namespace avx2
#endif

namespace {

Isa detect() {
#if ENVJUST_HAVE_AVX2 && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

bool isa_available(Isa isa) { return isa == Isa::Scalar || detect() == Isa::Avx2; }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw std::runtime_error("requested instruction set is not available");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b) {
  if (active_isa() == Isa::Avx2)
    avx2::complex_multiply(a, b);
  else
    scalar::complex_multiply(a, b);
}

void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m) {
  if (active_isa() == Isa::Avx2)
    avx2::oscillator_apply(u, p, m);
  else
    scalar::oscillator_apply(u, p, m);
}

void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef) {
  if (active_isa() == Isa::Avx2)
    avx2::cube_real(u, out, coef);
  else
    scalar::cube_real(u, out, coef);
}

void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt) {
  if (active_isa() == Isa::Avx2)
    avx2::nls_rk4(phi, eta, g, dt);
  else
    scalar::nls_rk4(phi, eta, g, dt);
}

}  // namespace envjust::kernels
