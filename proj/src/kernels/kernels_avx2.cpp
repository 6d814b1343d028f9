// Compiled with -mavx2 -mfma -ffp-contract=off; only called after a runtime
// CPU check. Two complex doubles per 256-bit register.

#include <immintrin.h>

#include "envjust/kernels.hpp"

namespace envjust::kernels::avx2 {

namespace {

inline double* raw(std::span<cdouble> s) { return reinterpret_cast<double*>(s.data()); }
inline const double* raw(std::span<const cdouble> s) {
  return reinterpret_cast<const double*>(s.data());
}

// [m0, m0, m1, m1] from two consecutive per-mode coefficients.
inline __m256d dup_pairs(const double* m) {
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(m)), 0b01010000);
}

inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d bre = _mm256_movedup_pd(b);
  const __m256d bim = _mm256_permute_pd(b, 0b1111);
  const __m256d asw = _mm256_permute_pd(a, 0b0101);
  return _mm256_addsub_pd(_mm256_mul_pd(a, bre), _mm256_mul_pd(asw, bim));
}

// |w|^2 broadcast to both lanes of each complex.
inline __m256d norm2(__m256d w) {
  const __m256d sq = _mm256_mul_pd(w, w);
  return _mm256_hadd_pd(sq, sq);
}

inline __m256d rhs(__m256d phi, __m256d eta, __m256d eta2, __m256d g, __m256d signs) {
  const __m256d w = _mm256_add_pd(phi, eta);
  const __m256d s = _mm256_mul_pd(g, _mm256_sub_pd(norm2(w), eta2));
  const __m256d t = _mm256_mul_pd(s, w);
  return _mm256_mul_pd(_mm256_permute_pd(t, 0b0101), signs);
}

}  // namespace

void complex_multiply(std::span<cdouble> a, std::span<const cdouble> b) {
  const std::size_t n = a.size(), pairs = n / 2;
  double* pa = raw(a);
  const double* pb = raw(b);
  for (std::size_t i = 0; i < pairs; ++i) {
    const __m256d va = _mm256_loadu_pd(pa + 4 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 4 * i);
    _mm256_storeu_pd(pa + 4 * i, cmul(va, vb));
  }
  if (n % 2) scalar::complex_multiply(a.subspan(n - 1), b.subspan(n - 1));
}

void oscillator_apply(std::span<cdouble> u, std::span<cdouble> p, const OscillatorTable& m) {
  const std::size_t n = u.size(), pairs = n / 2;
  double* pu = raw(u);
  double* pp = raw(p);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t j = 2 * i;
    const __m256d vu = _mm256_loadu_pd(pu + 4 * i);
    const __m256d vp = _mm256_loadu_pd(pp + 4 * i);
    const __m256d a = dup_pairs(m.m00.data() + j), b = dup_pairs(m.m01.data() + j);
    const __m256d c = dup_pairs(m.m10.data() + j), d = dup_pairs(m.m11.data() + j);
    _mm256_storeu_pd(pu + 4 * i, _mm256_add_pd(_mm256_mul_pd(a, vu), _mm256_mul_pd(b, vp)));
    _mm256_storeu_pd(pp + 4 * i, _mm256_add_pd(_mm256_mul_pd(c, vu), _mm256_mul_pd(d, vp)));
  }
  if (n % 2) {
    const std::size_t k = n - 1;
    OscillatorTable tail{m.m00.subspan(k), m.m01.subspan(k), m.m10.subspan(k), m.m11.subspan(k)};
    scalar::oscillator_apply(u.subspan(k), p.subspan(k), tail);
  }
}

void cube_real(std::span<const cdouble> u, std::span<cdouble> out, double coef) {
  const std::size_t n = u.size(), pairs = n / 2;
  const double* pu = raw(u);
  double* po = raw(out);
  const __m256d vc = _mm256_set1_pd(coef);
  // Zero the imaginary lanes: keep lanes 0 and 2.
  const __m256d realMask = _mm256_castsi256_pd(_mm256_set_epi64x(0, -1, 0, -1));
  for (std::size_t i = 0; i < pairs; ++i) {
    const __m256d x = _mm256_and_pd(_mm256_loadu_pd(pu + 4 * i), realMask);
    const __m256d x3 = _mm256_mul_pd(_mm256_mul_pd(x, x), x);
    _mm256_storeu_pd(po + 4 * i, _mm256_and_pd(_mm256_mul_pd(vc, x3), realMask));
  }
  if (n % 2) scalar::cube_real(u.subspan(n - 1), out.subspan(n - 1), coef);
}

void nls_rk4(std::span<cdouble> phi, std::span<const cdouble> eta, double g, double dt) {
  const std::size_t n = phi.size(), pairs = n / 2;
  double* pp = raw(phi);
  const double* pe = raw(eta);
  const __m256d vg = _mm256_set1_pd(g);
  const __m256d half = _mm256_set1_pd(0.5 * dt), full = _mm256_set1_pd(dt);
  const __m256d sixth = _mm256_set1_pd(dt / 6.0), two = _mm256_set1_pd(2.0);
  const __m256d signs = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
  for (std::size_t i = 0; i < pairs; ++i) {
    const __m256d p = _mm256_loadu_pd(pp + 4 * i);
    const __m256d e = _mm256_loadu_pd(pe + 4 * i);
    const __m256d e2 = norm2(e);
    const __m256d k1 = rhs(p, e, e2, vg, signs);
    const __m256d k2 = rhs(_mm256_add_pd(p, _mm256_mul_pd(half, k1)), e, e2, vg, signs);
    const __m256d k3 = rhs(_mm256_add_pd(p, _mm256_mul_pd(half, k2)), e, e2, vg, signs);
    const __m256d k4 = rhs(_mm256_add_pd(p, _mm256_mul_pd(full, k3)), e, e2, vg, signs);
    __m256d acc = _mm256_add_pd(k1, _mm256_mul_pd(two, k2));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(two, k3));
    acc = _mm256_add_pd(acc, k4);
    _mm256_storeu_pd(pp + 4 * i, _mm256_add_pd(p, _mm256_mul_pd(sixth, acc)));
  }
  if (n % 2) scalar::nls_rk4(phi.subspan(n - 1), eta.subspan(n - 1), g, dt);
}

}  // namespace envjust::kernels::avx2
