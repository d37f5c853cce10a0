#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

// AVX2+FMA variants of the hot kernels. Compiled with -mavx2 -mfma; only
// reachable when the dispatcher has verified CPU support at runtime.
namespace osmloc::simd::avx2 {

namespace {
inline float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  return _mm_cvtss_f32(lo);
}
}  // namespace

float dot_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
  }
  float tail = 0.0f;
  for (; i < n; ++i) tail += a[i] * b[i];
  return hsum256(acc) + tail;
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    vy = _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), vy);
    _mm256_storeu_ps(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

float sqdist_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
    acc = _mm256_fmadd_ps(d, d, acc);
  }
  float tail = 0.0f;
  for (; i < n; ++i) {
    const float d = a[i] - b[i];
    tail += d * d;
  }
  return hsum256(acc) + tail;
}

void fft_bfly_f32(float* are, float* aim, float* bre, float* bim,
                  float wre, float wim, std::size_t n) {
  const __m256 vwre = _mm256_set1_ps(wre);
  const __m256 vwim = _mm256_set1_ps(wim);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 br = _mm256_loadu_ps(bre + i);
    const __m256 bi = _mm256_loadu_ps(bim + i);
    const __m256 tr = _mm256_fmsub_ps(br, vwre, _mm256_mul_ps(bi, vwim));
    const __m256 ti = _mm256_fmadd_ps(br, vwim, _mm256_mul_ps(bi, vwre));
    const __m256 ar = _mm256_loadu_ps(are + i);
    const __m256 ai = _mm256_loadu_ps(aim + i);
    _mm256_storeu_ps(bre + i, _mm256_sub_ps(ar, tr));
    _mm256_storeu_ps(bim + i, _mm256_sub_ps(ai, ti));
    _mm256_storeu_ps(are + i, _mm256_add_ps(ar, tr));
    _mm256_storeu_ps(aim + i, _mm256_add_ps(ai, ti));
  }
  for (; i < n; ++i) {
    const float tr = bre[i] * wre - bim[i] * wim;
    const float ti = bre[i] * wim + bim[i] * wre;
    bre[i] = are[i] - tr;
    bim[i] = aim[i] - ti;
    are[i] += tr;
    aim[i] += ti;
  }
}

void cmul_conj_acc_f32(float* acc_re, float* acc_im,
                       const float* m_re, const float* m_im,
                       const float* t_re, const float* t_im, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 mr = _mm256_loadu_ps(m_re + i);
    const __m256 mi = _mm256_loadu_ps(m_im + i);
    const __m256 tr = _mm256_loadu_ps(t_re + i);
    const __m256 ti = _mm256_loadu_ps(t_im + i);
    __m256 ar = _mm256_loadu_ps(acc_re + i);
    __m256 ai = _mm256_loadu_ps(acc_im + i);
    ar = _mm256_add_ps(ar, _mm256_fmadd_ps(mr, tr, _mm256_mul_ps(mi, ti)));
    ai = _mm256_add_ps(ai, _mm256_fmsub_ps(mi, tr, _mm256_mul_ps(mr, ti)));
    _mm256_storeu_ps(acc_re + i, ar);
    _mm256_storeu_ps(acc_im + i, ai);
  }
  for (; i < n; ++i) {
    acc_re[i] += m_re[i] * t_re[i] + m_im[i] * t_im[i];
    acc_im[i] += m_im[i] * t_re[i] - m_re[i] * t_im[i];
  }
}

}  // namespace osmloc::simd::avx2

#endif  // x86_64
