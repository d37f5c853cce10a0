#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace osmloc::simd::neon {

float dot_f32(const float* a, const float* b, std::size_t n) {
  float32x4_t acc = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = vfmaq_f32(acc, vld1q_f32(a + i), vld1q_f32(b + i));
  }
  float tail = vaddvq_f32(acc);
  for (; i < n; ++i) tail += a[i] * b[i];
  return tail;
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  const float32x4_t va = vdupq_n_f32(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

float sqdist_f32(const float* a, const float* b, std::size_t n) {
  float32x4_t acc = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t d = vsubq_f32(vld1q_f32(a + i), vld1q_f32(b + i));
    acc = vfmaq_f32(acc, d, d);
  }
  float tail = vaddvq_f32(acc);
  for (; i < n; ++i) {
    const float d = a[i] - b[i];
    tail += d * d;
  }
  return tail;
}

void fft_bfly_f32(float* are, float* aim, float* bre, float* bim,
                  float wre, float wim, std::size_t n) {
  const float32x4_t vwre = vdupq_n_f32(wre);
  const float32x4_t vwim = vdupq_n_f32(wim);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t br = vld1q_f32(bre + i);
    const float32x4_t bi = vld1q_f32(bim + i);
    const float32x4_t tr = vfmsq_f32(vmulq_f32(br, vwre), bi, vwim);
    const float32x4_t ti = vfmaq_f32(vmulq_f32(bi, vwre), br, vwim);
    const float32x4_t ar = vld1q_f32(are + i);
    const float32x4_t ai = vld1q_f32(aim + i);
    vst1q_f32(bre + i, vsubq_f32(ar, tr));
    vst1q_f32(bim + i, vsubq_f32(ai, ti));
    vst1q_f32(are + i, vaddq_f32(ar, tr));
    vst1q_f32(aim + i, vaddq_f32(ai, ti));
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
  for (; i + 4 <= n; i += 4) {
    const float32x4_t mr = vld1q_f32(m_re + i);
    const float32x4_t mi = vld1q_f32(m_im + i);
    const float32x4_t tr = vld1q_f32(t_re + i);
    const float32x4_t ti = vld1q_f32(t_im + i);
    float32x4_t ar = vld1q_f32(acc_re + i);
    float32x4_t ai = vld1q_f32(acc_im + i);
    ar = vaddq_f32(ar, vfmaq_f32(vmulq_f32(mr, tr), mi, ti));
    ai = vaddq_f32(ai, vfmsq_f32(vmulq_f32(mi, tr), mr, ti));
    vst1q_f32(acc_re + i, ar);
    vst1q_f32(acc_im + i, ai);
  }
  for (; i < n; ++i) {
    acc_re[i] += m_re[i] * t_re[i] + m_im[i] * t_im[i];
    acc_im[i] += m_im[i] * t_re[i] - m_re[i] * t_im[i];
  }
}

}  // namespace osmloc::simd::neon

#endif  // __aarch64__
