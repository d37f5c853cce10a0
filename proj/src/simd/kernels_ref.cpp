#include "osmloc/simd/kernels.hpp"

namespace osmloc::simd::ref {

float dot_f32(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

float sqdist_f32(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    const float d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void fft_bfly_f32(float* are, float* aim, float* bre, float* bim,
                  float wre, float wim, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) {
    acc_re[i] += m_re[i] * t_re[i] + m_im[i] * t_im[i];
    acc_im[i] += m_im[i] * t_re[i] - m_re[i] * t_im[i];
  }
}

}  // namespace osmloc::simd::ref
