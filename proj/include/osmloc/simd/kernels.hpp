#pragma once

#include <cstddef>

// Data-parallel inner loops behind the BEV lift, the dense pose scorer and
// the FFT backend. Every kernel has a scalar reference implementation in
// simd::ref and optional vectorized variants selected once at startup from
// the CPU capabilities (override with OSMLOC_SIMD=scalar|avx2|neon).
namespace osmloc::simd {

namespace ref {

float dot_f32(const float* a, const float* b, std::size_t n);
// y += a * x
void axpy_f32(float a, const float* x, float* y, std::size_t n);
// sum of squared differences
float sqdist_f32(const float* a, const float* b, std::size_t n);
// Radix-2 butterfly across two rows of planar complex data:
//   (a, b) -> (a + w*b, a - w*b)
void fft_bfly_f32(float* are, float* aim, float* bre, float* bim,
                  float wre, float wim, std::size_t n);
// acc += m * conj(t), planar complex
void cmul_conj_acc_f32(float* acc_re, float* acc_im,
                       const float* m_re, const float* m_im,
                       const float* t_re, const float* t_im, std::size_t n);

}  // namespace ref

extern float (*dot_f32)(const float* a, const float* b, std::size_t n);
extern void (*axpy_f32)(float a, const float* x, float* y, std::size_t n);
extern float (*sqdist_f32)(const float* a, const float* b, std::size_t n);
extern void (*fft_bfly_f32)(float* are, float* aim, float* bre, float* bim,
                            float wre, float wim, std::size_t n);
extern void (*cmul_conj_acc_f32)(float* acc_re, float* acc_im,
                                 const float* m_re, const float* m_im,
                                 const float* t_re, const float* t_im, std::size_t n);

// Name of the active variant ("scalar", "avx2", "neon").
const char* active_backend();

// Re-runs selection. name == nullptr or "auto" picks the best supported
// variant; an explicitly requested unsupported variant falls back to scalar.
void select_backend(const char* name);

}  // namespace osmloc::simd
