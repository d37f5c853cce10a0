#include "osmloc/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace osmloc::simd {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
float dot_f32(const float*, const float*, std::size_t);
void axpy_f32(float, const float*, float*, std::size_t);
float sqdist_f32(const float*, const float*, std::size_t);
void fft_bfly_f32(float*, float*, float*, float*, float, float, std::size_t);
void cmul_conj_acc_f32(float*, float*, const float*, const float*,
                       const float*, const float*, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
float dot_f32(const float*, const float*, std::size_t);
void axpy_f32(float, const float*, float*, std::size_t);
float sqdist_f32(const float*, const float*, std::size_t);
void fft_bfly_f32(float*, float*, float*, float*, float, float, std::size_t);
void cmul_conj_acc_f32(float*, float*, const float*, const float*,
                       const float*, const float*, std::size_t);
}  // namespace neon
#endif

float (*dot_f32)(const float*, const float*, std::size_t) = ref::dot_f32;
void (*axpy_f32)(float, const float*, float*, std::size_t) = ref::axpy_f32;
float (*sqdist_f32)(const float*, const float*, std::size_t) = ref::sqdist_f32;
void (*fft_bfly_f32)(float*, float*, float*, float*, float, float, std::size_t) =
    ref::fft_bfly_f32;
void (*cmul_conj_acc_f32)(float*, float*, const float*, const float*,
                          const float*, const float*, std::size_t) = ref::cmul_conj_acc_f32;

namespace {

const char* g_backend = "scalar";

void use_scalar() {
  dot_f32 = ref::dot_f32;
  axpy_f32 = ref::axpy_f32;
  sqdist_f32 = ref::sqdist_f32;
  fft_bfly_f32 = ref::fft_bfly_f32;
  cmul_conj_acc_f32 = ref::cmul_conj_acc_f32;
  g_backend = "scalar";
}

#if defined(__x86_64__) || defined(_M_X64)
bool cpu_has_avx2() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

void use_avx2() {
  dot_f32 = avx2::dot_f32;
  axpy_f32 = avx2::axpy_f32;
  sqdist_f32 = avx2::sqdist_f32;
  fft_bfly_f32 = avx2::fft_bfly_f32;
  cmul_conj_acc_f32 = avx2::cmul_conj_acc_f32;
  g_backend = "avx2";
}
#endif

#if defined(__aarch64__)
void use_neon() {
  dot_f32 = neon::dot_f32;
  axpy_f32 = neon::axpy_f32;
  sqdist_f32 = neon::sqdist_f32;
  fft_bfly_f32 = neon::fft_bfly_f32;
  cmul_conj_acc_f32 = neon::cmul_conj_acc_f32;
  g_backend = "neon";
}
#endif

struct AutoSelect {
  AutoSelect() { select_backend(std::getenv("OSMLOC_SIMD")); }
} auto_select;

}  // namespace

const char* active_backend() { return g_backend; }

void select_backend(const char* name) {
  const bool auto_pick = name == nullptr || std::strcmp(name, "auto") == 0;
#if defined(__x86_64__) || defined(_M_X64)
  if ((auto_pick || std::strcmp(name, "avx2") == 0) && cpu_has_avx2()) {
    use_avx2();
    return;
  }
#endif
#if defined(__aarch64__)
  if (auto_pick || std::strcmp(name, "neon") == 0) {
    use_neon();
    return;
  }
#endif
  (void)auto_pick;
  use_scalar();
}

}  // namespace osmloc::simd
