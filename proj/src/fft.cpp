#include "osmloc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "osmloc/error.hpp"
#include "osmloc/geo.hpp"
#include "osmloc/simd/kernels.hpp"

namespace osmloc {

int next_pow2(int v) {
  int n = 1;
  while (n < v) n <<= 1;
  return n;
}

void ComplexPlane::clear() {
  std::fill(re.begin(), re.end(), 0.0f);
  std::fill(im.begin(), im.end(), 0.0f);
}

Fft2d::Fft2d(int side) : n_(side) {
  if (side < 1 || (side & (side - 1)) != 0) {
    throw InvariantError("FFT side must be a power of two");
  }
  log2n_ = 0;
  while ((1 << log2n_) < side) ++log2n_;

  bitrev_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    int r = 0;
    for (int b = 0; b < log2n_; ++b) r |= ((i >> b) & 1) << (log2n_ - 1 - b);
    bitrev_[i] = r;
  }

  stage_off_.resize(log2n_ + 1, 0);
  int total = 0;
  for (int s = 1; s <= log2n_; ++s) {
    stage_off_[s] = total;
    total += (1 << s) / 2;
  }
  tw_re_.resize(total);
  tw_im_.resize(total);
  for (int s = 1; s <= log2n_; ++s) {
    const int len = 1 << s;
    for (int j = 0; j < len / 2; ++j) {
      const double ang = -2.0 * kPi * j / len;
      tw_re_[stage_off_[s] + j] = static_cast<float>(std::cos(ang));
      tw_im_[stage_off_[s] + j] = static_cast<float>(std::sin(ang));
    }
  }
}

void Fft2d::pass_cols(float* re, float* im, bool inv, int active_cols) const {
  const std::size_t w = static_cast<std::size_t>(n_);
  const std::size_t ac = static_cast<std::size_t>(active_cols);

  // Bit-reversal permutation of rows.
  std::vector<float> tmp(ac);
  for (int r = 0; r < n_; ++r) {
    const int s = bitrev_[r];
    if (s > r) {
      std::memcpy(tmp.data(), re + r * w, ac * sizeof(float));
      std::memcpy(re + r * w, re + s * w, ac * sizeof(float));
      std::memcpy(re + s * w, tmp.data(), ac * sizeof(float));
      std::memcpy(tmp.data(), im + r * w, ac * sizeof(float));
      std::memcpy(im + r * w, im + s * w, ac * sizeof(float));
      std::memcpy(im + s * w, tmp.data(), ac * sizeof(float));
    }
  }

  for (int s = 1; s <= log2n_; ++s) {
    const int len = 1 << s;
    const int half = len / 2;
    const float* wre = tw_re_.data() + stage_off_[s];
    const float* wim = tw_im_.data() + stage_off_[s];
    for (int base = 0; base < n_; base += len) {
      for (int j = 0; j < half; ++j) {
        const std::size_t a = static_cast<std::size_t>(base + j) * w;
        const std::size_t b = static_cast<std::size_t>(base + j + half) * w;
        simd::fft_bfly_f32(re + a, im + a, re + b, im + b,
                           wre[j], inv ? -wim[j] : wim[j], ac);
      }
    }
  }
}

void Fft2d::transpose(ComplexPlane& p) {
  const int n = p.n;
  constexpr int kBlock = 32;
  for (float* plane : {p.re.data(), p.im.data()}) {
    for (int bi = 0; bi < n; bi += kBlock) {
      const int ei = std::min(bi + kBlock, n);
      for (int bj = bi; bj < n; bj += kBlock) {
        const int ej = std::min(bj + kBlock, n);
        for (int i = bi; i < ei; ++i) {
          const int j0 = std::max(bj, i + 1);
          for (int j = j0; j < ej; ++j) {
            std::swap(plane[static_cast<std::size_t>(i) * n + j],
                      plane[static_cast<std::size_t>(j) * n + i]);
          }
        }
      }
    }
  }
}

void Fft2d::forward(ComplexPlane& p, int active_rows) const {
  if (p.n != n_) throw InvariantError("plane size does not match FFT plan");
  if (active_rows < 0 || active_rows > n_) active_rows = n_;
  // Row transforms (as column transforms of the transpose), then column
  // transforms. All-zero tail rows transform to zero and are skipped.
  transpose(p);
  pass_cols(p.re.data(), p.im.data(), false, active_rows);
  transpose(p);
  pass_cols(p.re.data(), p.im.data(), false, n_);
}

void Fft2d::inverse(ComplexPlane& p) const {
  if (p.n != n_) throw InvariantError("plane size does not match FFT plan");
  transpose(p);
  pass_cols(p.re.data(), p.im.data(), true, n_);
  transpose(p);
  pass_cols(p.re.data(), p.im.data(), true, n_);
  const float scale = 1.0f / (static_cast<float>(n_) * static_cast<float>(n_));
  for (std::size_t i = 0; i < p.re.size(); ++i) {
    p.re[i] *= scale;
    p.im[i] *= scale;
  }
}

}  // namespace osmloc
