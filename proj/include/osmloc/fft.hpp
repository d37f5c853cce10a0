#pragma once

#include <vector>

namespace osmloc {

int next_pow2(int v);

// Square planar-complex buffer (separate real/imaginary planes), side n.
struct ComplexPlane {
  int n = 0;
  std::vector<float> re, im;

  ComplexPlane() = default;
  explicit ComplexPlane(int side)
      : n(side), re(static_cast<std::size_t>(side) * side, 0.0f),
        im(static_cast<std::size_t>(side) * side, 0.0f) {}

  void clear();
};

// In-place 2-D radix-2 FFT over a power-of-two square. Both passes run as
// column transforms vectorized across a row (simd::fft_bfly_f32); the row
// pass is realized by transposing around a column pass. `active_rows` lets
// callers skip transform work for inputs whose tail rows are all zero.
class Fft2d {
 public:
  explicit Fft2d(int side);

  int side() const { return n_; }
  void forward(ComplexPlane& p, int active_rows = -1) const;
  // Includes the 1/n^2 normalization.
  void inverse(ComplexPlane& p) const;

 private:
  void pass_cols(float* re, float* im, bool inv, int active_cols) const;
  static void transpose(ComplexPlane& p);

  int n_ = 0;
  int log2n_ = 0;
  // Twiddles for stage s live at [stage_off_[s], stage_off_[s] + 2^s / 2).
  std::vector<float> tw_re_, tw_im_;
  std::vector<int> stage_off_;
  std::vector<int> bitrev_;
};

}  // namespace osmloc
