#pragma once

#include <vector>

#include "osmloc/camera.hpp"
#include "osmloc/grid.hpp"

namespace osmloc {

// Per-pixel categorical distribution over depth bins on a rows x cols
// image lattice. Each pixel's vector is a simplex: non-negative entries
// summing to 1 within 1e-6.
struct DepthDistribution {
  int rows = 0;
  int cols = 0;
  int bins = 0;
  std::vector<float> p;  // (u, v, i) row-major

  DepthDistribution() = default;
  DepthDistribution(int r, int c, int b)
      : rows(r), cols(c), bins(b), p(static_cast<std::size_t>(r) * c * b, 0.0f) {}

  float& at(int u, int v, int i) {
    return p[(static_cast<std::size_t>(u) * cols + v) * bins + i];
  }
  float at(int u, int v, int i) const {
    return p[(static_cast<std::size_t>(u) * cols + v) * bins + i];
  }
  const float* pixel(int u, int v) const {
    return p.data() + (static_cast<std::size_t>(u) * cols + v) * bins;
  }

  // Throws InvariantError naming the worst pixel when any entry is negative
  // or a pixel's bin mass deviates from 1 by more than tol.
  void validate_simplex(double tol = 1e-6) const;
};

// Per-ray feature point cloud: pixel features rescaled by their depth
// probabilities, one slab per depth bin.
struct FrustumTensor {
  int rows = 0;      // U
  int bins = 0;      // D
  int cols = 0;      // V
  int channels = 0;  // C
  std::vector<float> data;  // ((u * D + d) * V + v) * C + c

  FrustumTensor() = default;
  FrustumTensor(int u, int d, int v, int c)
      : rows(u), bins(d), cols(v), channels(c),
        data(static_cast<std::size_t>(u) * d * v * c, 0.0f) {}

  float* cell(int u, int d, int v) {
    return data.data() +
           ((static_cast<std::size_t>(u) * bins + d) * cols + v) * channels;
  }
  const float* cell(int u, int d, int v) const {
    return data.data() +
           ((static_cast<std::size_t>(u) * bins + d) * cols + v) * channels;
  }
};

struct DepthMap {
  int rows = 0;
  int cols = 0;
  std::vector<double> d;  // meters, row-major

  double at(int u, int v) const { return d[static_cast<std::size_t>(u) * cols + v]; }
};

struct DisparityMap {
  int rows = 0;
  int cols = 0;
  bool normalized = false;
  std::vector<float> t;  // row-major

  float at(int u, int v) const { return t[static_cast<std::size_t>(u) * cols + v]; }
};

// F_pc(u, d_i, v, :) = alpha(u, d_i, v) * F_img(u, v, :)
FrustumTensor scatter_to_frustum(const FeatureGrid& image, const DepthDistribution& alpha);

// d(u, v) = sum_i alpha(u, d_i, v) * d_i
DepthMap expected_depth(const DepthDistribution& alpha, const DepthBins& bins);

// F_bev(d_i, v, :) = sum_u alpha(u, d_i, v) * F_pc(u, d_i, v, :). With
// single_weighting the frustum features are summed directly over u, so the
// depth distribution is applied once overall instead of twice.
FeatureGrid collapse_to_polar(const FrustumTensor& frustum, const DepthDistribution& alpha,
                              bool single_weighting = false);

// Fused scatter + collapse; avoids materializing the U x D x V x C tensor.
FeatureGrid lift_to_polar(const FeatureGrid& image, const DepthDistribution& alpha,
                          bool single_weighting = false);

// Resamples the D x V polar strip onto a D x L Cartesian grid (forward
// rows at the bin centers, lateral columns at gsd spacing, column
// (L-1)/2 on the camera axis) by bilinear interpolation in (range,
// azimuth). Cells outside the frustum are zero.
FeatureGrid polar_to_cartesian(const FeatureGrid& polar, const CameraIntrinsics& cam,
                               const DepthBins& bins, int lateral_bins, double gsd);

// t = 1/d rescaled to [0, 1] by the per-image disparity extrema.
DisparityMap depth_to_normalized_disparity(const DepthMap& depth);

// Mean absolute difference of two normalized disparity maps.
double disparity_loss(const DisparityMap& pred, const DisparityMap& pseudo_gt);

}  // namespace osmloc
