#include "osmloc/bev.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osmloc/error.hpp"
#include "osmloc/simd/kernels.hpp"

namespace osmloc {

void DepthDistribution::validate_simplex(double tol) const {
  double worst_dev = 0.0;
  int worst_u = -1, worst_v = -1;
  for (int u = 0; u < rows; ++u) {
    for (int v = 0; v < cols; ++v) {
      const float* vec = pixel(u, v);
      double sum = 0.0;
      for (int i = 0; i < bins; ++i) {
        if (vec[i] < 0.0f) {
          throw InvariantError("depth distribution: negative mass at pixel (" +
                               std::to_string(u) + ", " + std::to_string(v) + ") bin " +
                               std::to_string(i));
        }
        sum += vec[i];
      }
      const double dev = std::abs(sum - 1.0);
      if (dev > worst_dev) {
        worst_dev = dev;
        worst_u = u;
        worst_v = v;
      }
    }
  }
  if (worst_dev > tol) {
    throw InvariantError("depth distribution: bin mass off the simplex at pixel (" +
                         std::to_string(worst_u) + ", " + std::to_string(worst_v) +
                         "), |sum - 1| = " + std::to_string(worst_dev));
  }
}

namespace {

void check_alpha_dims(const FeatureGrid& image, const DepthDistribution& alpha,
                      const char* where) {
  if (image.rows != alpha.rows || image.cols != alpha.cols) {
    throw InvariantError(std::string(where) + ": image and depth distribution dims differ");
  }
}

}  // namespace

FrustumTensor scatter_to_frustum(const FeatureGrid& image, const DepthDistribution& alpha) {
  image.require_frame(FrameTag::ImagePlane, "scatter_to_frustum");
  check_alpha_dims(image, alpha, "scatter_to_frustum");
  alpha.validate_simplex();

  FrustumTensor out(image.rows, alpha.bins, image.cols, image.channels);
  const int channels = image.channels;
  for (int u = 0; u < image.rows; ++u) {
    for (int d = 0; d < alpha.bins; ++d) {
      for (int v = 0; v < image.cols; ++v) {
        const float a = alpha.at(u, v, d);
        if (a == 0.0f) continue;
        const float* src = image.cell(u, v);
        float* dst = out.cell(u, d, v);
        for (int c = 0; c < channels; ++c) dst[c] = a * src[c];
      }
    }
  }
  return out;
}

DepthMap expected_depth(const DepthDistribution& alpha, const DepthBins& bins) {
  bins.validate();
  if (alpha.bins != bins.count) {
    throw InvariantError("expected_depth: bin count mismatch");
  }
  alpha.validate_simplex();

  DepthMap out;
  out.rows = alpha.rows;
  out.cols = alpha.cols;
  out.d.resize(static_cast<std::size_t>(alpha.rows) * alpha.cols);
  for (int u = 0; u < alpha.rows; ++u) {
    for (int v = 0; v < alpha.cols; ++v) {
      const float* vec = alpha.pixel(u, v);
      double acc = 0.0;
      for (int i = 0; i < bins.count; ++i) acc += static_cast<double>(vec[i]) * bins.center(i);
      out.d[static_cast<std::size_t>(u) * alpha.cols + v] = acc;
    }
  }
  return out;
}

FeatureGrid collapse_to_polar(const FrustumTensor& frustum, const DepthDistribution& alpha,
                              bool single_weighting) {
  if (frustum.rows != alpha.rows || frustum.cols != alpha.cols || frustum.bins != alpha.bins) {
    throw InvariantError("collapse_to_polar: frustum and depth distribution dims differ");
  }
  FeatureGrid polar(frustum.bins, frustum.cols, frustum.channels, FrameTag::PolarBev);
  const int channels = frustum.channels;
  for (int u = 0; u < frustum.rows; ++u) {
    for (int d = 0; d < frustum.bins; ++d) {
      for (int v = 0; v < frustum.cols; ++v) {
        const float w = single_weighting ? 1.0f : alpha.at(u, v, d);
        if (w == 0.0f) continue;
        simd::axpy_f32(w, frustum.cell(u, d, v), polar.cell(d, v), channels);
      }
    }
  }
  return polar;
}

FeatureGrid lift_to_polar(const FeatureGrid& image, const DepthDistribution& alpha,
                          bool single_weighting) {
  image.require_frame(FrameTag::ImagePlane, "lift_to_polar");
  check_alpha_dims(image, alpha, "lift_to_polar");
  alpha.validate_simplex();

  FeatureGrid polar(alpha.bins, image.cols, image.channels, FrameTag::PolarBev);
  const int channels = image.channels;
  for (int u = 0; u < image.rows; ++u) {
    for (int v = 0; v < image.cols; ++v) {
      const float* src = image.cell(u, v);
      const float* avec = alpha.pixel(u, v);
      for (int d = 0; d < alpha.bins; ++d) {
        const float a = avec[d];
        if (a == 0.0f) continue;
        const float w = single_weighting ? a : a * a;
        simd::axpy_f32(w, src, polar.cell(d, v), channels);
      }
    }
  }
  return polar;
}

FeatureGrid polar_to_cartesian(const FeatureGrid& polar, const CameraIntrinsics& cam,
                               const DepthBins& bins, int lateral_bins, double gsd) {
  polar.require_frame(FrameTag::PolarBev, "polar_to_cartesian");
  cam.validate();
  bins.validate();
  if (polar.rows != bins.count) {
    throw InvariantError("polar_to_cartesian: polar rows must equal the depth bin count");
  }
  if (polar.cols != cam.cols) {
    throw InvariantError("polar_to_cartesian: polar cols must equal the image columns");
  }
  if (lateral_bins < 1 || lateral_bins % 2 == 0) {
    throw InvariantError("polar_to_cartesian: lateral bin count must be odd");
  }
  if (!(gsd > 0.0)) throw InvariantError("polar_to_cartesian: gsd must be positive");

  const int depth_count = bins.count;
  const int cols_v = polar.cols;
  const int channels = polar.channels;
  FeatureGrid cart(depth_count, lateral_bins, channels, FrameTag::CartesianBev);

  const int half_l = (lateral_bins - 1) / 2;
  for (int r = 0; r < depth_count; ++r) {
    const double forward = bins.center(r);
    if (!(forward > 0.0)) continue;  // cells behind the camera are invisible
    for (int l = 0; l < lateral_bins; ++l) {
      const double lateral = (l - half_l) * gsd;
      const double range = std::hypot(forward, lateral);
      const double v_img = cam.cx + cam.fx * lateral / forward;
      const double bin_pos = (range - bins.d0) / bins.delta - 1.0;

      // Outside the frustum azimuths or the sampled range span: zero.
      if (v_img < 0.0 || v_img >= cols_v) continue;
      if (bin_pos < -0.5 || bin_pos > depth_count - 0.5) continue;

      const int p0 = static_cast<int>(std::floor(bin_pos));
      const int v0 = static_cast<int>(std::floor(v_img));
      const double fp = bin_pos - p0;
      const double fv = v_img - v0;
      const double w[4] = {(1.0 - fp) * (1.0 - fv), (1.0 - fp) * fv,
                           fp * (1.0 - fv), fp * fv};
      const int pr[4] = {p0, p0, p0 + 1, p0 + 1};
      const int pv[4] = {v0, v0 + 1, v0, v0 + 1};

      float* dst = cart.cell(r, l);
      double mass = 0.0;
      for (int t = 0; t < 4; ++t) {
        if (pr[t] < 0 || pr[t] >= depth_count || pv[t] < 0 || pv[t] >= cols_v) continue;
        if (w[t] == 0.0) continue;
        mass += w[t];
        simd::axpy_f32(static_cast<float>(w[t]), polar.cell(pr[t], pv[t]), dst, channels);
      }
      if (mass > 0.0 && mass < 1.0) {
        // Partial support at the frustum boundary: renormalize so edge
        // cells are not darkened.
        const float scale = static_cast<float>(1.0 / mass);
        for (int c = 0; c < channels; ++c) dst[c] *= scale;
      }
    }
  }
  return cart;
}

DisparityMap depth_to_normalized_disparity(const DepthMap& depth) {
  if (depth.rows < 1 || depth.cols < 1) {
    throw InvariantError("disparity: empty depth map");
  }
  double t_min = 1e300, t_max = -1e300;
  std::vector<double> disparity(depth.d.size());
  for (std::size_t i = 0; i < depth.d.size(); ++i) {
    if (!(depth.d[i] > 0.0)) {
      throw InvariantError("disparity: depths must be strictly positive");
    }
    disparity[i] = 1.0 / depth.d[i];
    t_min = std::min(t_min, disparity[i]);
    t_max = std::max(t_max, disparity[i]);
  }
  if (!(t_max > t_min)) {
    throw DataError("disparity: constant depth map has no normalization range");
  }

  DisparityMap out;
  out.rows = depth.rows;
  out.cols = depth.cols;
  out.normalized = true;
  out.t.resize(disparity.size());
  const double inv_range = 1.0 / (t_max - t_min);
  for (std::size_t i = 0; i < disparity.size(); ++i) {
    out.t[i] = static_cast<float>((disparity[i] - t_min) * inv_range);
  }
  return out;
}

double disparity_loss(const DisparityMap& pred, const DisparityMap& pseudo_gt) {
  if (pred.rows != pseudo_gt.rows || pred.cols != pseudo_gt.cols) {
    throw InvariantError("disparity loss: dimension mismatch");
  }
  if (!pred.normalized || !pseudo_gt.normalized) {
    throw InvariantError("disparity loss: inputs must be normalized");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.t.size(); ++i) {
    acc += std::abs(static_cast<double>(pred.t[i]) - pseudo_gt.t[i]);
  }
  return acc / static_cast<double>(pred.t.size());
}

}  // namespace osmloc
