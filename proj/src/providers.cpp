#include "osmloc/providers.hpp"

#include <cmath>

#include "osmloc/error.hpp"
#include "osmloc/simd/kernels.hpp"
#include "osmloc/tensor_io.hpp"

namespace osmloc {

FeatureGrid load_feature_tensor(const std::string& path) { return read_osmf_file(path); }

SynthFeatures synth_image_features(const MapTile& tile, const EmbeddingTable& table,
                                   const Pose& pose, const CameraIntrinsics& cam,
                                   const DepthBins& bins) {
  cam.validate();
  bins.validate();
  if (cam.rows != bins.count) {
    throw InvariantError("synth_image_features: image rows must equal the depth bin count");
  }

  const RasterMap& raster = tile.raster;
  const double half_w = 0.5 * tile.width_meters;
  const double half_h = 0.5 * tile.height_meters;
  if (std::abs(pose.x - tile.center.x) > half_w || std::abs(pose.y - tile.center.y) > half_h) {
    throw OutOfCoverageError("synth_image_features: pose outside the tile");
  }

  const FeatureGrid embedded = embed_map(tile, table);
  const int channels = embedded.channels;

  SynthFeatures out;
  out.image = FeatureGrid(cam.rows, cam.cols, channels, FrameTag::ImagePlane);
  out.alpha = DepthDistribution(cam.rows, cam.cols, bins.count);

  for (int v = 0; v < cam.cols; ++v) {
    // Ray azimuth of column v relative to the camera forward axis.
    const double azimuth = std::atan2(v - cam.cx, cam.fx);
    const double cos_az = std::cos(azimuth);
    const double sin_az = std::sin(azimuth);
    for (int u = 0; u < cam.rows; ++u) {
      const double range = bins.center(u);
      const double forward = range * cos_az;
      const double lateral = range * sin_az;
      // forward along the heading, lateral to the camera's right
      const double wx = pose.x + forward * pose.fx() + lateral * pose.rx();
      const double wy = pose.y + forward * pose.fy() + lateral * pose.ry();

      const double row = (wy - raster.origin.y) / raster.gsd;
      const double col = (wx - raster.origin.x) / raster.gsd;
      const int r0 = static_cast<int>(std::floor(row));
      const int c0 = static_cast<int>(std::floor(col));
      const double fr = row - r0;
      const double fc = col - c0;
      const double wgt[4] = {(1.0 - fr) * (1.0 - fc), (1.0 - fr) * fc,
                             fr * (1.0 - fc), fr * fc};
      const int nr[4] = {r0, r0, r0 + 1, r0 + 1};
      const int nc[4] = {c0, c0 + 1, c0, c0 + 1};

      float* dst = out.image.cell(u, v);
      for (int t = 0; t < 4; ++t) {
        if (wgt[t] == 0.0) continue;
        if (nr[t] < 0 || nr[t] >= embedded.rows || nc[t] < 0 || nc[t] >= embedded.cols) {
          continue;  // beyond the tile: void, contributes nothing
        }
        simd::axpy_f32(static_cast<float>(wgt[t]), embedded.cell(nr[t], nc[t]), dst, channels);
      }
      out.alpha.at(u, v, u) = 1.0f;  // row u observes depth bin u
    }
  }
  return out;
}

}  // namespace osmloc
