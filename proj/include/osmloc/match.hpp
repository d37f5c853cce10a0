#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "osmloc/camera.hpp"
#include "osmloc/embedding.hpp"
#include "osmloc/grid.hpp"

namespace osmloc {

enum class VolumeKind { Score, Probability };

// Geo-reference of a map-plane lattice: cell (0, 0) center in local meters
// plus the ground sampling distance. Rows grow North, columns East.
struct VolumeGeo {
  double gsd = 0.5;
  LocalPoint origin;
};

// H x W x K volume over discretized 3-DoF poses. Rotation bin k covers
// theta_k = -pi + 2*pi*(k + 0.5) / K.
struct PoseVolume {
  int height = 0;
  int width = 0;
  int rotations = 0;
  VolumeKind kind = VolumeKind::Score;
  VolumeGeo geo;
  std::vector<double> values;  // ((h * W + w) * K + k)

  PoseVolume() = default;
  PoseVolume(int h, int w, int k, VolumeKind kind_, VolumeGeo geo_)
      : height(h), width(w), rotations(k), kind(kind_), geo(geo_),
        values(static_cast<std::size_t>(h) * w * k, 0.0) {}

  double& at(int h, int w, int k) {
    return values[(static_cast<std::size_t>(h) * width + w) * rotations + k];
  }
  double at(int h, int w, int k) const {
    return values[(static_cast<std::size_t>(h) * width + w) * rotations + k];
  }

  double theta_of(int k) const;
  int nearest_rotation(double theta) const;
  Pose pose_of(int h, int w, int k) const;

  struct Cell {
    int h = 0, w = 0, k = 0;
  };
  Pose pose_of(const Cell& c) const { return pose_of(c.h, c.w, c.k); }
  // Nearest cell by rounding in x, y and theta; nullopt outside coverage.
  std::optional<Cell> cell_of(const Pose& pose) const;

  std::size_t flat_index(int h, int w, int k) const {
    return (static_cast<std::size_t>(h) * width + w) * rotations + k;
  }
  Cell cell_of_flat(std::size_t flat) const;

  // Probability volumes must sum to 1 within tol.
  void validate(double tol = 1e-5) const;
};

// Axis-aligned pose restriction (e.g. a +-20 m, +-10 deg initialization
// prior). Cells outside receive zero probability in softmax_volume.
struct PoseRegion {
  LocalPoint center;
  double half_extent_m = 0.0;
  double center_theta = 0.0;
  double half_angle = 0.0;

  bool contains(const Pose& p) const;
};

struct MatchConfig {
  int rotations = 256;  // K; 64 for training-style runs, 256 at inference
  double bev_gsd = 0.5;  // lateral spacing of the Cartesian BEV columns
  std::optional<PoseRegion> restriction;
  int threads = 0;  // 0 = machine parallelism
  // Diagnostic only: rescale scores by the in-frustum cell mass instead of
  // the constant 1/(D*L). Does not change per-rotation argmax.
  bool valid_cell_norm = false;
};

// BEV template resampled into map-aligned axes on a square canvas whose
// center cell is the camera position. `mask` carries the splatted support
// mass (0 where the rotated template has no coverage).
struct RotatedTemplate {
  int size = 0;  // 2 * half + 1
  int half = 0;
  int channels = 0;
  std::vector<float> values;  // (a * size + b) * C + c
  std::vector<float> mask;    // a * size + b

  float* cell(int a, int b) {
    return values.data() + (static_cast<std::size_t>(a) * size + b) * channels;
  }
  const float* cell(int a, int b) const {
    return values.data() + (static_cast<std::size_t>(a) * size + b) * channels;
  }
};

// Rotates the Cartesian BEV template about the camera origin by `rotation`
// radians (0 keeps the identity placement: forward rows to +North rows,
// lateral columns to +East columns) and resamples it onto the canvas with
// bilinear weights. map_gsd sets the canvas cell size.
RotatedTemplate rotate_template(const FeatureGrid& bev, const DepthBins& bins,
                                double bev_gsd, double map_gsd, double rotation);

// Dense 3-DoF matching scores: S(h,w,k) = 1/(D*L) * sum over template cells
// of <map(transformed cell), bev(cell)>, map samples bilinear with zero
// outside the tile. Direct-loop evaluation.
PoseVolume score_poses_bruteforce(const FeatureGrid& map_features, const VolumeGeo& geo,
                                  const FeatureGrid& bev, const DepthBins& bins,
                                  const MatchConfig& cfg);

// Same contract as score_poses_bruteforce, evaluated per rotation as a
// zero-padded linear cross-correlation in the Fourier domain.
PoseVolume score_poses_fft(const FeatureGrid& map_features, const VolumeGeo& geo,
                           const FeatureGrid& bev, const DepthBins& bins,
                           const MatchConfig& cfg);

// Softmax normalization of a score volume into a probability volume. Cells
// outside `restriction` (when given) are excluded (probability zero).
PoseVolume softmax_volume(const PoseVolume& scores,
                          const std::optional<PoseRegion>& restriction = std::nullopt);

// Pose of the maximal probability cell; ties break to the smallest flat
// index (row-major h, w, k).
std::pair<Pose, std::size_t> argmax_pose(const PoseVolume& probability);

struct ScoredPose {
  Pose pose;
  double value = 0.0;
  std::size_t flat_index = 0;
};

// Top-k cells by descending probability, argmax tie rule.
std::vector<ScoredPose> topk_poses(const PoseVolume& probability, int k);

// Negative log probability at the cell containing the ground-truth pose.
double pose_nll_loss(const PoseVolume& probability, const Pose& gt);

// Mean L2 distance between adapted BEV features and the map semantic
// embedding sampled at the ground-truth placement, over all D*L cells.
double semantic_alignment_loss(const FeatureGrid& bev, const FeatureGrid& map_semantic,
                               const VolumeGeo& geo, const Pose& gt,
                               const ChannelAdapter& adapter, const DepthBins& bins,
                               double bev_gsd);

struct LossWeights {
  double pose = 1.0;
  double disparity = 20.0;
  double semantic = 10.0;
};

inline double joint_loss(double l_pose, double l_dis, double l_sem,
                         const LossWeights& lambdas = {}) {
  return lambdas.pose * l_pose + lambdas.disparity * l_dis + lambdas.semantic * l_sem;
}

}  // namespace osmloc
