#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osmloc/eval.hpp"

namespace osmloc {

// Every tunable of the pipeline in one place, with the published defaults.
// Round-trips losslessly through the key=value file format (see
// configs/paper_defaults.cfg).
struct RunConfig {
  // rasterization
  double gsd = 0.5;          // meters/pixel
  double tile_size_m = 128.0;
  double prior_radius_m = 32.0;

  // camera-to-BEV transform
  double bev_d0 = 0.0;
  double bev_delta = 0.5;
  int bev_depth_bins = 64;    // D
  int bev_lateral_bins = 129;  // L
  bool bev_single_weighting = false;

  // semantic embedding
  int c_sem = 16;

  // matching
  int k_rotations_train = 64;
  int k_rotations_infer = 256;

  // loss weights
  double lambda_pose = 1.0;
  double lambda_disparity = 20.0;
  double lambda_semantic = 10.0;

  // evaluation thresholds (position meters : orientation degrees)
  std::vector<Threshold> thresholds = {{1.0, 1.0}, {3.0, 3.0}, {5.0, 5.0}};

  // sequential localization
  double mcl_varsigma = 2.0;
  int mcl_particles_init = 1000;
  int mcl_particles_min = 200;
  int mcl_min_sequence = 3;
  int mcl_max_sequence = 10;
  double mcl_noise_xy = 0.5;          // meters
  double mcl_noise_theta = 0.31415926535897931;  // 0.1 * pi

  std::uint64_t seed = 0;
  int threads = 0;  // 0 = machine parallelism

  void validate() const;

  std::string to_text() const;
  static RunConfig from_text(const std::string& text);
  static RunConfig load_file(const std::string& path);
  void save_file(const std::string& path) const;
};

}  // namespace osmloc
