#pragma once

#include <cstdint>
#include <vector>

#include "osmloc/geo.hpp"
#include "osmloc/match.hpp"

namespace osmloc {

struct Particle {
  Pose pose;
  double weight = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  bool normalized = false;

  void normalize();  // throws InvariantError when total weight is zero
  // 1 / sum(w^2); requires normalized weights.
  double effective_sample_size() const;
};

struct MotionNoise {
  double rot1_std = 0.0;
  double trans_std = 0.0;
  double rot2_std = 0.0;
};

// Relative odometry in the rot1-trans-rot2 decomposition, with independent
// Gaussian noise per component.
struct MotionInput {
  double rot1 = 0.0;
  double trans = 0.0;
  double rot2 = 0.0;
  MotionNoise noise;

  // From a body-frame displacement of the previous pose: forward meters,
  // leftward meters, heading change.
  static MotionInput from_body_delta(double forward, double left, double dtheta,
                                     const MotionNoise& noise = {});
  // Relative odometry between two world poses.
  static MotionInput between(const Pose& prev, const Pose& next,
                             const MotionNoise& noise = {});
};

struct ObservationParams {
  double varsigma = 2.0;      // observation sensitivity
  double score_floor = 1e-12;  // clamp before the log; scores can touch zero
};

struct SpreadStats {
  double pos_std_m = 0.0;  // weighted RMS distance from the weighted mean
  double ang_std = 0.0;    // circular standard deviation, radians
};

SpreadStats particle_spread(const ParticleSet& ps);

// Particles placed on the top-n probability cells (argmax tie rule),
// uniform weights. The seed parameter keeps the call reproducible should a
// stochastic placement variant ever be selected; the default placement is
// deterministic and ignores it.
ParticleSet init_particles(const PoseVolume& probability, int n, std::uint64_t rng_seed);

// Advances every particle through the noisy rot1-trans-rot2 motion model.
// Each particle consumes its own RNG sub-stream, so results are independent
// of iteration or scheduling order.
ParticleSet predict(const ParticleSet& ps, const MotionInput& u, std::uint64_t rng_seed);

// Gaussian observation model: w_i = S(p_i)^(1 / (2 * varsigma^2)), with S
// sampled bilinearly over the map cells and nearest in rotation, clamped
// to the score floor. Weights are overwritten, then normalized.
ParticleSet update_weights(const ParticleSet& ps, const PoseVolume& scores,
                           const ObservationParams& obs);

// Low-variance systematic resampling. Resamples when the effective sample
// size drops below resample_ratio * size, or always when target_size is
// smaller than the current set (the converged 1000 -> 200 reduction).
ParticleSet resample_if_needed(const ParticleSet& ps, std::uint64_t rng_seed,
                               int target_size, double resample_ratio = 0.5);

// Weighted mean position and weighted circular mean heading.
Pose estimate_pose(const ParticleSet& ps);

struct MclConfig {
  int n_init = 1000;
  int n_min = 200;
  ObservationParams obs;
  double resample_ratio = 0.5;
  // Convergence test for the particle reduction: position and heading
  // spread below these bounds for conv_frames consecutive frames.
  double conv_pos_std_m = 2.0;
  double conv_ang_std = 10.0 * kPi / 180.0;
  int conv_frames = 2;
  int min_sequence = 3;
  int max_sequence = 10;
  std::uint64_t seed = 0;
};

struct TrackFrame {
  PoseVolume scores;   // observation model input (Score kind)
  MotionInput motion;  // ignored for the first frame
};

struct TrackEstimate {
  Pose pose;
  double n_eff = 0.0;
  int n_particles = 0;
  bool converged = false;
  bool resampled = false;
};

// init -> (predict -> update -> resample)* over the frame sequence,
// emitting the weighted pose estimate and filter diagnostics per frame.
std::vector<TrackEstimate> track_sequence(const std::vector<TrackFrame>& frames,
                                          const MclConfig& cfg);

}  // namespace osmloc
