#include "osmloc/mcl.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "osmloc/error.hpp"
#include "osmloc/rng.hpp"

namespace osmloc {

void ParticleSet::normalize() {
  double total = 0.0;
  for (const auto& p : particles) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) {
      throw InvariantError("particle set: weights must be finite and non-negative");
    }
    total += p.weight;
  }
  if (total <= 0.0) throw InvariantError("particle set: total weight is zero");
  const double inv = 1.0 / total;
  for (auto& p : particles) p.weight *= inv;
  normalized = true;
}

double ParticleSet::effective_sample_size() const {
  if (!normalized) throw InvariantError("effective sample size needs normalized weights");
  double sum_sq = 0.0;
  for (const auto& p : particles) sum_sq += p.weight * p.weight;
  return 1.0 / sum_sq;
}

MotionInput MotionInput::from_body_delta(double forward, double left, double dtheta,
                                         const MotionNoise& noise) {
  MotionInput u;
  u.trans = std::hypot(forward, left);
  u.rot1 = (u.trans > 1e-12) ? std::atan2(left, forward) : 0.0;
  u.rot2 = wrap_angle(dtheta - u.rot1);
  u.noise = noise;
  return u;
}

MotionInput MotionInput::between(const Pose& prev, const Pose& next,
                                 const MotionNoise& noise) {
  const double dx = next.x - prev.x;
  const double dy = next.y - prev.y;
  // World displacement rotated into the previous body frame.
  const double forward = dx * prev.fx() + dy * prev.fy();
  const double left = -dx * prev.rx() - dy * prev.ry();
  return from_body_delta(forward, left, wrap_angle(next.theta - prev.theta), noise);
}

SpreadStats particle_spread(const ParticleSet& ps) {
  double total = 0.0;
  double mx = 0.0, my = 0.0, cs = 0.0, sn = 0.0;
  for (const auto& p : ps.particles) {
    total += p.weight;
    mx += p.weight * p.pose.x;
    my += p.weight * p.pose.y;
    cs += p.weight * std::cos(p.pose.theta);
    sn += p.weight * std::sin(p.pose.theta);
  }
  if (total <= 0.0) throw InvariantError("particle_spread: total weight is zero");
  mx /= total;
  my /= total;

  double var = 0.0;
  for (const auto& p : ps.particles) {
    const double dx = p.pose.x - mx;
    const double dy = p.pose.y - my;
    var += p.weight * (dx * dx + dy * dy);
  }
  SpreadStats stats;
  stats.pos_std_m = std::sqrt(var / total);
  const double resultant = std::hypot(cs / total, sn / total);
  stats.ang_std = resultant > 1e-12 ? std::sqrt(std::max(0.0, -2.0 * std::log(resultant)))
                                    : kPi;
  return stats;
}

ParticleSet init_particles(const PoseVolume& probability, int n, std::uint64_t rng_seed) {
  (void)rng_seed;
  if (n < 1) throw InvariantError("init_particles: need at least one particle");
  if (static_cast<std::size_t>(n) > probability.values.size()) {
    throw InvariantError("init_particles: volume has fewer cells than particles");
  }
  const auto top = topk_poses(probability, n);
  ParticleSet ps;
  ps.particles.reserve(n);
  const double w = 1.0 / n;
  for (const auto& candidate : top) ps.particles.push_back(Particle{candidate.pose, w});
  ps.normalized = true;
  return ps;
}

ParticleSet predict(const ParticleSet& ps, const MotionInput& u, std::uint64_t rng_seed) {
  if (u.noise.rot1_std < 0.0 || u.noise.trans_std < 0.0 || u.noise.rot2_std < 0.0) {
    throw InvariantError("predict: noise standard deviations must be non-negative");
  }
  ParticleSet out = ps;
  for (std::size_t i = 0; i < out.particles.size(); ++i) {
    auto rng = make_rng(rng_seed, "predict", i);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double rot1 = u.rot1 + (u.noise.rot1_std > 0.0 ? gauss(rng) * u.noise.rot1_std : 0.0);
    const double trans = u.trans + (u.noise.trans_std > 0.0 ? gauss(rng) * u.noise.trans_std : 0.0);
    const double rot2 = u.rot2 + (u.noise.rot2_std > 0.0 ? gauss(rng) * u.noise.rot2_std : 0.0);

    Pose& pose = out.particles[i].pose;
    const double heading = pose.theta + rot1;
    pose.x += trans * std::cos(heading);
    pose.y += trans * std::sin(heading);
    pose.theta = wrap_angle(heading + rot2);
  }
  return out;
}

namespace {

// Bilinear over (h, w), nearest rotation bin; out-of-coverage reads clamp
// to the floor.
double sample_scores(const PoseVolume& scores, const Pose& pose, double floor) {
  const int k = scores.nearest_rotation(pose.theta);
  const double row = (pose.y - scores.geo.origin.y) / scores.geo.gsd;
  const double col = (pose.x - scores.geo.origin.x) / scores.geo.gsd;
  const int r0 = static_cast<int>(std::floor(row));
  const int c0 = static_cast<int>(std::floor(col));
  const double fr = row - r0;
  const double fc = col - c0;
  const double wgt[4] = {(1.0 - fr) * (1.0 - fc), (1.0 - fr) * fc, fr * (1.0 - fc), fr * fc};
  const int nr[4] = {r0, r0, r0 + 1, r0 + 1};
  const int nc[4] = {c0, c0 + 1, c0, c0 + 1};
  double acc = 0.0;
  bool any = false;
  for (int t = 0; t < 4; ++t) {
    if (wgt[t] == 0.0) continue;
    if (nr[t] < 0 || nr[t] >= scores.height || nc[t] < 0 || nc[t] >= scores.width) continue;
    acc += wgt[t] * scores.at(nr[t], nc[t], k);
    any = true;
  }
  if (!any) return floor;
  return std::max(acc, floor);
}

}  // namespace

ParticleSet update_weights(const ParticleSet& ps, const PoseVolume& scores,
                           const ObservationParams& obs) {
  if (scores.kind != VolumeKind::Score) {
    throw InvariantError("update_weights: observation must be a score volume");
  }
  if (!(obs.varsigma > 0.0)) throw InvariantError("update_weights: varsigma must be positive");
  const double exponent = 1.0 / (2.0 * obs.varsigma * obs.varsigma);

  ParticleSet out = ps;
  for (auto& p : out.particles) {
    const double s = sample_scores(scores, p.pose, obs.score_floor);
    p.weight = std::exp(std::log(s) * exponent);
  }
  out.normalized = false;
  out.normalize();
  return out;
}

ParticleSet resample_if_needed(const ParticleSet& ps, std::uint64_t rng_seed,
                               int target_size, double resample_ratio) {
  if (!ps.normalized) throw InvariantError("resample_if_needed: weights must be normalized");
  if (target_size < 1) throw InvariantError("resample_if_needed: target size must be >= 1");

  const int current = static_cast<int>(ps.particles.size());
  const double n_eff = ps.effective_sample_size();
  const bool shrink = target_size < current;
  if (!shrink && n_eff >= resample_ratio * current) return ps;

  const int out_size = shrink ? target_size : current;
  ParticleSet out;
  out.particles.reserve(out_size);

  auto rng = make_rng(rng_seed, "resample");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double step = 1.0 / out_size;
  double pointer = unit(rng) * step;
  double cumulative = ps.particles[0].weight;
  std::size_t index = 0;
  for (int m = 0; m < out_size; ++m) {
    while (pointer > cumulative && index + 1 < ps.particles.size()) {
      ++index;
      cumulative += ps.particles[index].weight;
    }
    out.particles.push_back(Particle{ps.particles[index].pose, step});
    pointer += step;
  }
  out.normalized = true;
  return out;
}

Pose estimate_pose(const ParticleSet& ps) {
  if (ps.particles.empty()) throw InvariantError("estimate_pose: empty particle set");
  double total = 0.0, mx = 0.0, my = 0.0, cs = 0.0, sn = 0.0;
  for (const auto& p : ps.particles) {
    total += p.weight;
    mx += p.weight * p.pose.x;
    my += p.weight * p.pose.y;
    cs += p.weight * std::cos(p.pose.theta);
    sn += p.weight * std::sin(p.pose.theta);
  }
  if (total <= 0.0) throw InvariantError("estimate_pose: total weight is zero");
  return Pose{mx / total, my / total, std::atan2(sn, cs)};
}

std::vector<TrackEstimate> track_sequence(const std::vector<TrackFrame>& frames,
                                          const MclConfig& cfg) {
  const int n = static_cast<int>(frames.size());
  if (n < cfg.min_sequence || n > cfg.max_sequence) {
    throw ConfigError("track_sequence: sequence length " + std::to_string(n) +
                      " outside [" + std::to_string(cfg.min_sequence) + ", " +
                      std::to_string(cfg.max_sequence) + "]");
  }

  std::vector<TrackEstimate> estimates;
  estimates.reserve(n);

  const PoseVolume first_prob = softmax_volume(frames[0].scores);
  ParticleSet ps = init_particles(first_prob, cfg.n_init, substream_seed(cfg.seed, "init"));

  TrackEstimate first;
  first.pose = estimate_pose(ps);
  first.n_eff = ps.effective_sample_size();
  first.n_particles = static_cast<int>(ps.particles.size());
  estimates.push_back(first);

  int conv_streak = 0;
  bool converged = false;
  for (int t = 1; t < n; ++t) {
    ps = predict(ps, frames[t].motion, substream_seed(cfg.seed, "frame", t));
    ps = update_weights(ps, frames[t].scores, cfg.obs);

    const auto spread = particle_spread(ps);
    if (spread.pos_std_m < cfg.conv_pos_std_m && spread.ang_std < cfg.conv_ang_std) {
      ++conv_streak;
    } else {
      conv_streak = 0;
    }
    if (conv_streak >= cfg.conv_frames) converged = true;

    TrackEstimate est;
    est.n_eff = ps.effective_sample_size();
    const int current = static_cast<int>(ps.particles.size());
    const int target = converged ? cfg.n_min : current;
    est.resampled = target < current || est.n_eff < cfg.resample_ratio * current;
    ps = resample_if_needed(ps, substream_seed(cfg.seed, "resample", t), target,
                            cfg.resample_ratio);

    est.pose = estimate_pose(ps);
    est.n_particles = static_cast<int>(ps.particles.size());
    est.converged = converged;
    estimates.push_back(est);
  }
  return estimates;
}

}  // namespace osmloc
