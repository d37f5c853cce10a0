#include "osmloc/match.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "osmloc/fft.hpp"
#include "osmloc/simd/kernels.hpp"
#include "osmloc/threading.hpp"

namespace osmloc {

double PoseVolume::theta_of(int k) const {
  return -kPi + 2.0 * kPi * (k + 0.5) / rotations;
}

int PoseVolume::nearest_rotation(double theta) const {
  const double pos = (wrap_angle(theta) + kPi) / (2.0 * kPi) * rotations - 0.5;
  const long k = std::lround(pos);
  return static_cast<int>(((k % rotations) + rotations) % rotations);
}

Pose PoseVolume::pose_of(int h, int w, int k) const {
  return Pose{geo.origin.x + w * geo.gsd, geo.origin.y + h * geo.gsd, theta_of(k)};
}

std::optional<PoseVolume::Cell> PoseVolume::cell_of(const Pose& pose) const {
  const long w = std::lround((pose.x - geo.origin.x) / geo.gsd);
  const long h = std::lround((pose.y - geo.origin.y) / geo.gsd);
  if (h < 0 || h >= height || w < 0 || w >= width) return std::nullopt;
  return Cell{static_cast<int>(h), static_cast<int>(w), nearest_rotation(pose.theta)};
}

PoseVolume::Cell PoseVolume::cell_of_flat(std::size_t flat) const {
  Cell c;
  c.k = static_cast<int>(flat % rotations);
  flat /= rotations;
  c.w = static_cast<int>(flat % width);
  c.h = static_cast<int>(flat / width);
  return c;
}

void PoseVolume::validate(double tol) const {
  double sum = 0.0;
  for (const double v : values) {
    if (!std::isfinite(v)) throw InvariantError("pose volume: non-finite value");
    sum += v;
  }
  if (kind == VolumeKind::Probability && std::abs(sum - 1.0) > tol) {
    throw InvariantError("pose volume: probabilities sum to " + std::to_string(sum));
  }
}

bool PoseRegion::contains(const Pose& p) const {
  return std::abs(p.x - center.x) <= half_extent_m &&
         std::abs(p.y - center.y) <= half_extent_m &&
         angle_abs_diff(p.theta, center_theta) <= half_angle;
}

namespace {

// Offsets of one BEV template cell from the camera, in map pixels, at
// rotation `phi` away from the north-aligned identity placement.
struct CellOffset {
  double row = 0.0;
  double col = 0.0;
};

inline CellOffset cell_offset(double forward_m, double lateral_m, double sin_phi,
                              double cos_phi, double inv_map_gsd) {
  return CellOffset{(forward_m * cos_phi + lateral_m * sin_phi) * inv_map_gsd,
                    (-forward_m * sin_phi + lateral_m * cos_phi) * inv_map_gsd};
}

struct MatcherProblem {
  int map_h = 0, map_w = 0;
  int depth_bins = 0, lateral_bins = 0, channels = 0;
  int half_l = 0;
  double norm = 0.0;
};

MatcherProblem check_matcher_inputs(const FeatureGrid& map_features, const FeatureGrid& bev,
                                    const DepthBins& bins, const MatchConfig& cfg) {
  map_features.require_frame(FrameTag::MapPlane, "pose matcher");
  bev.require_frame(FrameTag::CartesianBev, "pose matcher");
  if (map_features.channels != bev.channels) {
    throw DataError("pose matcher: map and BEV channel counts differ");
  }
  if (bev.rows != bins.count) {
    throw InvariantError("pose matcher: BEV rows must equal the depth bin count");
  }
  if (bev.cols % 2 == 0) {
    throw InvariantError("pose matcher: BEV lateral bin count must be odd");
  }
  if (cfg.rotations < 1) throw InvariantError("pose matcher: need at least one rotation");
  bins.validate();

  MatcherProblem p;
  p.map_h = map_features.rows;
  p.map_w = map_features.cols;
  p.depth_bins = bev.rows;
  p.lateral_bins = bev.cols;
  p.channels = bev.channels;
  p.half_l = (bev.cols - 1) / 2;
  if (cfg.valid_cell_norm) {
    // Diagnostic normalization: count template cells carrying content.
    std::size_t valid = 0;
    for (int r = 0; r < bev.rows; ++r) {
      for (int l = 0; l < bev.cols; ++l) {
        const float* cell = bev.cell(r, l);
        for (int c = 0; c < bev.channels; ++c) {
          if (cell[c] != 0.0f) {
            ++valid;
            break;
          }
        }
      }
    }
    p.norm = 1.0 / static_cast<double>(std::max<std::size_t>(valid, 1));
  } else {
    p.norm = 1.0 / (static_cast<double>(p.depth_bins) * p.lateral_bins);
  }
  return p;
}

int template_half_extent(const DepthBins& bins, int half_l, double bev_gsd, double map_gsd) {
  const double max_forward = std::max(std::abs(bins.center(0)),
                                      std::abs(bins.center(bins.count - 1)));
  const double max_lateral = half_l * bev_gsd;
  const double radius_px = std::hypot(max_forward, max_lateral) / map_gsd;
  return static_cast<int>(std::ceil(radius_px)) + 1;
}

}  // namespace

RotatedTemplate rotate_template(const FeatureGrid& bev, const DepthBins& bins,
                                double bev_gsd, double map_gsd, double rotation) {
  bev.require_frame(FrameTag::CartesianBev, "rotate_template");
  if (bev.rows != bins.count) {
    throw InvariantError("rotate_template: BEV rows must equal the depth bin count");
  }
  if (bev.cols % 2 == 0) {
    throw InvariantError("rotate_template: BEV lateral bin count must be odd");
  }

  const int half_l = (bev.cols - 1) / 2;
  const int half = template_half_extent(bins, half_l, bev_gsd, map_gsd);
  const int size = 2 * half + 1;
  const int channels = bev.channels;

  RotatedTemplate out;
  out.size = size;
  out.half = half;
  out.channels = channels;
  out.values.assign(static_cast<std::size_t>(size) * size * channels, 0.0f);
  out.mask.assign(static_cast<std::size_t>(size) * size, 0.0f);

  const double sin_phi = std::sin(rotation);
  const double cos_phi = std::cos(rotation);
  const double inv_gsd = 1.0 / map_gsd;

  for (int r = 0; r < bev.rows; ++r) {
    const double forward = bins.center(r);
    for (int l = 0; l < bev.cols; ++l) {
      const double lateral = (l - half_l) * bev_gsd;
      const auto off = cell_offset(forward, lateral, sin_phi, cos_phi, inv_gsd);
      const double a = half + off.row;
      const double b = half + off.col;
      const int a0 = static_cast<int>(std::floor(a));
      const int b0 = static_cast<int>(std::floor(b));
      const double fa = a - a0;
      const double fb = b - b0;
      const double w[4] = {(1.0 - fa) * (1.0 - fb), (1.0 - fa) * fb,
                           fa * (1.0 - fb), fa * fb};
      const int na[4] = {a0, a0, a0 + 1, a0 + 1};
      const int nb[4] = {b0, b0 + 1, b0, b0 + 1};
      const float* src = bev.cell(r, l);
      for (int t = 0; t < 4; ++t) {
        if (w[t] == 0.0) continue;
        // The canvas is sized to hold any rotation; splat spill past it
        // would silently drop template mass.
        if (na[t] < 0 || na[t] >= size || nb[t] < 0 || nb[t] >= size) {
          throw InvariantError("rotate_template: canvas too small for splat");
        }
        simd::axpy_f32(static_cast<float>(w[t]), src, out.cell(na[t], nb[t]), channels);
        out.mask[static_cast<std::size_t>(na[t]) * size + nb[t]] += static_cast<float>(w[t]);
      }
    }
  }
  return out;
}

PoseVolume score_poses_bruteforce(const FeatureGrid& map_features, const VolumeGeo& geo,
                                  const FeatureGrid& bev, const DepthBins& bins,
                                  const MatchConfig& cfg) {
  const MatcherProblem p = check_matcher_inputs(map_features, bev, bins, cfg);
  PoseVolume vol(p.map_h, p.map_w, cfg.rotations, VolumeKind::Score, geo);

  // Cells with all-zero features contribute exactly nothing; skip them.
  struct ActiveCell {
    double forward, lateral;
    const float* features;
  };
  std::vector<ActiveCell> active;
  for (int r = 0; r < p.depth_bins; ++r) {
    for (int l = 0; l < p.lateral_bins; ++l) {
      const float* cell = bev.cell(r, l);
      bool nonzero = false;
      for (int c = 0; c < p.channels; ++c) {
        if (cell[c] != 0.0f) {
          nonzero = true;
          break;
        }
      }
      if (nonzero) {
        active.push_back(ActiveCell{bins.center(r), (l - p.half_l) * cfg.bev_gsd, cell});
      }
    }
  }

  const int channels = p.channels;
  parallel_for(0, cfg.rotations, cfg.threads, [&](int k) {
    const double phi = vol.theta_of(k) - kPi / 2.0;
    const double sin_phi = std::sin(phi);
    const double cos_phi = std::cos(phi);

    std::vector<CellOffset> offsets(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      offsets[i] = cell_offset(active[i].forward, active[i].lateral, sin_phi, cos_phi,
                               1.0 / geo.gsd);
    }

    for (int h = 0; h < p.map_h; ++h) {
      for (int w = 0; w < p.map_w; ++w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i) {
          const double row = h + offsets[i].row;
          const double col = w + offsets[i].col;
          const int r0 = static_cast<int>(std::floor(row));
          const int c0 = static_cast<int>(std::floor(col));
          const double fr = row - r0;
          const double fc = col - c0;
          const double wgt[4] = {(1.0 - fr) * (1.0 - fc), (1.0 - fr) * fc,
                                 fr * (1.0 - fc), fr * fc};
          const int nr[4] = {r0, r0, r0 + 1, r0 + 1};
          const int nc[4] = {c0, c0 + 1, c0, c0 + 1};
          for (int t = 0; t < 4; ++t) {
            if (wgt[t] == 0.0) continue;
            if (nr[t] < 0 || nr[t] >= p.map_h || nc[t] < 0 || nc[t] >= p.map_w) continue;
            acc += wgt[t] * simd::dot_f32(map_features.cell(nr[t], nc[t]),
                                          active[i].features, channels);
          }
        }
        vol.at(h, w, k) = acc * p.norm;
      }
    }
  });
  return vol;
}

PoseVolume score_poses_fft(const FeatureGrid& map_features, const VolumeGeo& geo,
                           const FeatureGrid& bev, const DepthBins& bins,
                           const MatchConfig& cfg) {
  const MatcherProblem p = check_matcher_inputs(map_features, bev, bins, cfg);
  PoseVolume vol(p.map_h, p.map_w, cfg.rotations, VolumeKind::Score, geo);

  const int half = template_half_extent(bins, p.half_l, cfg.bev_gsd, geo.gsd);
  const int canvas = 2 * half + 1;
  const int side = next_pow2(std::max(p.map_h, p.map_w) + canvas - 1);
  const Fft2d plan(side);

  // Map channel spectra are shared read-only across all rotations.
  std::vector<ComplexPlane> map_spec(p.channels);
  parallel_for(0, p.channels, cfg.threads, [&](int c) {
    ComplexPlane& plane = map_spec[c];
    plane = ComplexPlane(side);
    for (int h = 0; h < p.map_h; ++h) {
      float* dst = plane.re.data() + static_cast<std::size_t>(h) * side;
      const float* src = map_features.data.data() +
                         static_cast<std::size_t>(h) * p.map_w * p.channels + c;
      for (int w = 0; w < p.map_w; ++w) dst[w] = src[static_cast<std::size_t>(w) * p.channels];
    }
    plan.forward(plane, p.map_h);
  });

  const int mask_side = side;
  parallel_for_chunks(0, cfg.rotations, cfg.threads, [&](int k_lo, int k_hi) {
    ComplexPlane tmpl(side);
    ComplexPlane acc(side);
    for (int k = k_lo; k < k_hi; ++k) {
      const RotatedTemplate rot =
          rotate_template(bev, bins, cfg.bev_gsd, geo.gsd, vol.theta_of(k) - kPi / 2.0);
      acc.clear();
      for (int c = 0; c < p.channels; ++c) {
        tmpl.clear();
        for (int a = 0; a < rot.size; ++a) {
          float* dst = tmpl.re.data() + static_cast<std::size_t>(a) * side;
          const float* src = rot.values.data() +
                             static_cast<std::size_t>(a) * rot.size * rot.channels + c;
          for (int b = 0; b < rot.size; ++b) {
            dst[b] = src[static_cast<std::size_t>(b) * rot.channels];
          }
        }
        plan.forward(tmpl, rot.size);
        simd::cmul_conj_acc_f32(acc.re.data(), acc.im.data(), map_spec[c].re.data(),
                                map_spec[c].im.data(), tmpl.re.data(), tmpl.im.data(),
                                static_cast<std::size_t>(side) * side);
      }
      plan.inverse(acc);
      // Correlation lag (h - half, w - half) scores the camera at map cell
      // (h, w); negative lags wrap around the padded square.
      for (int h = 0; h < p.map_h; ++h) {
        const int src_row = (h - half + mask_side) & (mask_side - 1);
        const float* row = acc.re.data() + static_cast<std::size_t>(src_row) * side;
        for (int w = 0; w < p.map_w; ++w) {
          const int src_col = (w - half + mask_side) & (mask_side - 1);
          vol.at(h, w, k) = static_cast<double>(row[src_col]) * p.norm;
        }
      }
    }
  });
  return vol;
}

PoseVolume softmax_volume(const PoseVolume& scores,
                          const std::optional<PoseRegion>& restriction) {
  if (scores.kind != VolumeKind::Score) {
    throw InvariantError("softmax_volume: input must be a score volume");
  }
  scores.validate();

  PoseVolume prob(scores.height, scores.width, scores.rotations, VolumeKind::Probability,
                  scores.geo);

  std::vector<char> included;
  bool has_mask = false;
  if (restriction) {
    has_mask = true;
    included.assign(scores.values.size(), 0);
    std::size_t flat = 0;
    for (int h = 0; h < scores.height; ++h) {
      for (int w = 0; w < scores.width; ++w) {
        for (int k = 0; k < scores.rotations; ++k, ++flat) {
          included[flat] = restriction->contains(scores.pose_of(h, w, k)) ? 1 : 0;
        }
      }
    }
  }

  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.values.size(); ++i) {
    if (has_mask && !included[i]) continue;
    max_score = std::max(max_score, scores.values[i]);
  }
  if (!std::isfinite(max_score)) {
    throw InvariantError("softmax_volume: restriction excludes every cell");
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < scores.values.size(); ++i) {
    if (has_mask && !included[i]) continue;
    const double e = std::exp(scores.values[i] - max_score);
    prob.values[i] = e;
    sum += e;
  }
  const double inv = 1.0 / sum;
  for (double& v : prob.values) v *= inv;
  return prob;
}

namespace {

// Strict ordering used by argmax/topk: higher value first, then smaller
// flat index.
inline bool better(double va, std::size_t ia, double vb, std::size_t ib) {
  if (va != vb) return va > vb;
  return ia < ib;
}

}  // namespace

std::pair<Pose, std::size_t> argmax_pose(const PoseVolume& probability) {
  if (probability.kind != VolumeKind::Probability) {
    throw InvariantError("argmax_pose: input must be a probability volume");
  }
  if (probability.values.empty()) throw InvariantError("argmax_pose: empty volume");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probability.values.size(); ++i) {
    if (probability.values[i] > probability.values[best]) best = i;
  }
  return {probability.pose_of(probability.cell_of_flat(best)), best};
}

std::vector<ScoredPose> topk_poses(const PoseVolume& probability, int k) {
  if (probability.kind != VolumeKind::Probability) {
    throw InvariantError("topk_poses: input must be a probability volume");
  }
  if (k < 1 || static_cast<std::size_t>(k) > probability.values.size()) {
    throw InvariantError("topk_poses: k outside [1, volume size]");
  }

  // Min-heap of the current best k under the argmax ordering.
  using Entry = std::pair<double, std::size_t>;
  auto worse = [](const Entry& a, const Entry& b) {
    return better(a.first, a.second, b.first, b.second);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (std::size_t i = 0; i < probability.values.size(); ++i) {
    const Entry e{probability.values[i], i};
    if (static_cast<int>(heap.size()) < k) {
      heap.push(e);
    } else if (better(e.first, e.second, heap.top().first, heap.top().second)) {
      heap.pop();
      heap.push(e);
    }
  }

  std::vector<ScoredPose> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    const auto [value, flat] = heap.top();
    heap.pop();
    *it = ScoredPose{probability.pose_of(probability.cell_of_flat(flat)), value, flat};
  }
  return out;
}

double pose_nll_loss(const PoseVolume& probability, const Pose& gt) {
  if (probability.kind != VolumeKind::Probability) {
    throw InvariantError("pose_nll_loss: input must be a probability volume");
  }
  const auto cell = probability.cell_of(gt);
  if (!cell) throw OutOfCoverageError("pose_nll_loss: ground truth outside the volume");
  return -std::log(probability.at(cell->h, cell->w, cell->k));
}

double semantic_alignment_loss(const FeatureGrid& bev, const FeatureGrid& map_semantic,
                               const VolumeGeo& geo, const Pose& gt,
                               const ChannelAdapter& adapter, const DepthBins& bins,
                               double bev_gsd) {
  bev.require_frame(FrameTag::CartesianBev, "semantic_alignment_loss");
  map_semantic.require_frame(FrameTag::MapPlane, "semantic_alignment_loss");
  if (adapter.in_channels != bev.channels || adapter.out_channels != map_semantic.channels) {
    throw DataError("semantic_alignment_loss: adapter channels do not match inputs");
  }
  if (bev.rows != bins.count || bev.cols % 2 == 0) {
    throw InvariantError("semantic_alignment_loss: malformed BEV grid");
  }

  const int half_l = (bev.cols - 1) / 2;
  const int out_c = adapter.out_channels;
  const double phi = gt.theta - kPi / 2.0;
  const double sin_phi = std::sin(phi);
  const double cos_phi = std::cos(phi);
  const double cam_row = (gt.y - geo.origin.y) / geo.gsd;
  const double cam_col = (gt.x - geo.origin.x) / geo.gsd;

  std::vector<float> adapted(out_c);
  std::vector<float> target(out_c);
  double acc = 0.0;
  for (int r = 0; r < bev.rows; ++r) {
    const double forward = bins.center(r);
    for (int l = 0; l < bev.cols; ++l) {
      const auto off = cell_offset(forward, (l - half_l) * bev_gsd, sin_phi, cos_phi,
                                   1.0 / geo.gsd);
      const double row = cam_row + off.row;
      const double col = cam_col + off.col;

      std::fill(target.begin(), target.end(), 0.0f);
      const int r0 = static_cast<int>(std::floor(row));
      const int c0 = static_cast<int>(std::floor(col));
      const double fr = row - r0;
      const double fc = col - c0;
      const double wgt[4] = {(1.0 - fr) * (1.0 - fc), (1.0 - fr) * fc,
                             fr * (1.0 - fc), fr * fc};
      const int nr[4] = {r0, r0, r0 + 1, r0 + 1};
      const int nc[4] = {c0, c0 + 1, c0, c0 + 1};
      for (int t = 0; t < 4; ++t) {
        if (wgt[t] == 0.0) continue;
        if (nr[t] < 0 || nr[t] >= map_semantic.rows || nc[t] < 0 ||
            nc[t] >= map_semantic.cols) {
          continue;  // out-of-map samples contribute a zero target
        }
        simd::axpy_f32(static_cast<float>(wgt[t]), map_semantic.cell(nr[t], nc[t]),
                       target.data(), out_c);
      }

      adapter.apply(bev.cell(r, l), adapted.data());
      acc += std::sqrt(static_cast<double>(simd::sqdist_f32(adapted.data(), target.data(),
                                                            out_c)));
    }
  }
  return acc / (static_cast<double>(bev.rows) * bev.cols);
}

}  // namespace osmloc
