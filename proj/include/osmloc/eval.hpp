#pragma once

#include <string>
#include <vector>

#include "osmloc/geo.hpp"

namespace osmloc {

struct EvalRecord {
  std::string frame;
  Pose predicted;
  Pose ground_truth;
  std::vector<Pose> top_candidates;  // optional, best first
};

// Position/orientation tolerance pair (meters, degrees).
struct Threshold {
  double position_m = 0.0;
  double orientation_deg = 0.0;
};

// Per Eq-style strict inequalities: an error exactly at the threshold does
// not count as a success.
double position_recall(const std::vector<EvalRecord>& records, double sigma_p_m);
double orientation_recall(const std::vector<EvalRecord>& records, double sigma_o_deg);

struct AbsoluteErrors {
  double ape_m = 0.0;    // mean Euclidean position error
  double aoe_deg = 0.0;  // mean wrapped absolute angle error
};

AbsoluteErrors ape_aoe(const std::vector<EvalRecord>& records);

// Position error decomposed in the ground-truth viewing frame:
// longitudinal along the heading, lateral perpendicular to it.
struct LatLonMetrics {
  std::vector<double> lat_recall;  // per threshold
  std::vector<double> lon_recall;
  double alat_m = 0.0;  // mean |lateral error|
  double alon_m = 0.0;  // mean |longitudinal error|
};

LatLonMetrics lat_lon_decompose(const std::vector<EvalRecord>& records,
                                const std::vector<Threshold>& thresholds);

// Success modes for the top-k recall curve. Joint requires both the
// position and the orientation tolerance on the same candidate.
enum class TopkMode { Joint, Marginal };

// recall[k-1] = fraction of records whose best candidate among the first k
// meets the threshold; non-decreasing in k.
std::vector<double> recall_curve_topk(const std::vector<EvalRecord>& records,
                                      const Threshold& threshold, int k_max,
                                      TopkMode mode = TopkMode::Joint);

// CSV interchange: header
// frame,pred_x,pred_y,pred_theta,gt_x,gt_y,gt_theta
std::vector<EvalRecord> read_records_csv(const std::string& path);
void write_records_csv(const std::string& path, const std::vector<EvalRecord>& records);
// Sidecar with ranked candidates: frame,rank,x,y,theta
void read_topk_sidecar_csv(const std::string& path, std::vector<EvalRecord>& records);

}  // namespace osmloc
