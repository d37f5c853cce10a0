#include "osmloc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

void require_records(const std::vector<EvalRecord>& records, const char* where) {
  if (records.empty()) throw InvariantError(std::string(where) + ": empty record set");
}

double position_error(const EvalRecord& r) {
  return std::hypot(r.predicted.x - r.ground_truth.x, r.predicted.y - r.ground_truth.y);
}

double orientation_error_rad(const Pose& a, const Pose& b) {
  return angle_abs_diff(a.theta, b.theta);
}

// Error vector components in the ground-truth viewing frame.
void lat_lon_error(const EvalRecord& r, double* lateral, double* longitudinal) {
  const double ex = r.predicted.x - r.ground_truth.x;
  const double ey = r.predicted.y - r.ground_truth.y;
  const Pose& gt = r.ground_truth;
  *longitudinal = ex * gt.fx() + ey * gt.fy();
  *lateral = ex * gt.rx() + ey * gt.ry();
}

bool candidate_success(const Pose& candidate, const Pose& gt, const Threshold& t,
                       TopkMode mode) {
  const double pos_err = std::hypot(candidate.x - gt.x, candidate.y - gt.y);
  const double ang_err_deg = angle_abs_diff(candidate.theta, gt.theta) * 180.0 / kPi;
  if (mode == TopkMode::Joint) {
    return pos_err < t.position_m && ang_err_deg < t.orientation_deg;
  }
  return pos_err < t.position_m;
}

}  // namespace

double position_recall(const std::vector<EvalRecord>& records, double sigma_p_m) {
  require_records(records, "position_recall");
  std::size_t hits = 0;
  for (const auto& r : records) {
    if (position_error(r) < sigma_p_m) ++hits;
  }
  return static_cast<double>(hits) / records.size();
}

double orientation_recall(const std::vector<EvalRecord>& records, double sigma_o_deg) {
  require_records(records, "orientation_recall");
  std::size_t hits = 0;
  for (const auto& r : records) {
    const double err_deg = orientation_error_rad(r.predicted, r.ground_truth) * 180.0 / kPi;
    if (err_deg < sigma_o_deg) ++hits;
  }
  return static_cast<double>(hits) / records.size();
}

AbsoluteErrors ape_aoe(const std::vector<EvalRecord>& records) {
  require_records(records, "ape_aoe");
  double pos_sum = 0.0, ang_sum = 0.0;
  for (const auto& r : records) {
    pos_sum += position_error(r);
    ang_sum += orientation_error_rad(r.predicted, r.ground_truth);
  }
  return AbsoluteErrors{pos_sum / records.size(),
                        ang_sum / records.size() * 180.0 / kPi};
}

LatLonMetrics lat_lon_decompose(const std::vector<EvalRecord>& records,
                                const std::vector<Threshold>& thresholds) {
  require_records(records, "lat_lon_decompose");
  LatLonMetrics out;
  out.lat_recall.assign(thresholds.size(), 0.0);
  out.lon_recall.assign(thresholds.size(), 0.0);

  double lat_sum = 0.0, lon_sum = 0.0;
  for (const auto& r : records) {
    double lateral = 0.0, longitudinal = 0.0;
    lat_lon_error(r, &lateral, &longitudinal);
    lat_sum += std::abs(lateral);
    lon_sum += std::abs(longitudinal);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (std::abs(lateral) < thresholds[i].position_m) out.lat_recall[i] += 1.0;
      if (std::abs(longitudinal) < thresholds[i].position_m) out.lon_recall[i] += 1.0;
    }
  }
  const double inv = 1.0 / records.size();
  for (auto& v : out.lat_recall) v *= inv;
  for (auto& v : out.lon_recall) v *= inv;
  out.alat_m = lat_sum * inv;
  out.alon_m = lon_sum * inv;
  return out;
}

std::vector<double> recall_curve_topk(const std::vector<EvalRecord>& records,
                                      const Threshold& threshold, int k_max,
                                      TopkMode mode) {
  require_records(records, "recall_curve_topk");
  if (k_max < 1) throw InvariantError("recall_curve_topk: k_max must be >= 1");
  for (const auto& r : records) {
    if (static_cast<int>(r.top_candidates.size()) < k_max) {
      throw InvariantError("recall_curve_topk: record " + r.frame + " has fewer than " +
                           std::to_string(k_max) + " candidates");
    }
  }

  std::vector<double> curve(k_max, 0.0);
  for (const auto& r : records) {
    int first_hit = -1;
    for (int k = 0; k < k_max; ++k) {
      if (candidate_success(r.top_candidates[k], r.ground_truth, threshold, mode)) {
        first_hit = k;
        break;
      }
    }
    if (first_hit >= 0) {
      for (int k = first_hit; k < k_max; ++k) curve[k] += 1.0;
    }
  }
  for (auto& v : curve) v /= records.size();
  return curve;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_field(const std::string& s, const std::string& line) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw FormatError("records CSV: bad numeric field '" + s + "' in line: " + line);
  }
}

}  // namespace

std::vector<EvalRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open records CSV: " + path);

  std::vector<EvalRecord> records;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("frame", 0) == 0) continue;  // header
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw FormatError("records CSV: expected 7 fields, got " +
                        std::to_string(fields.size()) + " in line: " + line);
    }
    EvalRecord r;
    r.frame = fields[0];
    r.predicted = Pose{parse_field(fields[1], line), parse_field(fields[2], line),
                       wrap_angle(parse_field(fields[3], line))};
    r.ground_truth = Pose{parse_field(fields[4], line), parse_field(fields[5], line),
                          wrap_angle(parse_field(fields[6], line))};
    records.push_back(std::move(r));
  }
  return records;
}

void write_records_csv(const std::string& path, const std::vector<EvalRecord>& records) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "frame,pred_x,pred_y,pred_theta,gt_x,gt_y,gt_theta\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f\n", r.frame.c_str(),
                  r.predicted.x, r.predicted.y, r.predicted.theta, r.ground_truth.x,
                  r.ground_truth.y, r.ground_truth.theta);
    out << buf;
  }
}

void read_topk_sidecar_csv(const std::string& path, std::vector<EvalRecord>& records) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open top-k sidecar CSV: " + path);

  std::map<std::string, std::vector<std::pair<int, Pose>>> by_frame;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("frame", 0) == 0) continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 5) {
      throw FormatError("top-k sidecar: expected 5 fields in line: " + line);
    }
    const int rank = static_cast<int>(parse_field(fields[1], line));
    by_frame[fields[0]].emplace_back(
        rank, Pose{parse_field(fields[2], line), parse_field(fields[3], line),
                   wrap_angle(parse_field(fields[4], line))});
  }

  for (auto& r : records) {
    const auto it = by_frame.find(r.frame);
    if (it == by_frame.end()) continue;
    auto& ranked = it->second;
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    r.top_candidates.clear();
    for (const auto& [rank, pose] : ranked) r.top_candidates.push_back(pose);
  }
}

}  // namespace osmloc
