#include "osmloc/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad number '" + value + "'");
  }
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad integer '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key " + key + ": bad boolean '" + value + "'");
}

std::string thresholds_to_text(const std::vector<Threshold>& thresholds) {
  std::ostringstream out;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (i) out << ",";
    out << fmt_double(thresholds[i].position_m) << ":"
        << fmt_double(thresholds[i].orientation_deg);
  }
  return out.str();
}

std::vector<Threshold> thresholds_from_text(const std::string& key, const std::string& text) {
  std::vector<Threshold> out;
  std::istringstream ss(text);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    const auto colon = pair.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("config key " + key + ": expected pos:deg pairs, got '" + text + "'");
    }
    out.push_back(Threshold{to_double(key, pair.substr(0, colon)),
                            to_double(key, pair.substr(colon + 1))});
  }
  if (out.empty()) throw ConfigError("config key " + key + ": no thresholds");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("config: ") + name + " must be positive");
  };
  positive(gsd, "raster.gsd");
  positive(tile_size_m, "tile.size_m");
  if (prior_radius_m < 0.0) throw ConfigError("config: prior.radius_m must be >= 0");
  positive(bev_delta, "bev.delta");
  if (bev_depth_bins < 1) throw ConfigError("config: bev.depth_bins must be >= 1");
  if (bev_lateral_bins < 1 || bev_lateral_bins % 2 == 0) {
    throw ConfigError("config: bev.lateral_bins must be odd and >= 1");
  }
  if (c_sem < 1) throw ConfigError("config: embed.c_sem must be >= 1");
  if (k_rotations_train < 1 || k_rotations_infer < 1) {
    throw ConfigError("config: rotation counts must be >= 1");
  }
  positive(mcl_varsigma, "mcl.varsigma");
  if (mcl_particles_min < 1 || mcl_particles_init < mcl_particles_min) {
    throw ConfigError("config: mcl particle counts must satisfy init >= min >= 1");
  }
  if (mcl_min_sequence < 1 || mcl_max_sequence < mcl_min_sequence) {
    throw ConfigError("config: mcl sequence bounds must satisfy max >= min >= 1");
  }
  if (mcl_noise_xy < 0.0 || mcl_noise_theta < 0.0) {
    throw ConfigError("config: mcl noise must be >= 0");
  }
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  double prev = 0.0;
  for (const auto& t : thresholds) {
    if (!(t.position_m > 0.0) || !(t.orientation_deg > 0.0) || t.position_m <= prev) {
      throw ConfigError("config: thresholds must be positive and strictly increasing");
    }
    prev = t.position_m;
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "# osmloc run configuration\n";
  out << "raster.gsd = " << fmt_double(gsd) << "\n";
  out << "tile.size_m = " << fmt_double(tile_size_m) << "\n";
  out << "prior.radius_m = " << fmt_double(prior_radius_m) << "\n";
  out << "bev.d0 = " << fmt_double(bev_d0) << "\n";
  out << "bev.delta = " << fmt_double(bev_delta) << "\n";
  out << "bev.depth_bins = " << bev_depth_bins << "\n";
  out << "bev.lateral_bins = " << bev_lateral_bins << "\n";
  out << "bev.single_weighting = " << (bev_single_weighting ? "true" : "false") << "\n";
  out << "embed.c_sem = " << c_sem << "\n";
  out << "match.k_train = " << k_rotations_train << "\n";
  out << "match.k_infer = " << k_rotations_infer << "\n";
  out << "loss.lambda_pose = " << fmt_double(lambda_pose) << "\n";
  out << "loss.lambda_disparity = " << fmt_double(lambda_disparity) << "\n";
  out << "loss.lambda_semantic = " << fmt_double(lambda_semantic) << "\n";
  out << "eval.thresholds = " << thresholds_to_text(thresholds) << "\n";
  out << "mcl.varsigma = " << fmt_double(mcl_varsigma) << "\n";
  out << "mcl.particles_init = " << mcl_particles_init << "\n";
  out << "mcl.particles_min = " << mcl_particles_min << "\n";
  out << "mcl.min_sequence = " << mcl_min_sequence << "\n";
  out << "mcl.max_sequence = " << mcl_max_sequence << "\n";
  out << "mcl.noise_xy = " << fmt_double(mcl_noise_xy) << "\n";
  out << "mcl.noise_theta = " << fmt_double(mcl_noise_theta) << "\n";
  out << "seed = " << seed << "\n";
  out << "threads = " << threads << "\n";
  return out.str();
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "raster.gsd") cfg.gsd = to_double(key, value);
    else if (key == "tile.size_m") cfg.tile_size_m = to_double(key, value);
    else if (key == "prior.radius_m") cfg.prior_radius_m = to_double(key, value);
    else if (key == "bev.d0") cfg.bev_d0 = to_double(key, value);
    else if (key == "bev.delta") cfg.bev_delta = to_double(key, value);
    else if (key == "bev.depth_bins") cfg.bev_depth_bins = to_int(key, value);
    else if (key == "bev.lateral_bins") cfg.bev_lateral_bins = to_int(key, value);
    else if (key == "bev.single_weighting") cfg.bev_single_weighting = to_bool(key, value);
    else if (key == "embed.c_sem") cfg.c_sem = to_int(key, value);
    else if (key == "match.k_train") cfg.k_rotations_train = to_int(key, value);
    else if (key == "match.k_infer") cfg.k_rotations_infer = to_int(key, value);
    else if (key == "loss.lambda_pose") cfg.lambda_pose = to_double(key, value);
    else if (key == "loss.lambda_disparity") cfg.lambda_disparity = to_double(key, value);
    else if (key == "loss.lambda_semantic") cfg.lambda_semantic = to_double(key, value);
    else if (key == "eval.thresholds") cfg.thresholds = thresholds_from_text(key, value);
    else if (key == "mcl.varsigma") cfg.mcl_varsigma = to_double(key, value);
    else if (key == "mcl.particles_init") cfg.mcl_particles_init = to_int(key, value);
    else if (key == "mcl.particles_min") cfg.mcl_particles_min = to_int(key, value);
    else if (key == "mcl.min_sequence") cfg.mcl_min_sequence = to_int(key, value);
    else if (key == "mcl.max_sequence") cfg.mcl_max_sequence = to_int(key, value);
    else if (key == "mcl.noise_xy") cfg.mcl_noise_xy = to_double(key, value);
    else if (key == "mcl.noise_theta") cfg.mcl_noise_theta = to_double(key, value);
    else if (key == "seed") {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config key seed: bad value '" + value + "'");
      }
      cfg.seed = v;
    } else if (key == "threads") cfg.threads = to_int(key, value);
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void RunConfig::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open config for writing: " + path);
  out << to_text();
}

}  // namespace osmloc
