#include "osmloc/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "osmloc/error.hpp"
#include "osmloc/tensor_io.hpp"

namespace osmloc {

namespace {

using nlohmann::json;

MotionNoise parse_noise(const json& j, const char* where) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string("manifest: ") + where +
                      " must be [rot1_std, trans_std, rot2_std]");
  }
  MotionNoise noise;
  noise.rot1_std = j[0].get<double>();
  noise.trans_std = j[1].get<double>();
  noise.rot2_std = j[2].get<double>();
  if (noise.rot1_std < 0 || noise.trans_std < 0 || noise.rot2_std < 0) {
    throw ConfigError("manifest: motion noise must be non-negative");
  }
  return noise;
}

}  // namespace

std::vector<TrackFrame> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path);

  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("manifest: invalid JSON: " + std::string(e.what()));
  }

  if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array()) {
    throw ConfigError("manifest: expected an object with a 'frames' array");
  }
  if (!doc.contains("gsd") || !doc["gsd"].is_number()) {
    throw ConfigError("manifest: missing numeric 'gsd'");
  }
  const double gsd = doc["gsd"].get<double>();
  if (!(gsd > 0.0)) throw ConfigError("manifest: gsd must be positive");

  MotionNoise noise;
  if (doc.contains("motion_noise")) noise = parse_noise(doc["motion_noise"], "motion_noise");

  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::vector<TrackFrame> frames;
  for (std::size_t i = 0; i < doc["frames"].size(); ++i) {
    const json& jf = doc["frames"][i];
    if (!jf.is_object() || !jf.contains("volume") || !jf.contains("origin")) {
      throw ConfigError("manifest: frame " + std::to_string(i) +
                        " needs 'volume' and 'origin'");
    }
    const json& jorigin = jf["origin"];
    if (!jorigin.is_array() || jorigin.size() != 2) {
      throw ConfigError("manifest: frame " + std::to_string(i) + " origin must be [x, y]");
    }

    TrackFrame frame;
    const std::string volume_path =
        (base / jf["volume"].get<std::string>()).string();
    const FeatureGrid grid = read_osmf_file(volume_path);

    PoseVolume vol(grid.rows, grid.cols, grid.channels, VolumeKind::Score,
                   VolumeGeo{gsd, LocalPoint{jorigin[0].get<double>(),
                                             jorigin[1].get<double>()}});
    for (std::size_t v = 0; v < grid.data.size(); ++v) vol.values[v] = grid.data[v];
    frame.scores = std::move(vol);

    if (i > 0) {
      if (!jf.contains("odometry")) {
        throw ConfigError("manifest: frame " + std::to_string(i) + " missing 'odometry'");
      }
      const json& jodo = jf["odometry"];
      if (!jodo.is_array() || jodo.size() != 3) {
        throw ConfigError("manifest: odometry must be [forward, left, dtheta]");
      }
      frame.motion = MotionInput::from_body_delta(
          jodo[0].get<double>(), jodo[1].get<double>(), jodo[2].get<double>(), noise);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace osmloc
