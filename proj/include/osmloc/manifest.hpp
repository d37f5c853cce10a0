#pragma once

#include <string>
#include <vector>

#include "osmloc/mcl.hpp"

namespace osmloc {

// Sequence manifest (JSON):
// {
//   "gsd": 0.5,
//   "motion_noise": [rot1_std, trans_std, rot2_std],   // optional
//   "frames": [
//     {
//       "volume": "frame0.osmf",        // score volume, rank-3 (H, W, K)
//       "origin": [x_meters, y_meters], // map cell (0,0) center
//       "odometry": [forward_m, left_m, dtheta_rad]  // from previous frame
//     }, ...
//   ]
// }
// Volume paths are resolved relative to the manifest file. The first
// frame's odometry may be omitted (it is ignored).
std::vector<TrackFrame> load_manifest(const std::string& path);

}  // namespace osmloc
