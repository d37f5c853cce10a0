#pragma once

#include <string>

#include "osmloc/grid.hpp"
#include "osmloc/match.hpp"

namespace osmloc {

// Debug visualization of a class raster: composites the three planes
// (areas under ways under nodes) into an 8-bit palette PNG with one fixed
// color per (plane, class id).
void write_raster_png(const std::string& path, const RasterMap& map);

// Per-(h, w) max-over-rotations likelihood heatmap as 16-bit grayscale,
// normalized to the volume's own [min, max].
void write_heatmap_png(const std::string& path, const PoseVolume& volume);

}  // namespace osmloc
