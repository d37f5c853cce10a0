#pragma once

#include <cstdint>

#include "osmloc/geometry.hpp"
#include "osmloc/grid.hpp"

namespace osmloc {

// Axis-aligned rectangle in local meters.
struct RectM {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Rasterizes the canvas into a 3-plane class-id grid covering `bounds` at
// the given ground sampling distance. Polygons are filled with the even-odd
// scanline rule into plane 0, polylines stroked at their class width into
// plane 1, points stamped as single pixels into plane 2. Within a plane a
// higher draw_priority overwrites a lower one; ties go to the later element.
RasterMap rasterize(const VectorCanvas& canvas, const RectM& bounds, double gsd);

// Axis-aligned crop of `size_m` x `size_m` around `center`, snapped to the
// source pixel grid. Pixels outside the source raster are void (class 0).
// Throws OutOfCoverageError when the crop does not intersect the raster.
MapTile crop_tile(const RasterMap& map, LocalPoint center, double size_m);

// Uniform sample in the disc of radius `max_offset_m` around the ground
// truth position; deterministic for a fixed seed.
LocalPoint sample_prior(const Pose& gt_pose, double max_offset_m, std::uint64_t rng_seed);

}  // namespace osmloc
