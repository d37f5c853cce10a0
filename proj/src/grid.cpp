#include "osmloc/grid.hpp"

#include <cmath>
#include <string>

namespace osmloc {

const char* frame_tag_name(FrameTag tag) {
  switch (tag) {
    case FrameTag::ImagePlane: return "image-plane";
    case FrameTag::PolarBev: return "polar-bev";
    case FrameTag::CartesianBev: return "cartesian-bev";
    case FrameTag::MapPlane: return "map-plane";
  }
  return "unknown";
}

void FeatureGrid::require_frame(FrameTag expected, const char* where) const {
  if (frame != expected) {
    throw DataError(std::string(where) + ": expected a " + frame_tag_name(expected) +
                    " grid, got " + frame_tag_name(frame));
  }
}

void FeatureGrid::require_finite(const char* where) const {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw DataError(std::string(where) + ": non-finite value at flat index " +
                      std::to_string(i));
    }
  }
}

}  // namespace osmloc
