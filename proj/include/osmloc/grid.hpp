#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "osmloc/error.hpp"
#include "osmloc/geo.hpp"

namespace osmloc {

// Which 2-D lattice a feature tensor lives on. Downstream operations check
// the tag and reject grids from the wrong stage of the pipeline.
enum class FrameTag : std::uint8_t {
  ImagePlane = 0,
  PolarBev = 1,
  CartesianBev = 2,
  MapPlane = 3,
};

const char* frame_tag_name(FrameTag tag);

// Dense C-channel float tensor over a rows x cols lattice, channel-interleaved.
struct FeatureGrid {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  FrameTag frame = FrameTag::ImagePlane;
  std::vector<float> data;  // size rows*cols*channels, row-major

  FeatureGrid() = default;
  FeatureGrid(int r, int c, int ch, FrameTag tag)
      : rows(r), cols(c), channels(ch), frame(tag),
        data(static_cast<std::size_t>(r) * c * ch, 0.0f) {}

  float& at(int r, int c, int ch) {
    return data[(static_cast<std::size_t>(r) * cols + c) * channels + ch];
  }
  float at(int r, int c, int ch) const {
    return data[(static_cast<std::size_t>(r) * cols + c) * channels + ch];
  }
  const float* cell(int r, int c) const {
    return data.data() + (static_cast<std::size_t>(r) * cols + c) * channels;
  }
  float* cell(int r, int c) {
    return data.data() + (static_cast<std::size_t>(r) * cols + c) * channels;
  }
  std::size_t size() const { return data.size(); }

  void require_frame(FrameTag expected, const char* where) const;
  // Throws DataError if any value is non-finite.
  void require_finite(const char* where) const;
};

// 3-channel semantic class raster. Plane 0 holds Area classes, plane 1 Way
// classes, plane 2 Node classes; class id 0 is void/unmapped everywhere.
// Pixel (row i, col j) covers the gsd x gsd square centered at
// (origin.x + j*gsd, origin.y + i*gsd); rows grow North, columns East.
struct RasterMap {
  int width = 0;   // pixels, x/East extent
  int height = 0;  // pixels, y/North extent
  double gsd = 0.5;  // meters per pixel
  LocalPoint origin;  // center of pixel (0, 0)
  std::array<std::vector<std::uint8_t>, 3> planes;  // each height*width, row-major

  RasterMap() = default;
  RasterMap(int w, int h, double g, LocalPoint o) : width(w), height(h), gsd(g), origin(o) {
    for (auto& p : planes) p.assign(static_cast<std::size_t>(w) * h, 0);
  }

  std::uint8_t at(int plane, int row, int col) const {
    return planes[plane][static_cast<std::size_t>(row) * width + col];
  }
  void set(int plane, int row, int col, std::uint8_t v) {
    planes[plane][static_cast<std::size_t>(row) * width + col] = v;
  }
  bool contains(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }
  double pixel_x(int col) const { return origin.x + col * gsd; }
  double pixel_y(int row) const { return origin.y + row * gsd; }
};

// Square crop of a RasterMap centered on a location prior.
struct MapTile {
  RasterMap raster;
  LocalPoint center;
  double height_meters = 0.0;
  double width_meters = 0.0;
};

}  // namespace osmloc
