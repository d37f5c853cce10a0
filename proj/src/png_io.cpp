#include "osmloc/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <vector>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

struct PngWriter {
  FILE* file = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;

  explicit PngWriter(const std::string& path) {
    file = std::fopen(path.c_str(), "wb");
    if (!file) throw ConfigError("cannot open PNG for writing: " + path);
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) {
      if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
      std::fclose(file);
      throw Error("libpng initialization failed");
    }
  }

  ~PngWriter() {
    png_destroy_write_struct(&png, &info);
    if (file) std::fclose(file);
  }

  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

// Fixed palette: index = plane * 64 + class_id. Hue varies per plane,
// brightness per class, so adjacent ids stay distinguishable.
png_color palette_color(int plane, int id) {
  if (id == 0) return png_color{20, 20, 20};
  const int shade = 120 + (id * 45) % 136;
  switch (plane) {
    case 0: return png_color{static_cast<png_byte>(shade / 2),
                             static_cast<png_byte>(shade / 2),
                             static_cast<png_byte>(shade)};  // areas: blue
    case 1: return png_color{static_cast<png_byte>(shade),
                             static_cast<png_byte>(shade / 3), 40};  // ways: orange
    default: return png_color{40, static_cast<png_byte>(shade), 60};  // nodes: green
  }
}

}  // namespace

void write_raster_png(const std::string& path, const RasterMap& map) {
  PngWriter writer(path);
  if (setjmp(png_jmpbuf(writer.png))) {
    throw Error("libpng write failure for " + path);
  }
  png_init_io(writer.png, writer.file);
  png_set_IHDR(writer.png, writer.info, map.width, map.height, 8,
               PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);

  std::vector<png_color> palette(192);
  for (int plane = 0; plane < 3; ++plane) {
    for (int id = 0; id < 64; ++id) palette[plane * 64 + id] = palette_color(plane, id);
  }
  png_set_PLTE(writer.png, writer.info, palette.data(), static_cast<int>(palette.size()));
  png_write_info(writer.png, writer.info);

  // Top raster row is the northernmost; PNG rows go top-down.
  std::vector<png_byte> row(map.width);
  for (int r = map.height - 1; r >= 0; --r) {
    for (int c = 0; c < map.width; ++c) {
      int plane = 0;
      int id = map.at(0, r, c);
      if (const int way = map.at(1, r, c)) {
        plane = 1;
        id = way;
      }
      if (const int node = map.at(2, r, c)) {
        plane = 2;
        id = node;
      }
      row[c] = static_cast<png_byte>(plane * 64 + std::min(id, 63));
    }
    png_write_row(writer.png, row.data());
  }
  png_write_end(writer.png, writer.info);
}

void write_heatmap_png(const std::string& path, const PoseVolume& volume) {
  double lo = 1e300, hi = -1e300;
  std::vector<double> flat(static_cast<std::size_t>(volume.height) * volume.width, 0.0);
  for (int h = 0; h < volume.height; ++h) {
    for (int w = 0; w < volume.width; ++w) {
      double best = volume.at(h, w, 0);
      for (int k = 1; k < volume.rotations; ++k) best = std::max(best, volume.at(h, w, k));
      flat[static_cast<std::size_t>(h) * volume.width + w] = best;
      lo = std::min(lo, best);
      hi = std::max(hi, best);
    }
  }
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;

  PngWriter writer(path);
  if (setjmp(png_jmpbuf(writer.png))) {
    throw Error("libpng write failure for " + path);
  }
  png_init_io(writer.png, writer.file);
  png_set_IHDR(writer.png, writer.info, volume.width, volume.height, 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);

  std::vector<png_byte> row(static_cast<std::size_t>(volume.width) * 2);
  for (int h = volume.height - 1; h >= 0; --h) {
    for (int w = 0; w < volume.width; ++w) {
      const auto v = static_cast<std::uint16_t>(
          (flat[static_cast<std::size_t>(h) * volume.width + w] - lo) * scale + 0.5);
      row[2 * w] = static_cast<png_byte>(v >> 8);  // PNG is big-endian
      row[2 * w + 1] = static_cast<png_byte>(v & 0xFF);
    }
    png_write_row(writer.png, row.data());
  }
  png_write_end(writer.png, writer.info);
}

}  // namespace osmloc
