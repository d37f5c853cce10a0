#include "osmloc/raster.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "osmloc/error.hpp"
#include "osmloc/rng.hpp"

namespace osmloc {

namespace {

// A pixel's plane follows the class group, so a demoted Area way strokes
// its area id into plane 0 rather than leaking it into the Way plane.
int plane_of(const SemanticClass& cls) { return static_cast<int>(cls.group); }

struct ScanEdge {
  double x0, y0, x1, y1;
};

// Even-odd scanline fill over all rings of one polygon. A pixel is filled
// when its center lies inside; the half-open [x_enter, x_exit) span rule
// keeps shared boundaries unambiguous.
void fill_polygon(RasterMap& map, const CanvasPolygon& poly) {
  std::vector<ScanEdge> edges;
  double min_y = 1e300, max_y = -1e300;
  for (const auto& ring : poly.rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const auto& a = ring[i];
      const auto& b = ring[i + 1];
      if (a.y == b.y) continue;  // horizontal edges never cross a scanline
      edges.push_back(ScanEdge{a.x, a.y, b.x, b.y});
      min_y = std::min({min_y, a.y, b.y});
      max_y = std::max({max_y, a.y, b.y});
    }
  }
  if (edges.empty()) return;

  const int row_begin = std::max(0, static_cast<int>(std::ceil((min_y - map.origin.y) / map.gsd)));
  const int row_end = std::min(map.height - 1,
                               static_cast<int>(std::floor((max_y - map.origin.y) / map.gsd)));
  const auto id = static_cast<std::uint8_t>(poly.cls.class_id);

  std::vector<double> crossings;
  for (int row = row_begin; row <= row_end; ++row) {
    const double y = map.pixel_y(row);
    crossings.clear();
    for (const auto& e : edges) {
      const double lo = std::min(e.y0, e.y1);
      const double hi = std::max(e.y0, e.y1);
      if (y < lo || y >= hi) continue;  // half-open in y: [min, max)
      crossings.push_back(e.x0 + (y - e.y0) * (e.x1 - e.x0) / (e.y1 - e.y0));
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      const double x_enter = crossings[i];
      const double x_exit = crossings[i + 1];
      int col = static_cast<int>(std::ceil((x_enter - map.origin.x) / map.gsd));
      col = std::max(col, 0);
      for (; col < map.width; ++col) {
        if (map.pixel_x(col) >= x_exit) break;
        map.set(plane_of(poly.cls), row, col, id);
      }
    }
  }
}

double point_segment_dist2(double px, double py, const LocalPoint& a, const LocalPoint& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((px - a.x) * vx + (py - a.y) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double dx = px - (a.x + t * vx);
  const double dy = py - (a.y + t * vy);
  return dx * dx + dy * dy;
}

void stroke_polyline(RasterMap& map, const CanvasPolyline& line) {
  // Stroke at the class width with round caps; at least one pixel wide.
  const double half_w = std::max(line.cls.way_width_m * 0.5, map.gsd * 0.5);
  const double r2 = half_w * half_w;
  const auto id = static_cast<std::uint8_t>(line.cls.class_id);

  for (std::size_t i = 0; i + 1 < line.pts.size(); ++i) {
    const auto& a = line.pts[i];
    const auto& b = line.pts[i + 1];
    const double min_x = std::min(a.x, b.x) - half_w;
    const double max_x = std::max(a.x, b.x) + half_w;
    const double min_y = std::min(a.y, b.y) - half_w;
    const double max_y = std::max(a.y, b.y) + half_w;
    const int col_begin = std::max(0, static_cast<int>(std::floor((min_x - map.origin.x) / map.gsd)));
    const int col_end = std::min(map.width - 1,
                                 static_cast<int>(std::ceil((max_x - map.origin.x) / map.gsd)));
    const int row_begin = std::max(0, static_cast<int>(std::floor((min_y - map.origin.y) / map.gsd)));
    const int row_end = std::min(map.height - 1,
                                 static_cast<int>(std::ceil((max_y - map.origin.y) / map.gsd)));
    for (int row = row_begin; row <= row_end; ++row) {
      const double y = map.pixel_y(row);
      for (int col = col_begin; col <= col_end; ++col) {
        if (point_segment_dist2(map.pixel_x(col), y, a, b) <= r2) {
          map.set(plane_of(line.cls), row, col, id);
        }
      }
    }
  }
}

void stamp_point(RasterMap& map, const CanvasPoint& point) {
  const int col = static_cast<int>(std::lround((point.pt.x - map.origin.x) / map.gsd));
  const int row = static_cast<int>(std::lround((point.pt.y - map.origin.y) / map.gsd));
  if (map.contains(row, col)) {
    map.set(plane_of(point.cls), row, col, static_cast<std::uint8_t>(point.cls.class_id));
  }
}

// Stable priority order: lower priorities first so higher ones overwrite;
// equal priority keeps insertion order (later element wins).
template <typename T>
std::vector<const T*> by_priority(const std::vector<T>& items) {
  std::vector<const T*> sorted;
  sorted.reserve(items.size());
  for (const auto& item : items) sorted.push_back(&item);
  std::stable_sort(sorted.begin(), sorted.end(), [](const T* a, const T* b) {
    return a->cls.draw_priority < b->cls.draw_priority;
  });
  return sorted;
}

}  // namespace

RasterMap rasterize(const VectorCanvas& canvas, const RectM& bounds, double gsd) {
  if (!(gsd > 0.0)) throw InvariantError("rasterize: gsd must be positive");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0)) {
    throw InvariantError("rasterize: degenerate bounds");
  }
  const int width = std::max(1, static_cast<int>(std::lround(bounds.width() / gsd)));
  const int height = std::max(1, static_cast<int>(std::lround(bounds.height() / gsd)));
  // Pixel (0,0) center sits half a pixel inside the bounds corner so the
  // pixel footprints tile the requested rectangle exactly.
  RasterMap map(width, height, gsd,
                LocalPoint{bounds.min_x + 0.5 * gsd, bounds.min_y + 0.5 * gsd});

  for (const auto* poly : by_priority(canvas.polygons)) fill_polygon(map, *poly);
  for (const auto* line : by_priority(canvas.polylines)) stroke_polyline(map, *line);
  for (const auto* point : by_priority(canvas.points)) stamp_point(map, *point);
  return map;
}

MapTile crop_tile(const RasterMap& map, LocalPoint center, double size_m) {
  if (!(size_m > 0.0)) throw InvariantError("crop_tile: size must be positive");
  const int tile_px = std::max(1, static_cast<int>(std::lround(size_m / map.gsd)));

  // Snap the crop to the source grid so equal-gsd shifts move whole pixels.
  const int col_center = static_cast<int>(std::lround((center.x - map.origin.x) / map.gsd));
  const int row_center = static_cast<int>(std::lround((center.y - map.origin.y) / map.gsd));
  const int col0 = col_center - tile_px / 2;
  const int row0 = row_center - tile_px / 2;

  if (col0 >= map.width || row0 >= map.height || col0 + tile_px <= 0 || row0 + tile_px <= 0) {
    throw OutOfCoverageError("crop_tile: requested tile does not intersect the raster");
  }

  MapTile tile;
  tile.raster = RasterMap(tile_px, tile_px, map.gsd,
                          LocalPoint{map.origin.x + col0 * map.gsd,
                                     map.origin.y + row0 * map.gsd});
  tile.center = center;
  tile.width_meters = tile_px * map.gsd;
  tile.height_meters = tile_px * map.gsd;

  for (int plane = 0; plane < 3; ++plane) {
    for (int row = 0; row < tile_px; ++row) {
      const int src_row = row0 + row;
      if (src_row < 0 || src_row >= map.height) continue;
      const int col_lo = std::max(0, -col0);
      const int col_hi = std::min(tile_px, map.width - col0);
      for (int col = col_lo; col < col_hi; ++col) {
        tile.raster.set(plane, row, col, map.at(plane, src_row, col0 + col));
      }
    }
  }
  return tile;
}

LocalPoint sample_prior(const Pose& gt_pose, double max_offset_m, std::uint64_t rng_seed) {
  if (max_offset_m < 0.0) throw InvariantError("sample_prior: negative radius");
  auto rng = make_rng(rng_seed, "prior");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = max_offset_m * std::sqrt(unit(rng));
  const double ang = 2.0 * kPi * unit(rng);
  return LocalPoint{gt_pose.x + r * std::cos(ang), gt_pose.y + r * std::sin(ang)};
}

}  // namespace osmloc
