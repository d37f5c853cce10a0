#pragma once

#include <string>
#include <vector>

#include "osmloc/geo.hpp"
#include "osmloc/osm_ingest.hpp"
#include "osmloc/taxonomy.hpp"

namespace osmloc {

// Filled area. rings[0] is the outer ring; additional rings are holes or
// further outers — the rasterizer fills all rings together with the
// even-odd rule. Every ring is closed (front == back) with >= 4 vertices.
struct CanvasPolygon {
  std::vector<std::vector<LocalPoint>> rings;
  SemanticClass cls;
};

struct CanvasPolyline {
  std::vector<LocalPoint> pts;
  SemanticClass cls;
};

struct CanvasPoint {
  LocalPoint pt;
  SemanticClass cls;
};

// Classified vector geometry in local meters, ready for rasterization.
struct VectorCanvas {
  std::vector<CanvasPolygon> polygons;
  std::vector<CanvasPolyline> polylines;
  std::vector<CanvasPoint> points;
};

struct GeometryReport {
  std::size_t demoted_area_ways = 0;      // unclosed Area ways emitted as polylines
  std::size_t dropped_relations = 0;      // multipolygons with no closed outer ring
  std::size_t unclosed_relation_rings = 0;
  std::size_t missing_relation_members = 0;
  std::size_t projection_failures = 0;    // elements outside the frame validity radius

  std::string summary() const;
};

struct BuildResult {
  VectorCanvas canvas;
  GeometryReport report;
};

// Classifies and projects a parsed document. Closed Area ways become
// polygons, Way-class ways polylines, Node-class nodes points, and
// multipolygon relations polygons with holes. Other relation types are
// ignored.
BuildResult build_geometry(const OsmDocument& doc, const LocalFrame& frame,
                           const ClassTaxonomy& taxonomy);

}  // namespace osmloc
