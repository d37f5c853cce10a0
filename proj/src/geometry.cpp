#include "osmloc/geometry.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

bool is_closed(const std::vector<OsmId>& refs) {
  return refs.size() >= 4 && refs.front() == refs.back();
}

// Stitches member way node-id sequences into closed rings by greedy
// endpoint matching. Unstitchable leftovers are counted, not fatal.
std::vector<std::vector<OsmId>> assemble_rings(std::deque<std::vector<OsmId>> segments,
                                               std::size_t* unclosed) {
  std::vector<std::vector<OsmId>> rings;
  while (!segments.empty()) {
    std::vector<OsmId> current = std::move(segments.front());
    segments.pop_front();
    bool stuck = false;
    while (!(current.size() >= 4 && current.front() == current.back())) {
      bool extended = false;
      for (auto it = segments.begin(); it != segments.end(); ++it) {
        if (it->front() == current.back()) {
          current.insert(current.end(), it->begin() + 1, it->end());
          segments.erase(it);
          extended = true;
          break;
        }
        if (it->back() == current.back()) {
          current.insert(current.end(), it->rbegin() + 1, it->rend());
          segments.erase(it);
          extended = true;
          break;
        }
      }
      if (!extended) {
        stuck = true;
        break;
      }
    }
    if (stuck) {
      ++*unclosed;
    } else {
      rings.push_back(std::move(current));
    }
  }
  return rings;
}

}  // namespace

std::string GeometryReport::summary() const {
  std::ostringstream out;
  out << "demoted_area_ways=" << demoted_area_ways
      << " dropped_relations=" << dropped_relations
      << " unclosed_relation_rings=" << unclosed_relation_rings
      << " missing_relation_members=" << missing_relation_members
      << " projection_failures=" << projection_failures;
  return out.str();
}

BuildResult build_geometry(const OsmDocument& doc, const LocalFrame& frame,
                           const ClassTaxonomy& taxonomy) {
  BuildResult result;
  VectorCanvas& canvas = result.canvas;
  GeometryReport& report = result.report;

  auto project_refs = [&](const std::vector<OsmId>& refs)
      -> std::optional<std::vector<LocalPoint>> {
    std::vector<LocalPoint> pts;
    pts.reserve(refs.size());
    for (const OsmId ref : refs) {
      const auto it = doc.nodes.find(ref);
      if (it == doc.nodes.end()) return std::nullopt;  // relations may dangle
      try {
        pts.push_back(project_to_local(it->second.pos, frame));
      } catch (const OutOfCoverageError&) {
        ++report.projection_failures;
        return std::nullopt;
      }
    }
    return pts;
  };

  for (const auto& [id, way] : doc.ways) {
    const auto cls = classify_element(way.tags, taxonomy);
    if (!cls) continue;
    if (cls->group == SemanticGroup::Node) continue;

    auto pts = project_refs(way.node_refs);
    if (!pts) continue;

    if (cls->group == SemanticGroup::Area) {
      if (is_closed(way.node_refs)) {
        CanvasPolygon poly;
        poly.rings.push_back(std::move(*pts));
        poly.cls = *cls;
        canvas.polygons.push_back(std::move(poly));
      } else {
        ++report.demoted_area_ways;
        canvas.polylines.push_back(CanvasPolyline{std::move(*pts), *cls});
      }
    } else {
      canvas.polylines.push_back(CanvasPolyline{std::move(*pts), *cls});
    }
  }

  for (const auto& [id, node] : doc.nodes) {
    const auto cls = classify_element(node.tags, taxonomy);
    if (!cls || cls->group != SemanticGroup::Node) continue;
    try {
      canvas.points.push_back(CanvasPoint{project_to_local(node.pos, frame), *cls});
    } catch (const OutOfCoverageError&) {
      ++report.projection_failures;
    }
  }

  for (const auto& [id, relation] : doc.relations) {
    const auto type_it = relation.tags.find("type");
    if (type_it == relation.tags.end() || type_it->second != "multipolygon") continue;
    const auto cls = classify_element(relation.tags, taxonomy);
    if (!cls || cls->group != SemanticGroup::Area) continue;

    std::deque<std::vector<OsmId>> outer_segments;
    std::deque<std::vector<OsmId>> inner_segments;
    for (const auto& member : relation.members) {
      if (member.type != "way") continue;
      const auto way_it = doc.ways.find(member.ref);
      if (way_it == doc.ways.end()) {
        ++report.missing_relation_members;
        continue;
      }
      // OSM convention: an empty role on a multipolygon member means outer.
      if (member.role == "inner") {
        inner_segments.push_back(way_it->second.node_refs);
      } else {
        outer_segments.push_back(way_it->second.node_refs);
      }
    }

    auto outer_rings = assemble_rings(std::move(outer_segments), &report.unclosed_relation_rings);
    auto inner_rings = assemble_rings(std::move(inner_segments), &report.unclosed_relation_rings);
    if (outer_rings.empty()) {
      ++report.dropped_relations;
      continue;
    }

    CanvasPolygon poly;
    poly.cls = *cls;
    bool ok = true;
    for (auto* rings : {&outer_rings, &inner_rings}) {
      for (auto& ring : *rings) {
        auto pts = project_refs(ring);
        if (!pts) {
          ok = false;
          break;
        }
        poly.rings.push_back(std::move(*pts));
      }
      if (!ok) break;
    }
    if (!ok || poly.rings.empty()) {
      ++report.dropped_relations;
      continue;
    }
    canvas.polygons.push_back(std::move(poly));
  }

  return result;
}

}  // namespace osmloc
