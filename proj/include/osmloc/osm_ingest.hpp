#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "osmloc/geo.hpp"
#include "osmloc/taxonomy.hpp"

namespace osmloc {

using OsmId = std::int64_t;

struct OsmNode {
  GeoPoint pos;
  TagMap tags;
};

struct OsmWay {
  std::vector<OsmId> node_refs;
  TagMap tags;
};

struct OsmRelationMember {
  std::string type;  // "node" | "way" | "relation"
  OsmId ref = 0;
  std::string role;
};

struct OsmRelation {
  std::vector<OsmRelationMember> members;
  TagMap tags;
};

struct ParseReport {
  std::size_t nodes = 0;
  std::size_t ways = 0;
  std::size_t relations = 0;
  std::size_t dangling_ways = 0;     // dropped: referenced a missing node id
  std::size_t short_ways = 0;        // dropped: fewer than 2 node refs
  std::size_t element_errors = 0;    // skipped: missing/invalid id, lat, lon, ref
  std::size_t skipped_elements = 0;  // unknown XML elements ignored

  std::string summary() const;
};

// Parsed OSM v0.6 document. Containers are keyed by element id so iteration
// order (and everything derived from it, e.g. raster goldens) is stable.
struct OsmDocument {
  std::map<OsmId, OsmNode> nodes;
  std::map<OsmId, OsmWay> ways;
  std::map<OsmId, OsmRelation> relations;
  ParseReport report;
};

// Parses OSM XML. Throws ParseError (with byte offset) on malformed XML;
// element-level problems (missing id/lat/lon, dangling refs) are recorded
// in the report and the offending element is skipped.
OsmDocument parse_osm_xml(std::string_view xml);
OsmDocument parse_osm_file(const std::string& path);

}  // namespace osmloc
