#include "osmloc/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

// Built-in rule table. The same text ships as configs/default_taxonomy.txt
// so users can copy and adapt it; a unit test keeps the two in sync.
constexpr const char* kDefaultTaxonomy = R"(# osmloc taxonomy: ordered tag-to-class rules for rasterization.
# Grammar: one [group.name] section per class, keys id / priority /
# width_m (ways only) and one or more "match = key=value" predicates
# (value * matches any). The first matching section in file order wins.
version = osmloc-default-1

[area.building]
id = 1
priority = 60
match = building=*
match = building:part=yes

[area.parking]
id = 2
priority = 30
match = amenity=parking

[area.grass]
id = 3
priority = 10
match = landuse=grass
match = landuse=meadow
match = landuse=village_green
match = landuse=recreation_ground
match = leisure=park
match = leisure=garden

[area.forest]
id = 4
priority = 20
match = landuse=forest
match = natural=wood

[area.water]
id = 5
priority = 50
match = natural=water
match = landuse=reservoir
match = landuse=basin
match = waterway=riverbank

[area.playground]
id = 6
priority = 40
match = leisure=playground
match = leisure=pitch

[way.major_road]
id = 1
priority = 50
width_m = 6
match = highway=motorway
match = highway=trunk
match = highway=primary
match = highway=secondary
match = highway=motorway_link
match = highway=trunk_link
match = highway=primary_link
match = highway=secondary_link

[way.minor_road]
id = 2
priority = 40
width_m = 4
match = highway=tertiary
match = highway=tertiary_link
match = highway=residential
match = highway=unclassified
match = highway=service
match = highway=living_street

[way.path]
id = 3
priority = 10
width_m = 1
match = highway=footway
match = highway=path
match = highway=pedestrian
match = highway=steps
match = highway=track

[way.cycleway]
id = 4
priority = 20
width_m = 1.5
match = highway=cycleway

[way.rail]
id = 5
priority = 30
width_m = 2
match = railway=rail
match = railway=tram
match = railway=light_rail
match = railway=subway

[node.traffic_signal]
id = 4
priority = 60
match = highway=traffic_signals
match = crossing=traffic_signals

[node.crossing]
id = 3
priority = 40
match = highway=crossing
match = railway=crossing

[node.bus_stop]
id = 5
priority = 50
match = highway=bus_stop
match = public_transport=stop_position

[node.street_lamp]
id = 2
priority = 30
match = highway=street_lamp

[node.tree]
id = 1
priority = 20
match = natural=tree

[node.poi]
id = 6
priority = 10
match = amenity=*
match = shop=*
match = tourism=*
)";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<SemanticGroup> parse_group(const std::string& name) {
  if (name == "area") return SemanticGroup::Area;
  if (name == "way") return SemanticGroup::Way;
  if (name == "node") return SemanticGroup::Node;
  return std::nullopt;
}

}  // namespace

const char* semantic_group_name(SemanticGroup g) {
  switch (g) {
    case SemanticGroup::Area: return "area";
    case SemanticGroup::Way: return "way";
    case SemanticGroup::Node: return "node";
  }
  return "unknown";
}

bool TagRule::matches(const TagMap& tags) const {
  const auto it = tags.find(key);
  if (it == tags.end()) return false;
  return value == "*" || it->second == value;
}

void ClassTaxonomy::add_rule(ClassRule rule) {
  if (rule.cls.class_id < 1 || rule.cls.class_id > 255) {
    throw ConfigError("taxonomy rule " + rule.name + ": id must be in [1, 255]");
  }
  if (rule.matches.empty()) {
    throw ConfigError("taxonomy rule " + rule.name + " has no match predicates");
  }
  for (const auto& existing : rules_) {
    if (existing.name == rule.name) {
      throw ConfigError("duplicate taxonomy rule name " + rule.name);
    }
    if (existing.cls.group == rule.cls.group && existing.cls.class_id == rule.cls.class_id) {
      throw ConfigError("duplicate class id in group for " + rule.name);
    }
  }
  int& size = group_size_[static_cast<int>(rule.cls.group)];
  size = std::max(size, rule.cls.class_id + 1);
  rules_.push_back(std::move(rule));
}

ClassTaxonomy ClassTaxonomy::parse(const std::string& text) {
  ClassTaxonomy tax;
  std::istringstream in(text);
  std::string line;
  std::optional<ClassRule> current;
  bool saw_priority = false;
  int lineno = 0;

  auto flush = [&] {
    if (current) {
      if (!saw_priority) {
        throw ConfigError("taxonomy rule " + current->name + " missing priority");
      }
      tax.add_rule(std::move(*current));
      current.reset();
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("taxonomy line " + std::to_string(lineno) + ": unterminated section");
      }
      flush();
      const std::string name = trim(line.substr(1, line.size() - 2));
      const auto dot = name.find('.');
      if (dot == std::string::npos) {
        throw ConfigError("taxonomy section '" + name + "' must be group.class");
      }
      const auto group = parse_group(name.substr(0, dot));
      if (!group) {
        throw ConfigError("taxonomy section '" + name + "': unknown group");
      }
      current = ClassRule{};
      current->name = name;
      current->cls.group = *group;
      saw_priority = false;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("taxonomy line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (!current) {
      if (key == "version") {
        tax.version_ = value;
        continue;
      }
      throw ConfigError("taxonomy line " + std::to_string(lineno) + ": key outside a section");
    }

    if (key == "id") {
      current->cls.class_id = std::stoi(value);
    } else if (key == "priority") {
      current->cls.draw_priority = std::stoi(value);
      saw_priority = true;
    } else if (key == "width_m") {
      current->cls.way_width_m = std::stod(value);
    } else if (key == "match") {
      const auto meq = value.find('=');
      if (meq == std::string::npos || meq == 0) {
        throw ConfigError("taxonomy line " + std::to_string(lineno) +
                          ": match must be key=value");
      }
      current->matches.push_back(TagRule{value.substr(0, meq), value.substr(meq + 1)});
    } else {
      throw ConfigError("taxonomy line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  flush();
  if (tax.rules_.empty()) throw ConfigError("taxonomy has no rules");
  return tax;
}

ClassTaxonomy ClassTaxonomy::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

ClassTaxonomy ClassTaxonomy::default_taxonomy() { return parse(kDefaultTaxonomy); }

std::optional<SemanticClass> ClassTaxonomy::classify(const TagMap& tags) const {
  if (tags.empty()) return std::nullopt;
  for (const auto& rule : rules_) {
    for (const auto& predicate : rule.matches) {
      if (predicate.matches(tags)) return rule.cls;
    }
  }
  return std::nullopt;
}

const std::string* ClassTaxonomy::class_name(SemanticGroup g, int class_id) const {
  for (const auto& rule : rules_) {
    if (rule.cls.group == g && rule.cls.class_id == class_id) return &rule.name;
  }
  return nullptr;
}

}  // namespace osmloc
