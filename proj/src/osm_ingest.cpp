#include "osmloc/osm_ingest.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "osmloc/error.hpp"

namespace osmloc {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

struct Attr {
  std::string name;
  std::string value;
};

struct StartTag {
  std::string name;
  std::vector<Attr> attrs;
  bool self_closing = false;
  std::size_t offset = 0;

  const std::string* find(std::string_view key) const {
    for (const auto& a : attrs) {
      if (a.name == key) return &a.value;
    }
    return nullptr;
  }
};

// Minimal pull scanner for the XML subset OSM exports use: elements,
// attributes, comments, CDATA, processing instructions and a DOCTYPE
// prolog. Character data between tags is skipped.
class XmlScanner {
 public:
  explicit XmlScanner(std::string_view text) : text_(text) {}

  enum class Kind { Start, End, Eof };

  Kind next(StartTag& start, std::string& end_name) {
    for (;;) {
      // Skip character data up to the next markup.
      while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
      if (pos_ >= text_.size()) return Kind::Eof;

      const std::size_t tag_offset = pos_;
      ++pos_;  // consume '<'
      if (pos_ >= text_.size()) fail("unterminated markup", tag_offset);

      if (starts_with("!--")) {
        skip_until("-->", tag_offset, "unterminated comment");
        continue;
      }
      if (starts_with("![CDATA[")) {
        skip_until("]]>", tag_offset, "unterminated CDATA section");
        continue;
      }
      if (text_[pos_] == '?') {
        skip_until("?>", tag_offset, "unterminated processing instruction");
        continue;
      }
      if (text_[pos_] == '!') {
        skip_doctype(tag_offset);
        continue;
      }
      if (text_[pos_] == '/') {
        ++pos_;
        end_name = read_name(tag_offset);
        skip_ws();
        expect('>', "expected '>' after closing tag name");
        return Kind::End;
      }

      start = StartTag{};
      start.offset = tag_offset;
      start.name = read_name(tag_offset);
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size()) fail("unterminated start tag", tag_offset);
        if (text_[pos_] == '>') {
          ++pos_;
          return Kind::Start;
        }
        if (text_[pos_] == '/') {
          ++pos_;
          expect('>', "expected '>' after '/'");
          start.self_closing = true;
          return Kind::Start;
        }
        Attr attr;
        attr.name = read_name(pos_);
        skip_ws();
        expect('=', "expected '=' after attribute name");
        skip_ws();
        attr.value = read_quoted();
        start.attrs.push_back(std::move(attr));
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
    throw ParseError("OSM XML: " + msg, offset);
  }

  bool starts_with(std::string_view s) const {
    return text_.substr(pos_).substr(0, s.size()) == s;
  }

  void skip_until(std::string_view close, std::size_t open_offset, const char* msg) {
    const auto found = text_.find(close, pos_);
    if (found == std::string_view::npos) fail(msg, open_offset);
    pos_ = found + close.size();
  }

  void skip_doctype(std::size_t open_offset) {
    int bracket_depth = 0;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '[') ++bracket_depth;
      else if (c == ']') --bracket_depth;
      else if (c == '>' && bracket_depth <= 0) return;
    }
    fail("unterminated declaration", open_offset);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c, const char* msg) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(msg, pos_);
    ++pos_;
  }

  std::string read_name(std::size_t context_offset) {
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) {
      fail("expected a name", context_offset);
    }
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  std::string read_quoted() {
    if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
      fail("expected a quoted attribute value", pos_);
    }
    const char quote = text_[pos_++];
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      const char c = text_[pos_];
      if (c == '&') {
        out += read_entity();
      } else {
        out += c;
        ++pos_;
      }
    }
    if (pos_ >= text_.size()) fail("unterminated attribute value", pos_);
    ++pos_;  // closing quote
    return out;
  }

  std::string read_entity() {
    const std::size_t amp = pos_;
    const auto semi = text_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) {
      fail("unterminated entity reference", amp);
    }
    const std::string_view body = text_.substr(pos_ + 1, semi - pos_ - 1);
    pos_ = semi + 1;
    if (body == "amp") return "&";
    if (body == "lt") return "<";
    if (body == "gt") return ">";
    if (body == "quot") return "\"";
    if (body == "apos") return "'";
    if (!body.empty() && body[0] == '#') {
      unsigned long code = 0;
      try {
        code = (body.size() > 1 && (body[1] == 'x' || body[1] == 'X'))
                   ? std::stoul(std::string(body.substr(2)), nullptr, 16)
                   : std::stoul(std::string(body.substr(1)), nullptr, 10);
      } catch (const std::exception&) {
        fail("bad numeric character reference", amp);
      }
      // Encode as UTF-8.
      std::string out;
      if (code < 0x80) {
        out += static_cast<char>(code);
      } else if (code < 0x800) {
        out += static_cast<char>(0xC0 | (code >> 6));
        out += static_cast<char>(0x80 | (code & 0x3F));
      } else if (code < 0x10000) {
        out += static_cast<char>(0xE0 | (code >> 12));
        out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (code & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (code >> 18));
        out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (code & 0x3F));
      }
      return out;
    }
    fail("unknown entity reference", amp);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::optional<OsmId> parse_id(const std::string& s) {
  OsmId v = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

std::string ParseReport::summary() const {
  std::ostringstream out;
  out << "nodes=" << nodes << " ways=" << ways << " relations=" << relations
      << " dangling_ways=" << dangling_ways << " short_ways=" << short_ways
      << " element_errors=" << element_errors << " skipped_elements=" << skipped_elements;
  return out.str();
}

OsmDocument parse_osm_xml(std::string_view xml) {
  OsmDocument doc;
  XmlScanner scanner(xml);

  StartTag tag;
  std::string end_name;

  // Context while inside a node/way/relation element.
  enum class Ctx { None, Node, Way, Relation, Skip };
  Ctx ctx = Ctx::None;
  int depth = 0;       // element nesting depth (root <osm> is depth 1)
  int ctx_depth = 0;   // depth at which the current context element sits
  OsmId ctx_id = 0;
  OsmNode cur_node;
  OsmWay cur_way;
  OsmRelation cur_relation;
  bool ctx_valid = false;

  auto close_context = [&] {
    if (ctx == Ctx::Node && ctx_valid) {
      doc.nodes[ctx_id] = std::move(cur_node);
      ++doc.report.nodes;
    } else if (ctx == Ctx::Way && ctx_valid) {
      doc.ways[ctx_id] = std::move(cur_way);
      ++doc.report.ways;
    } else if (ctx == Ctx::Relation && ctx_valid) {
      doc.relations[ctx_id] = std::move(cur_relation);
      ++doc.report.relations;
    }
    ctx = Ctx::None;
  };

  for (;;) {
    const auto kind = scanner.next(tag, end_name);
    if (kind == XmlScanner::Kind::Eof) break;

    if (kind == XmlScanner::Kind::End) {
      if (depth == 0) throw ParseError("OSM XML: unmatched closing tag", 0);
      if (ctx != Ctx::None && depth == ctx_depth) close_context();
      --depth;
      continue;
    }

    const int element_depth = depth + 1;
    if (!tag.self_closing) ++depth;

    if (ctx == Ctx::Skip) {
      if (tag.self_closing || element_depth > ctx_depth) continue;
    }

    if (element_depth == 1) {
      // Root element; OSM exports use <osm version="0.6" ...>.
      continue;
    }

    auto begin_context = [&](Ctx what) {
      ctx = what;
      ctx_depth = element_depth;
      ctx_valid = true;
      if (tag.self_closing) {
        // Self-closing node/way/relation: commit immediately.
        ctx_depth = 0;
      }
    };

    if (element_depth == 2 && ctx == Ctx::None) {
      if (tag.name == "node") {
        const std::string* id = tag.find("id");
        const std::string* lat = tag.find("lat");
        const std::string* lon = tag.find("lon");
        const auto pid = id ? parse_id(*id) : std::nullopt;
        const auto plat = lat ? parse_double(*lat) : std::nullopt;
        const auto plon = lon ? parse_double(*lon) : std::nullopt;
        if (!pid || !plat || !plon || *plat < -90.0 || *plat > 90.0 || *plon < -180.0 ||
            *plon > 180.0) {
          ++doc.report.element_errors;
          if (!tag.self_closing) {
            ctx = Ctx::Skip;
            ctx_depth = element_depth;
          }
          continue;
        }
        cur_node = OsmNode{};
        cur_node.pos = GeoPoint{*plat, *plon};
        ctx_id = *pid;
        begin_context(Ctx::Node);
        if (tag.self_closing) {
          doc.nodes[ctx_id] = std::move(cur_node);
          ++doc.report.nodes;
          ctx = Ctx::None;
        }
        continue;
      }
      if (tag.name == "way" || tag.name == "relation") {
        const std::string* id = tag.find("id");
        const auto pid = id ? parse_id(*id) : std::nullopt;
        if (!pid) {
          ++doc.report.element_errors;
          if (!tag.self_closing) {
            ctx = Ctx::Skip;
            ctx_depth = element_depth;
          }
          continue;
        }
        ctx_id = *pid;
        if (tag.name == "way") {
          cur_way = OsmWay{};
          begin_context(Ctx::Way);
          if (tag.self_closing) {
            // Way with no node refs; dropped below as a short way.
            ++doc.report.short_ways;
            ctx = Ctx::None;
          }
        } else {
          cur_relation = OsmRelation{};
          begin_context(Ctx::Relation);
          if (tag.self_closing) {
            doc.relations[ctx_id] = std::move(cur_relation);
            ++doc.report.relations;
            ctx = Ctx::None;
          }
        }
        continue;
      }
      if (tag.name == "bounds") {
        // Standard export furniture; carries no map content.
        if (!tag.self_closing) {
          ctx = Ctx::Skip;
          ctx_depth = element_depth;
        }
        continue;
      }
      ++doc.report.skipped_elements;
      if (!tag.self_closing) {
        ctx = Ctx::Skip;
        ctx_depth = element_depth;
      }
      continue;
    }

    // Children of node/way/relation.
    if (ctx != Ctx::None && ctx != Ctx::Skip && element_depth == ctx_depth + 1) {
      if (tag.name == "tag") {
        const std::string* k = tag.find("k");
        const std::string* v = tag.find("v");
        if (!k || !v) {
          ++doc.report.element_errors;
          continue;
        }
        TagMap* tags = ctx == Ctx::Node ? &cur_node.tags
                       : ctx == Ctx::Way ? &cur_way.tags
                                         : &cur_relation.tags;
        (*tags)[*k] = *v;
        continue;
      }
      if (ctx == Ctx::Way && tag.name == "nd") {
        const std::string* ref = tag.find("ref");
        const auto pref = ref ? parse_id(*ref) : std::nullopt;
        if (!pref) {
          ++doc.report.element_errors;
          ctx_valid = false;  // way with an unparseable ref is skipped whole
          continue;
        }
        cur_way.node_refs.push_back(*pref);
        continue;
      }
      if (ctx == Ctx::Relation && tag.name == "member") {
        const std::string* type = tag.find("type");
        const std::string* ref = tag.find("ref");
        const std::string* role = tag.find("role");
        const auto pref = ref ? parse_id(*ref) : std::nullopt;
        if (!type || !pref) {
          ++doc.report.element_errors;
          continue;
        }
        cur_relation.members.push_back(
            OsmRelationMember{*type, *pref, role ? *role : std::string()});
        continue;
      }
      // Unknown child element; its subtree falls outside every depth match
      // above and is ignored until its closing tag unwinds.
      ++doc.report.skipped_elements;
      continue;
    }
  }

  if (depth != 0) {
    throw ParseError("OSM XML: unexpected end of input inside an element", xml.size());
  }

  // Enforce document invariants: refs resolve and ways have >= 2 nodes.
  for (auto it = doc.ways.begin(); it != doc.ways.end();) {
    const auto& refs = it->second.node_refs;
    if (refs.size() < 2) {
      ++doc.report.short_ways;
      it = doc.ways.erase(it);
      continue;
    }
    bool dangling = false;
    for (const OsmId ref : refs) {
      if (!doc.nodes.count(ref)) {
        dangling = true;
        break;
      }
    }
    if (dangling) {
      ++doc.report.dangling_ways;
      it = doc.ways.erase(it);
    } else {
      ++it;
    }
  }
  doc.report.ways = doc.ways.size();

  return doc;
}

OsmDocument parse_osm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open OSM file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  return parse_osm_xml(text);
}

}  // namespace osmloc
