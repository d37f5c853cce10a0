#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace osmloc {

using TagMap = std::map<std::string, std::string, std::less<>>;

enum class SemanticGroup : std::uint8_t { Area = 0, Way = 1, Node = 2 };

const char* semantic_group_name(SemanticGroup g);

// One class of the rasterization taxonomy. class_id 0 is reserved for
// void/unmapped in every group and never appears in a rule.
struct SemanticClass {
  SemanticGroup group = SemanticGroup::Area;
  int class_id = 0;
  int draw_priority = 0;
  double way_width_m = 0.0;  // stroke width, Way group only
};

// key=value tag predicate; value "*" matches any value.
struct TagRule {
  std::string key;
  std::string value;

  bool matches(const TagMap& tags) const;
};

struct ClassRule {
  std::string name;  // e.g. "area.building"
  SemanticClass cls;
  std::vector<TagRule> matches;  // rule fires if any predicate matches
};

// Ordered tag-to-class rule table. Classification is deterministic: the
// first rule (in table order) with a matching predicate wins.
class ClassTaxonomy {
 public:
  static ClassTaxonomy default_taxonomy();
  static ClassTaxonomy parse(const std::string& text);
  static ClassTaxonomy load_file(const std::string& path);

  std::optional<SemanticClass> classify(const TagMap& tags) const;

  // Number of class ids in a group, including the reserved void id 0.
  int group_size(SemanticGroup g) const { return group_size_[static_cast<int>(g)]; }
  const std::string* class_name(SemanticGroup g, int class_id) const;
  const std::vector<ClassRule>& rules() const { return rules_; }
  const std::string& version() const { return version_; }

 private:
  void add_rule(ClassRule rule);

  std::string version_ = "unversioned";
  std::vector<ClassRule> rules_;
  int group_size_[3] = {1, 1, 1};
};

// First matching rule by taxonomy order; nullopt when no rule matches
// (the element is simply not rasterized).
inline std::optional<SemanticClass> classify_element(const TagMap& tags,
                                                     const ClassTaxonomy& taxonomy) {
  return taxonomy.classify(tags);
}

}  // namespace osmloc
