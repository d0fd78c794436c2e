#ifndef PATCLS_TAXONOMY_H_
#define PATCLS_TAXONOMY_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace patcls {

struct ClassNode {
  std::string code;
  std::string definition;
  std::optional<std::string> parent;
  std::string query_source;
  int level = 1;  // root = 1
};

// Binary membership vector indexed by taxonomy position.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(size_t size) : bits_(size, 0) {}
  explicit LabelVector(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  size_t size() const { return bits_.size(); }
  bool test(size_t i) const { return bits_[i] != 0; }
  void set(size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }
  size_t popcount() const;
  bool any() const { return popcount() > 0; }
  const std::vector<uint8_t>& bits() const { return bits_; }

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<uint8_t> bits_;
};

// A tree of classes in declaration order. Every parent precedes its
// children, so index order is a valid top-down evaluation order.
class Taxonomy {
 public:
  // Validates and builds. Throws ConfigError on an empty list, duplicate
  // codes, unknown parents, cycles, or a parent declared after its child.
  static Taxonomy FromNodes(std::vector<ClassNode> nodes);

  size_t size() const { return nodes_.size(); }
  const ClassNode& node(size_t index) const { return nodes_[index]; }
  const std::vector<ClassNode>& nodes() const { return nodes_; }

  std::optional<size_t> Find(std::string_view code) const;
  // Throws ConfigError naming the code when absent.
  size_t IndexOf(std::string_view code) const;

  // -1 for the root.
  int parent_index(size_t index) const { return parents_[index]; }
  const std::vector<int>& parent_indices() const { return parents_; }
  const std::vector<size_t>& children(size_t index) const {
    return children_[index];
  }

  // Strict ancestors, nearest first.
  std::vector<size_t> AncestorIndices(size_t index) const;
  std::vector<std::string> Ancestors(std::string_view code) const;

  int max_level() const { return max_level_; }
  std::vector<size_t> IndicesAtLevel(int level) const;
  std::vector<std::string> codes() const;

  // Sets every listed class and all of its ancestors.
  LabelVector Propagate(const std::vector<std::string>& direct) const;
  LabelVector PropagateIndices(const std::vector<size_t>& direct) const;
  // Closes an arbitrary vector of the right size under ancestry.
  LabelVector Close(const LabelVector& bits) const;
  bool IsConsistent(const LabelVector& bits) const;
  std::vector<std::string> CodesOf(const LabelVector& bits) const;

 private:
  std::vector<ClassNode> nodes_;
  std::vector<int> parents_;
  std::vector<std::vector<size_t>> children_;
  std::unordered_map<std::string, size_t> index_;
  int max_level_ = 0;
};

// Taxonomy config: JSON object {"classes": [{code, definition, parent?,
// query}, ...]} in label-vector order.
Taxonomy LoadTaxonomy(std::string_view config_text);
Taxonomy LoadTaxonomyFile(const std::filesystem::path& path);

// The nine-class green plastics scheme bundled with the library.
const Taxonomy& DefaultTaxonomy();
std::string_view DefaultTaxonomyConfig();

}  // namespace patcls

#endif  // PATCLS_TAXONOMY_H_
