#include "patcls/taxonomy.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "embedded_data.h"
#include "json.hpp"
#include "patcls/error.h"

namespace patcls {

size_t LabelVector::popcount() const {
  return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

Taxonomy Taxonomy::FromNodes(std::vector<ClassNode> nodes) {
  if (nodes.empty()) throw ConfigError("taxonomy: no classes declared");
  Taxonomy t;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].code.empty()) {
      throw ConfigError("taxonomy: class #" + std::to_string(i) +
                        " has an empty code");
    }
    if (!t.index_.emplace(nodes[i].code, i).second) {
      throw ConfigError("taxonomy: duplicate class code '" + nodes[i].code +
                        "'");
    }
  }
  t.parents_.assign(nodes.size(), -1);
  size_t roots = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].parent) {
      ++roots;
      continue;
    }
    auto it = t.index_.find(*nodes[i].parent);
    if (it == t.index_.end()) {
      throw ConfigError("taxonomy: class '" + nodes[i].code +
                        "' has unknown parent '" + *nodes[i].parent + "'");
    }
    t.parents_[i] = static_cast<int>(it->second);
  }
  // Every parent chain must reach a root within |nodes| steps.
  for (size_t i = 0; i < nodes.size(); ++i) {
    int cur = static_cast<int>(i);
    size_t steps = 0;
    while (cur >= 0) {
      if (++steps > nodes.size()) {
        throw ConfigError("taxonomy: cycle through class '" + nodes[i].code +
                          "'");
      }
      cur = t.parents_[cur];
    }
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (t.parents_[i] >= static_cast<int>(i)) {
      throw ConfigError("taxonomy: class '" + nodes[i].code +
                        "' is declared before its parent '" +
                        *nodes[i].parent + "'");
    }
  }
  if (roots != 1) {
    throw ConfigError("taxonomy: expected exactly one root class, found " +
                      std::to_string(roots));
  }
  t.children_.resize(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const int p = t.parents_[i];
    nodes[i].level = p < 0 ? 1 : nodes[p].level + 1;
    if (p >= 0) t.children_[p].push_back(i);
    t.max_level_ = std::max(t.max_level_, nodes[i].level);
  }
  t.nodes_ = std::move(nodes);
  return t;
}

std::optional<size_t> Taxonomy::Find(std::string_view code) const {
  auto it = index_.find(std::string(code));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t Taxonomy::IndexOf(std::string_view code) const {
  if (auto i = Find(code)) return *i;
  throw ConfigError("unknown class code '" + std::string(code) + "'");
}

std::vector<size_t> Taxonomy::AncestorIndices(size_t index) const {
  std::vector<size_t> out;
  for (int p = parents_[index]; p >= 0; p = parents_[p]) {
    out.push_back(static_cast<size_t>(p));
  }
  return out;
}

std::vector<std::string> Taxonomy::Ancestors(std::string_view code) const {
  std::vector<std::string> out;
  for (size_t i : AncestorIndices(IndexOf(code))) out.push_back(nodes_[i].code);
  return out;
}

std::vector<size_t> Taxonomy::IndicesAtLevel(int level) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].level == level) out.push_back(i);
  }
  return out;
}

std::vector<std::string> Taxonomy::codes() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back(n.code);
  return out;
}

LabelVector Taxonomy::PropagateIndices(const std::vector<size_t>& direct) const {
  LabelVector out(size());
  for (size_t c : direct) {
    if (c >= size()) {
      throw ConfigError("class index " + std::to_string(c) + " out of range");
    }
    for (int cur = static_cast<int>(c); cur >= 0 && !out.test(cur);
         cur = parents_[cur]) {
      out.set(cur);
    }
  }
  return out;
}

LabelVector Taxonomy::Propagate(const std::vector<std::string>& direct) const {
  std::vector<size_t> indices;
  indices.reserve(direct.size());
  for (const auto& code : direct) indices.push_back(IndexOf(code));
  return PropagateIndices(indices);
}

LabelVector Taxonomy::Close(const LabelVector& bits) const {
  std::vector<size_t> set;
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits.test(i)) set.push_back(i);
  }
  return PropagateIndices(set);
}

bool Taxonomy::IsConsistent(const LabelVector& bits) const {
  if (bits.size() != size()) return false;
  for (size_t i = 0; i < size(); ++i) {
    if (bits.test(i) && parents_[i] >= 0 && !bits.test(parents_[i])) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> Taxonomy::CodesOf(const LabelVector& bits) const {
  std::vector<std::string> out;
  for (size_t i = 0; i < bits.size() && i < size(); ++i) {
    if (bits.test(i)) out.push_back(nodes_[i].code);
  }
  return out;
}

Taxonomy LoadTaxonomy(std::string_view config_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("taxonomy: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("classes") ||
      !doc["classes"].is_array()) {
    throw ConfigError("taxonomy: expected an object with a 'classes' array");
  }
  std::vector<ClassNode> nodes;
  for (const auto& entry : doc["classes"]) {
    if (!entry.is_object() || !entry.contains("code") ||
        !entry["code"].is_string()) {
      throw ConfigError("taxonomy: every class needs a string 'code'");
    }
    ClassNode node;
    node.code = entry["code"].get<std::string>();
    node.definition = entry.value("definition", "");
    node.query_source = entry.value("query", "");
    if (entry.contains("parent") && !entry["parent"].is_null()) {
      if (!entry["parent"].is_string()) {
        throw ConfigError("taxonomy: parent of '" + node.code +
                          "' must be a string");
      }
      node.parent = entry["parent"].get<std::string>();
    }
    nodes.push_back(std::move(node));
  }
  return Taxonomy::FromNodes(std::move(nodes));
}

Taxonomy LoadTaxonomyFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read taxonomy file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LoadTaxonomy(buffer.str());
}

std::string_view DefaultTaxonomyConfig() { return embedded::TaxonomyConfig(); }

const Taxonomy& DefaultTaxonomy() {
  static const Taxonomy kTaxonomy = LoadTaxonomy(DefaultTaxonomyConfig());
  return kTaxonomy;
}

}  // namespace patcls
