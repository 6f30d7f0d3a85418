// JSON interchange for trees and shapes.
//
//   recursive tree  {"label": 1, "children": [ ... ]}
//   binary tree     {"label": 4, "left": {...} | null, "right": {...} | null}
//   Polya shape     {"children": [ ... ]}
//   binary shape    {"left": {...} | null, "right": {...} | null}
//
// Recursive children are written in ascending label order.
#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treecomp/shape.hpp"
#include "treecomp/tree.hpp"

namespace treecomp {

/// Malformed input. `where()` is a byte offset ("@123") for syntax errors
/// or a JSON pointer ("/children/0/label") for structural ones.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::string where)
      : std::runtime_error(what + " at " + where), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

namespace detail {

inline nlohmann::json parse_document(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), "@" + std::to_string(e.byte));
  }
}

}  // namespace detail

inline nlohmann::json to_json(const LabeledTree& tree) {
  // Iterative build so deep trees do not exhaust the stack.
  std::vector<nlohmann::json> built(tree.size());
  for (const auto v : tree.postorder()) {
    nlohmann::json node;
    node["label"] = tree.label(v);
    if (tree.kind() == TreeKind::Recursive) {
      nlohmann::json kids = nlohmann::json::array();
      for (const auto c : tree.children(v)) kids.push_back(std::move(built[c]));
      node["children"] = std::move(kids);
    } else {
      node["left"] = tree.left(v) == kNoNode ? nlohmann::json(nullptr) : std::move(built[tree.left(v)]);
      node["right"] = tree.right(v) == kNoNode ? nlohmann::json(nullptr) : std::move(built[tree.right(v)]);
    }
    built[v] = std::move(node);
  }
  return std::move(built[tree.root()]);
}

/// Compact JSON text, byte-identical to `to_json(tree).dump()` but without
/// the recursion of nlohmann's writer, so paths of any depth are fine.
inline std::string serialize(const LabeledTree& tree) {
  struct Frame {
    std::uint32_t node;  // kNoNode: emit `text` verbatim
    std::string text;
  };
  std::string out;
  std::vector<Frame> stack{{tree.root(), {}}};
  auto push_child = [&](std::uint32_t c) { stack.push_back(c == kNoNode ? Frame{kNoNode, "null"} : Frame{c, {}}); };
  while (!stack.empty()) {
    auto f = std::move(stack.back());
    stack.pop_back();
    if (f.node == kNoNode) {
      out += f.text;
      continue;
    }
    const auto label = std::to_string(tree.label(f.node));
    if (tree.kind() == TreeKind::Recursive) {
      out += "{\"children\":[";
      stack.push_back({kNoNode, "],\"label\":" + label + "}"});
      const auto kids = tree.children(f.node);
      for (std::size_t i = kids.size(); i-- > 0;) {
        stack.push_back({kids[i], {}});
        if (i) stack.push_back({kNoNode, ","});
      }
    } else {
      out += "{\"label\":" + label + ",\"left\":";
      stack.push_back({kNoNode, "}"});
      push_child(tree.right(f.node));
      stack.push_back({kNoNode, ",\"right\":"});
      push_child(tree.left(f.node));
    }
  }
  return out;
}

inline nlohmann::json to_json(const Shape& shape) {
  nlohmann::json node = nlohmann::json::object();
  if (shape.mode() == ShapeMode::Polya) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : shape.children()) kids.push_back(to_json(c));
    node["children"] = std::move(kids);
  } else {
    node["left"] = shape.left().empty() ? nlohmann::json(nullptr) : to_json(shape.left());
    node["right"] = shape.right().empty() ? nlohmann::json(nullptr) : to_json(shape.right());
  }
  return node;
}

inline std::string serialize(const Shape& shape) { return to_json(shape).dump(); }

/// Builds a tree from an already-parsed JSON value; the kind is inferred
/// from the presence of "children" (recursive) or "left"/"right" (binary).
inline LabeledTree tree_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("tree must be a JSON object", "");
  const bool recursive = doc.contains("children");
  struct Item {
    const nlohmann::json* node;
    std::uint32_t parent;
    int slot;
    std::string segment;  // path step from the parent; full paths are rebuilt only for errors
  };
  std::vector<Item> stack{{&doc, kNoNode, -1, ""}};
  std::vector<std::int64_t> labels;
  std::vector<std::uint32_t> parents, left, right;
  std::vector<std::string> segments;
  auto path_of = [&](const Item& item) {
    std::vector<const std::string*> parts{&item.segment};
    for (auto v = item.parent; v != kNoNode; v = parents[v]) parts.push_back(&segments[v]);
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) out += **it;
    return out;
  };
  while (!stack.empty()) {
    auto item = std::move(stack.back());
    stack.pop_back();
    const auto& node = *item.node;
    if (!node.is_object()) throw ParseError("node must be an object", path_of(item));
    const auto lit = node.find("label");
    if (lit == node.end() || !lit->is_number_integer()) throw ParseError("missing integer label", path_of(item) + "/label");
    const auto id = static_cast<std::uint32_t>(labels.size());
    labels.push_back(lit->get<std::int64_t>());
    parents.push_back(item.parent);
    segments.push_back(item.segment);
    left.push_back(kNoNode);
    right.push_back(kNoNode);
    if (item.slot == 0) left[item.parent] = id;
    if (item.slot == 1) right[item.parent] = id;
    if (recursive) {
      if (node.contains("left") || node.contains("right"))
        throw ParseError("recursive node must not have left/right", path_of(item));
      const auto it = node.find("children");
      if (it == node.end() || !it->is_array()) throw ParseError("missing children array", path_of(item));
      for (std::size_t i = it->size(); i-- > 0;) stack.push_back({&(*it)[i], id, -1, "/children/" + std::to_string(i)});
    } else {
      if (node.contains("children")) throw ParseError("binary node must not have children", path_of(item));
      const char* names[] = {"left", "right"};
      for (int slot = 1; slot >= 0; --slot) {
        const auto it = node.find(names[slot]);
        if (it == node.end()) throw ParseError(std::string("missing ") + names[slot], path_of(item));
        if (it->is_null()) continue;
        stack.push_back({&*it, id, slot, std::string("/") + names[slot]});
      }
    }
  }
  const auto n = labels.size();
  if (!recursive) {
    std::set<std::int64_t> seen;
    for (const auto l : labels)
      if (!seen.insert(l).second) throw ParseError("duplicate label " + std::to_string(l), "");
    return LabeledTree::binary(std::move(labels), std::move(left), std::move(right), 0);
  }
  // Recursive trees are stored by label: node (label-1) has parent (parent label - 1).
  std::vector<std::uint32_t> by_label(n, kNoNode);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto l = labels[i];
    if (l < 1 || static_cast<std::uint64_t>(l) > n)
      throw ParseError("recursive labels must be 1.." + std::to_string(n), "label " + std::to_string(l));
    if (seen[l - 1]) throw ParseError("duplicate label " + std::to_string(l), "label " + std::to_string(l));
    seen[l - 1] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (parents[i] == kNoNode) continue;
    const auto pl = labels[parents[i]];
    if (pl >= labels[i]) throw ParseError("labels must increase away from the root", "label " + std::to_string(labels[i]));
    by_label[labels[i] - 1] = static_cast<std::uint32_t>(pl - 1);
  }
  return LabeledTree::recursive(std::move(by_label));
}

inline LabeledTree parse_tree(std::string_view text) { return tree_from_json(detail::parse_document(text)); }

inline Shape shape_from_json(const nlohmann::json& node, const std::string& path = "") {
  if (!node.is_object()) throw ParseError("shape node must be an object", path);
  if (node.contains("children")) {
    const auto& kids = node["children"];
    if (!kids.is_array()) throw ParseError("children must be an array", path);
    std::vector<Shape> out;
    for (std::size_t i = 0; i < kids.size(); ++i)
      out.push_back(shape_from_json(kids[i], path + "/children/" + std::to_string(i)));
    for (const auto& c : out)
      if (c.mode() != ShapeMode::Polya) throw ParseError("mixed shape modes", path);
    return Shape::polya(std::move(out));
  }
  if (!node.contains("left") || !node.contains("right")) throw ParseError("shape needs children or left/right", path);
  Shape lr[2];
  const char* names[] = {"left", "right"};
  for (int s = 0; s < 2; ++s) {
    const auto& c = node[names[s]];
    if (c.is_null()) continue;
    lr[s] = shape_from_json(c, path + "/" + names[s]);
    if (lr[s].mode() != ShapeMode::PlaneBinary) throw ParseError("mixed shape modes", path);
  }
  return Shape::binary(std::move(lr[0]), std::move(lr[1]));
}

inline Shape parse_shape(std::string_view text) { return shape_from_json(detail::parse_document(text)); }

}  // namespace treecomp
