// Unlabeled tree shapes and their canonical signatures.
//
// A Shape is immutable and shares its sub-shapes. Its canonical encoding is
// a parenthesis word:
//   Polya        ( c1 c2 ... )   children sorted by (size, encoding)
//   PlaneBinary  ( L R )         an empty slot is written "."
// so a leaf is "()" in Polya mode and "(..)" in plane binary mode.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "treecomp/tree.hpp"

namespace treecomp {

class Shape {
 public:
  /// The empty shape; only meaningful as an absent binary child slot.
  Shape() = default;

  static Shape leaf(ShapeMode mode) {
    return mode == ShapeMode::Polya ? polya({}) : binary(Shape{}, Shape{});
  }

  /// Polya shape with the given (unordered) child multiset.
  static Shape polya(std::vector<Shape> children) {
    std::uint32_t size = 1;
    for (const auto& c : children) {
      if (c.empty() || c.mode() != ShapeMode::Polya) throw std::invalid_argument("polya: bad child shape");
      size += c.size();
    }
    std::sort(children.begin(), children.end(), canonical_less);
    std::string enc = "(";
    for (const auto& c : children) enc += c.encoding();
    enc += ')';
    return Shape(std::make_shared<const Node>(Node{ShapeMode::Polya, size, std::move(children), std::move(enc)}));
  }

  /// Plane binary shape; either slot may be the empty shape.
  static Shape binary(Shape left, Shape right) {
    std::uint32_t size = 1;
    std::string enc = "(";
    for (const auto* c : {&left, &right}) {
      if (c->empty()) {
        enc += '.';
        continue;
      }
      if (c->mode() != ShapeMode::PlaneBinary) throw std::invalid_argument("binary: bad child shape");
      size += c->size();
      enc += c->encoding();
    }
    enc += ')';
    std::vector<Shape> kids{std::move(left), std::move(right)};
    return Shape(std::make_shared<const Node>(Node{ShapeMode::PlaneBinary, size, std::move(kids), std::move(enc)}));
  }

  bool empty() const noexcept { return node_ == nullptr; }
  ShapeMode mode() const { return node().mode; }
  /// Node count k; 0 for the empty shape.
  std::uint32_t size() const noexcept { return node_ ? node_->size : 0; }

  /// Polya: children in canonical order. PlaneBinary: exactly {left, right}.
  std::span<const Shape> children() const { return node().children; }
  const Shape& left() const { return binary_child(0); }
  const Shape& right() const { return binary_child(1); }

  /// Canonical parenthesis word (without the mode tag).
  const std::string& encoding() const { return node().encoding; }

  /// Order used for canonical Polya child lists: by size, then encoding bytes.
  static bool canonical_less(const Shape& a, const Shape& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.encoding() < b.encoding();
  }

  friend bool operator==(const Shape& a, const Shape& b) {
    if (a.empty() || b.empty()) return a.empty() && b.empty();
    return a.node_ == b.node_ || (a.mode() == b.mode() && a.encoding() == b.encoding());
  }

 private:
  struct Node {
    ShapeMode mode;
    std::uint32_t size;
    std::vector<Shape> children;
    std::string encoding;
  };

  explicit Shape(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const {
    if (!node_) throw std::logic_error("empty shape");
    return *node_;
  }
  const Shape& binary_child(int i) const {
    if (mode() != ShapeMode::PlaneBinary) throw std::logic_error("left()/right(): plane binary shapes only");
    return node_->children[i];
  }

  std::shared_ptr<const Node> node_;
};

/// Canonical identifier of a shape: mode tag followed by the encoding.
struct ShapeSignature {
  std::string bytes;

  friend bool operator==(const ShapeSignature&, const ShapeSignature&) = default;
  friend auto operator<=>(const ShapeSignature&, const ShapeSignature&) = default;
};

inline ShapeSignature signature(const Shape& shape) {
  return {(shape.mode() == ShapeMode::Polya ? 'P' : 'B') + shape.encoding()};
}

/// Shape of the fringe subtree rooted at `v`.
inline Shape shape_of(const LabeledTree& tree, std::uint32_t v) {
  std::vector<Shape> built(tree.size());
  // Postorder restricted to the subtree at v.
  std::vector<std::pair<std::uint32_t, bool>> stack{{v, false}};
  while (!stack.empty()) {
    auto [u, expanded] = stack.back();
    stack.pop_back();
    if (!expanded) {
      stack.emplace_back(u, true);
      tree.for_each_child(u, [&](std::uint32_t c) { stack.emplace_back(c, false); });
      continue;
    }
    if (tree.kind() == TreeKind::Recursive) {
      std::vector<Shape> kids;
      for (const auto c : tree.children(u)) kids.push_back(std::move(built[c]));
      built[u] = Shape::polya(std::move(kids));
    } else {
      Shape l = tree.left(u) == kNoNode ? Shape{} : std::move(built[tree.left(u)]);
      Shape r = tree.right(u) == kNoNode ? Shape{} : std::move(built[tree.right(u)]);
      built[u] = Shape::binary(std::move(l), std::move(r));
    }
  }
  return std::move(built[v]);
}

inline Shape shape_of(const LabeledTree& tree) { return shape_of(tree, tree.root()); }

/// A concrete tree with this shape, labeled 1..k in preorder (an increasing
/// labeling). Polya children are emitted in canonical order.
inline LabeledTree tree_of(const Shape& shape) {
  const auto k = shape.size();
  if (k == 0) throw std::invalid_argument("tree_of: empty shape");
  std::vector<std::uint32_t> parent;
  std::vector<std::int64_t> labels;
  std::vector<std::uint32_t> left, right;
  parent.reserve(k);
  struct Frame {
    const Shape* s;
    std::uint32_t parent;
    int slot;  // 0 left, 1 right, -1 unordered
  };
  std::vector<Frame> stack{{&shape, kNoNode, -1}};
  while (!stack.empty()) {
    const auto f = stack.back();
    stack.pop_back();
    const auto id = static_cast<std::uint32_t>(parent.size());
    parent.push_back(f.parent);
    labels.push_back(id + 1);
    left.push_back(kNoNode);
    right.push_back(kNoNode);
    if (f.slot == 0) left[f.parent] = id;
    if (f.slot == 1) right[f.parent] = id;
    const auto kids = f.s->children();
    for (std::size_t i = kids.size(); i-- > 0;) {
      if (kids[i].empty()) continue;
      const int slot = shape.mode() == ShapeMode::PlaneBinary ? static_cast<int>(i) : -1;
      stack.push_back({&kids[i], id, slot});
    }
  }
  if (shape.mode() == ShapeMode::Polya) return LabeledTree::recursive(std::move(parent));
  return LabeledTree::binary(std::move(labels), std::move(left), std::move(right), 0);
}

/// Path of k nodes. For plane binary shapes every node hangs on `side`
/// (0 = left, 1 = right).
inline Shape path_shape(ShapeMode mode, std::uint32_t k, int side = 0) {
  if (k == 0) throw std::invalid_argument("path_shape: k must be >= 1");
  Shape s = Shape::leaf(mode);
  for (std::uint32_t i = 1; i < k; ++i) {
    if (mode == ShapeMode::Polya) s = Shape::polya({s});
    else s = side == 0 ? Shape::binary(s, Shape{}) : Shape::binary(Shape{}, s);
  }
  return s;
}

/// Root with two leaf children.
inline Shape cherry_shape(ShapeMode mode) {
  const auto leaf = Shape::leaf(mode);
  return mode == ShapeMode::Polya ? Shape::polya({leaf, leaf}) : Shape::binary(leaf, leaf);
}

/// Sizes of all fringe subtrees of `shape` (one entry per node).
inline std::vector<std::uint32_t> fringe_sizes(const Shape& shape) {
  std::vector<std::uint32_t> out;
  std::vector<const Shape*> stack{&shape};
  while (!stack.empty()) {
    const auto* s = stack.back();
    stack.pop_back();
    out.push_back(s->size());
    for (const auto& c : s->children())
      if (!c.empty()) stack.push_back(&c);
  }
  return out;
}

}  // namespace treecomp

template <>
struct std::hash<treecomp::ShapeSignature> {
  std::size_t operator()(const treecomp::ShapeSignature& s) const noexcept {
    return std::hash<std::string>{}(s.bytes);
  }
};
