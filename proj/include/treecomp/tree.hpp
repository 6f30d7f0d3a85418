// Labeled trees: recursive trees (unordered, increasing labels 1..n) and
// plane binary trees (explicit left/right slots, used both for increasing
// binary trees and for binary search trees).
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace treecomp {

enum class TreeKind { Recursive, PlaneBinary };

/// Shape mode: unordered rooted trees (Polya) or plane binary trees.
enum class ShapeMode { Polya, PlaneBinary };

/// The two random tree families under study.
enum class Family { Recursive, Bst };

constexpr ShapeMode mode_of(TreeKind kind) noexcept {
  return kind == TreeKind::Recursive ? ShapeMode::Polya : ShapeMode::PlaneBinary;
}
constexpr ShapeMode mode_of(Family family) noexcept {
  return family == Family::Recursive ? ShapeMode::Polya : ShapeMode::PlaneBinary;
}

inline constexpr std::uint32_t kNoNode = std::numeric_limits<std::uint32_t>::max();

class InvalidTree : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LabeledTree {
 public:
  using Label = std::int64_t;

  /// Recursive tree from a parent array indexed by label-1: `parents[0]` is
  /// kNoNode and `parents[i] < i` for i >= 1 (so node i carries label i+1).
  static LabeledTree recursive(std::vector<std::uint32_t> parents) {
    LabeledTree t;
    t.kind_ = TreeKind::Recursive;
    const auto n = parents.size();
    if (n == 0) throw InvalidTree("recursive tree must have at least one node");
    if (parents[0] != kNoNode) throw InvalidTree("label 1 must be the root");
    for (std::size_t i = 1; i < n; ++i) {
      if (parents[i] >= i)
        throw InvalidTree("label " + std::to_string(i + 1) + " attaches to a larger label");
    }
    t.labels_.resize(n);
    for (std::size_t i = 0; i < n; ++i) t.labels_[i] = static_cast<Label>(i + 1);
    t.parent_ = std::move(parents);
    // CSR children, ascending by label.
    t.child_offset_.assign(n + 1, 0);
    for (std::size_t i = 1; i < n; ++i) ++t.child_offset_[t.parent_[i] + 1];
    for (std::size_t i = 0; i < n; ++i) t.child_offset_[i + 1] += t.child_offset_[i];
    t.child_list_.resize(n - 1);
    std::vector<std::uint32_t> fill(t.child_offset_.begin(), t.child_offset_.end() - 1);
    for (std::size_t i = 1; i < n; ++i)
      t.child_list_[fill[t.parent_[i]]++] = static_cast<std::uint32_t>(i);
    t.root_ = 0;
    return t;
  }

  /// Plane binary tree from per-node arrays. Child indices are kNoNode when
  /// the slot is empty. Labels must be distinct.
  static LabeledTree binary(std::vector<Label> labels, std::vector<std::uint32_t> left,
                            std::vector<std::uint32_t> right, std::uint32_t root) {
    const auto n = labels.size();
    if (n == 0) throw InvalidTree("binary tree must have at least one node");
    if (left.size() != n || right.size() != n) throw InvalidTree("child arrays size mismatch");
    if (root >= n) throw InvalidTree("root index out of range");
    LabeledTree t;
    t.kind_ = TreeKind::PlaneBinary;
    t.labels_ = std::move(labels);
    t.left_ = std::move(left);
    t.right_ = std::move(right);
    t.root_ = root;
    t.parent_.assign(n, kNoNode);
    std::size_t reached = 0;
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      ++reached;
      for (const auto c : {t.left_[v], t.right_[v]}) {
        if (c == kNoNode) continue;
        if (c >= n || c == root || t.parent_[c] != kNoNode)
          throw InvalidTree("binary child links do not form a tree");
        t.parent_[c] = v;
        stack.push_back(c);
      }
    }
    if (reached != n) throw InvalidTree("binary tree has unreachable nodes");
    std::unordered_set<Label> seen;
    for (const auto label : t.labels_)
      if (!seen.insert(label).second) throw InvalidTree("duplicate label " + std::to_string(label));
    return t;
  }

  /// Binary search tree obtained by inserting `keys` in order into an empty tree.
  static LabeledTree bst_from_sequence(std::span<const Label> keys) {
    const auto n = keys.size();
    if (n == 0) throw InvalidTree("bst needs at least one key");
    std::vector<Label> labels(keys.begin(), keys.end());
    std::vector<std::uint32_t> left(n, kNoNode), right(n, kNoNode);
    // The parent of a new key is its in-order predecessor or successor,
    // whichever was inserted later; O(n log n) even for sorted input.
    std::map<Label, std::uint32_t> placed{{labels[0], 0}};
    for (std::uint32_t i = 1; i < n; ++i) {
      const auto [it, fresh] = placed.emplace(labels[i], i);
      if (!fresh) throw InvalidTree("duplicate key " + std::to_string(labels[i]));
      const auto pred = it == placed.begin() ? kNoNode : std::prev(it)->second;
      const auto succ = std::next(it) == placed.end() ? kNoNode : std::next(it)->second;
      if (succ == kNoNode || (pred != kNoNode && pred > succ)) right[pred] = i;
      else left[succ] = i;
    }
    return binary(std::move(labels), std::move(left), std::move(right), 0);
  }

  TreeKind kind() const noexcept { return kind_; }
  ShapeMode mode() const noexcept { return mode_of(kind_); }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint32_t root() const noexcept { return root_; }
  Label label(std::uint32_t v) const { return labels_[v]; }
  std::uint32_t parent(std::uint32_t v) const { return parent_[v]; }

  /// Children of a recursive-tree node, ascending by label.
  std::span<const std::uint32_t> children(std::uint32_t v) const {
    if (kind_ != TreeKind::Recursive) throw std::logic_error("children(): recursive trees only");
    return {child_list_.data() + child_offset_[v], child_list_.data() + child_offset_[v + 1]};
  }
  std::uint32_t left(std::uint32_t v) const { return binary_slots().first[v]; }
  std::uint32_t right(std::uint32_t v) const { return binary_slots().second[v]; }

  /// Calls f(child) for every present child; left before right for binary trees.
  template <class F>
  void for_each_child(std::uint32_t v, F&& f) const {
    if (kind_ == TreeKind::Recursive) {
      for (const auto c : children(v)) f(c);
    } else {
      if (left_[v] != kNoNode) f(left_[v]);
      if (right_[v] != kNoNode) f(right_[v]);
    }
  }

  /// Node indices with every child before its parent.
  std::vector<std::uint32_t> postorder() const {
    std::vector<std::uint32_t> order;
    order.reserve(size());
    std::vector<std::pair<std::uint32_t, bool>> stack{{root_, false}};
    std::vector<std::uint32_t> kids;
    while (!stack.empty()) {
      auto [v, expanded] = stack.back();
      stack.pop_back();
      if (expanded) {
        order.push_back(v);
        continue;
      }
      stack.emplace_back(v, true);
      kids.clear();
      for_each_child(v, [&](std::uint32_t c) { kids.push_back(c); });
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(*it, false);
    }
    return order;
  }

  /// Node indices of the fringe subtree at `v` in preorder (left before right).
  std::vector<std::uint32_t> preorder(std::uint32_t v) const {
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> stack{v};
    std::vector<std::uint32_t> kids;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      order.push_back(u);
      kids.clear();
      for_each_child(u, [&](std::uint32_t c) { kids.push_back(c); });
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }
  std::vector<std::uint32_t> preorder() const { return preorder(root_); }

  /// Labels strictly increase from every parent to its children.
  bool is_increasing() const {
    for (std::uint32_t v = 0; v < size(); ++v)
      if (parent_[v] != kNoNode && labels_[parent_[v]] >= labels_[v]) return false;
    return true;
  }

  /// Binary search-order property: left subtree < node < right subtree.
  bool is_search_tree() const {
    if (kind_ != TreeKind::PlaneBinary) return false;
    struct Frame {
      std::uint32_t v;
      bool has_lo, has_hi;
      Label lo, hi;
    };
    std::vector<Frame> stack{{root_, false, false, 0, 0}};
    while (!stack.empty()) {
      const auto f = stack.back();
      stack.pop_back();
      const auto x = labels_[f.v];
      if ((f.has_lo && x <= f.lo) || (f.has_hi && x >= f.hi)) return false;
      if (left_[f.v] != kNoNode) stack.push_back({left_[f.v], f.has_lo, true, f.lo, x});
      if (right_[f.v] != kNoNode) stack.push_back({right_[f.v], true, f.has_hi, x, f.hi});
    }
    return true;
  }

  /// Number of nodes in the fringe subtree rooted at each node.
  std::vector<std::uint32_t> subtree_sizes() const {
    std::vector<std::uint32_t> sizes(size(), 1);
    for (const auto v : postorder())
      if (parent_[v] != kNoNode) sizes[parent_[v]] += sizes[v];
    return sizes;
  }

  /// Structural equality with labels; independent of internal node numbering.
  friend bool operator==(const LabeledTree& a, const LabeledTree& b) {
    if (a.kind_ != b.kind_ || a.size() != b.size()) return false;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{a.root_, b.root_}};
    while (!stack.empty()) {
      const auto [u, v] = stack.back();
      stack.pop_back();
      if (a.labels_[u] != b.labels_[v]) return false;
      if (a.kind_ == TreeKind::Recursive) {
        const auto ca = a.children(u), cb = b.children(v);
        if (ca.size() != cb.size()) return false;
        for (std::size_t i = 0; i < ca.size(); ++i) stack.emplace_back(ca[i], cb[i]);
      } else {
        for (const auto& [x, y] : {std::pair{a.left_[u], b.left_[v]}, std::pair{a.right_[u], b.right_[v]}}) {
          if ((x == kNoNode) != (y == kNoNode)) return false;
          if (x != kNoNode) stack.emplace_back(x, y);
        }
      }
    }
    return true;
  }

 private:
  LabeledTree() = default;

  std::pair<const std::vector<std::uint32_t>&, const std::vector<std::uint32_t>&> binary_slots() const {
    if (kind_ != TreeKind::PlaneBinary) throw std::logic_error("left()/right(): binary trees only");
    return {left_, right_};
  }

  TreeKind kind_ = TreeKind::Recursive;
  std::uint32_t root_ = 0;
  std::vector<Label> labels_;
  std::vector<std::uint32_t> parent_;
  // Recursive: CSR child lists.
  std::vector<std::uint32_t> child_offset_;
  std::vector<std::uint32_t> child_list_;
  // PlaneBinary: explicit slots.
  std::vector<std::uint32_t> left_;
  std::vector<std::uint32_t> right_;
};

}  // namespace treecomp
