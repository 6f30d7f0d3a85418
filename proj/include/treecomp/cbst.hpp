// Compacted binary search tree.
//
// The unlabeled shape of a BST is compacted by postorder interning. The first
// occurrence (in postorder) of every shape keeps its value and becomes a
// retained node; every other fringe subtree is erased and replaced by a
// redirect edge to its shape, carrying the subtree's labels in preorder.
//
// Retained nodes are indexed by shape id: each shape has exactly one
// retained occurrence, so the retained table doubles as the shape table
// (size and child shapes of every shape).
//
// Search inside an erased subtree walks the shape with an index i into the
// label list: going left is i+1, going right is i + 1 + size(left child).
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "treecomp/dag.hpp"
#include "treecomp/tree.hpp"

namespace treecomp {

struct CbstEdge {
  enum class Kind : std::uint8_t { Absent, Retained, Redirect };
  Kind kind = Kind::Absent;
  std::uint32_t index = 0;  // retained shape id, or redirect index

  friend bool operator==(const CbstEdge&, const CbstEdge&) = default;
};

struct RetainedNode {
  std::int64_t value = 0;
  std::uint64_t size = 1;  // node count of this shape
  CbstEdge left, right;

  friend bool operator==(const RetainedNode&, const RetainedNode&) = default;
};

struct Redirect {
  std::uint32_t target = 0;  // shape id of the erased subtree
  std::uint64_t offset = 0;  // into the label pool
  std::uint64_t length = 0;  // == size of target

  friend bool operator==(const Redirect&, const Redirect&) = default;
};

struct SearchOutcome {
  bool found = false;
  std::uint64_t comparisons = 0;
  std::uint64_t additions = 0;
};

class CorruptStructure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CompactedBst {
 public:
  /// Compresses a BST. Throws InvalidTree on non-BST input.
  static CompactedBst build(const LabeledTree& bst) {
    if (bst.kind() != TreeKind::PlaneBinary) throw InvalidTree("cbst: input must be a binary tree");
    if (!bst.is_search_tree()) throw InvalidTree("cbst: input violates the search-order property");
    const auto comp = compact_detailed(bst, ShapeMode::PlaneBinary);
    CompactedBst c;
    c.n_ = bst.size();
    c.root_ = comp.dag.root;
    c.retained_.resize(comp.dag.size());
    for (std::uint32_t id = 0; id < comp.dag.size(); ++id) c.retained_[id].size = comp.dag.nodes[id].size;

    // Top-down from the root: a node is retained iff it is the first
    // occurrence of its shape. Every retained node's parent is retained too.
    std::vector<std::uint32_t> stack{bst.root()};
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      auto& node = c.retained_[comp.shape_id[v]];
      node.value = bst.label(v);
      for (int side = 0; side < 2; ++side) {
        const auto child = side == 0 ? bst.left(v) : bst.right(v);
        auto& edge = side == 0 ? node.left : node.right;
        if (child == kNoNode) {
          edge = {CbstEdge::Kind::Absent, 0};
          continue;
        }
        const auto sid = comp.shape_id[child];
        if (comp.first_occurrence[sid] == child) {
          edge = {CbstEdge::Kind::Retained, sid};
          stack.push_back(child);
        } else {
          edge = {CbstEdge::Kind::Redirect, static_cast<std::uint32_t>(c.redirects_.size())};
          Redirect r{sid, c.labels_.size(), 0};
          for (const auto u : bst.preorder(child)) c.labels_.push_back(bst.label(u));
          r.length = c.labels_.size() - r.offset;
          c.redirects_.push_back(r);
        }
      }
    }
    return c;
  }

  std::size_t size() const noexcept { return n_; }
  std::uint32_t root() const noexcept { return root_; }
  std::span<const RetainedNode> retained() const noexcept { return retained_; }
  std::span<const Redirect> redirects() const noexcept { return redirects_; }
  std::span<const std::int64_t> labels(const Redirect& r) const {
    return std::span<const std::int64_t>(labels_).subspan(r.offset, r.length);
  }

  /// Shape id of the subtree behind an edge, or kNoNode.
  std::uint32_t edge_shape(const CbstEdge& e) const {
    switch (e.kind) {
      case CbstEdge::Kind::Absent: return kNoNode;
      case CbstEdge::Kind::Retained: return e.index;
      case CbstEdge::Kind::Redirect: return redirects_[e.index].target;
    }
    return kNoNode;
  }
  std::uint64_t shape_size(std::uint32_t sid) const { return sid == kNoNode ? 0 : retained_[sid].size; }

  /// When `trace` is given, it receives the list index i of every
  /// comparison made inside a redirect list.
  SearchOutcome search(std::int64_t query, std::vector<std::uint64_t>* trace = nullptr) const {
    SearchOutcome out;
    std::uint32_t cur = root_;
    for (;;) {
      const auto& node = retained_[cur];
      ++out.comparisons;
      if (query == node.value) {
        out.found = true;
        return out;
      }
      const auto& edge = query < node.value ? node.left : node.right;
      if (edge.kind == CbstEdge::Kind::Absent) return out;
      if (edge.kind == CbstEdge::Kind::Retained) {
        cur = edge.index;
        continue;
      }
      return search_list(redirects_[edge.index], query, out, trace);
    }
  }

  /// Rebuilds the original BST, node for node.
  LabeledTree unfold() const {
    validate();
    std::vector<std::int64_t> labels;
    std::vector<std::uint32_t> left, right;
    labels.reserve(n_);
    // Frame: either a retained node, or a shape inside a redirect list at index i.
    struct Frame {
      bool in_list;
      std::uint32_t id;       // retained id / shape id
      const std::int64_t* list;
      std::uint64_t index;
      std::uint32_t parent;
      int slot;
    };
    std::vector<Frame> stack{{false, root_, nullptr, 0, kNoNode, -1}};
    while (!stack.empty()) {
      const auto f = stack.back();
      stack.pop_back();
      const auto v = static_cast<std::uint32_t>(labels.size());
      const auto& node = retained_[f.id];
      labels.push_back(f.in_list ? f.list[f.index] : node.value);
      left.push_back(kNoNode);
      right.push_back(kNoNode);
      if (f.slot == 0) left[f.parent] = v;
      if (f.slot == 1) right[f.parent] = v;
      const std::array<const CbstEdge*, 2> edges{&node.left, &node.right};
      for (int side = 1; side >= 0; --side) {
        const auto& e = *edges[side];
        if (e.kind == CbstEdge::Kind::Absent) continue;
        if (f.in_list) {
          const auto child_shape = edge_shape(e);
          const auto idx = side == 0 ? f.index + 1 : f.index + 1 + shape_size(edge_shape(node.left));
          stack.push_back({true, child_shape, f.list, idx, v, side});
        } else if (e.kind == CbstEdge::Kind::Retained) {
          stack.push_back({false, e.index, nullptr, 0, v, side});
        } else {
          const auto& r = redirects_[e.index];
          stack.push_back({true, r.target, labels_.data() + r.offset, 0, v, side});
        }
      }
    }
    return LabeledTree::binary(std::move(labels), std::move(left), std::move(right), 0);
  }

  /// Checks every redirect list against its target shape size.
  void validate() const {
    if (root_ >= retained_.size()) throw CorruptStructure("cbst: root out of range");
    for (const auto& r : redirects_) {
      if (r.target >= retained_.size()) throw CorruptStructure("cbst: redirect target out of range");
      if (r.length != retained_[r.target].size)
        throw CorruptStructure("cbst: redirect list length differs from its shape size");
      if (r.offset + r.length > labels_.size()) throw CorruptStructure("cbst: redirect list out of range");
    }
    for (const auto& node : retained_) {
      for (const auto* e : {&node.left, &node.right}) {
        if (e->kind == CbstEdge::Kind::Retained && e->index >= retained_.size())
          throw CorruptStructure("cbst: retained edge out of range");
        if (e->kind == CbstEdge::Kind::Redirect && e->index >= redirects_.size())
          throw CorruptStructure("cbst: redirect edge out of range");
      }
      if (node.size != 1 + shape_size(edge_shape(node.left)) + shape_size(edge_shape(node.right)))
        throw CorruptStructure("cbst: shape size inconsistent with children");
    }
  }

  // Binary format (all integers little-endian):
  //   "CBST1"  u64 n  u32 retained_count  u32 redirect_count  u32 root
  //   retained table: i64 value, u64 size, (u8 kind, u32 index) x2
  //   redirect table: u32 target, u64 length, i64 labels[length]
  //   shape table:    u32 left shape, u32 right shape   (0xFFFFFFFF = none)
  void write(std::ostream& os) const {
    os.write("CBST1", 5);
    put<std::uint64_t>(os, n_);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(retained_.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(redirects_.size()));
    put<std::uint32_t>(os, root_);
    for (const auto& node : retained_) {
      put<std::int64_t>(os, node.value);
      put<std::uint64_t>(os, node.size);
      for (const auto* e : {&node.left, &node.right}) {
        put<std::uint8_t>(os, static_cast<std::uint8_t>(e->kind));
        put<std::uint32_t>(os, e->index);
      }
    }
    for (const auto& r : redirects_) {
      put<std::uint32_t>(os, r.target);
      put<std::uint64_t>(os, r.length);
      for (const auto x : labels(r)) put<std::int64_t>(os, x);
    }
    for (const auto& node : retained_) {
      put<std::uint32_t>(os, edge_shape(node.left));
      put<std::uint32_t>(os, edge_shape(node.right));
    }
  }

  static CompactedBst read(std::istream& is) {
    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, "CBST1", 5) != 0) throw CorruptStructure("cbst: bad magic");
    CompactedBst c;
    c.n_ = get<std::uint64_t>(is);
    const auto nret = get<std::uint32_t>(is);
    const auto nred = get<std::uint32_t>(is);
    c.root_ = get<std::uint32_t>(is);
    if (nret > c.n_ || nred > c.n_) throw CorruptStructure("cbst: table sizes exceed element count");
    c.retained_.resize(nret);
    for (auto& node : c.retained_) {
      node.value = get<std::int64_t>(is);
      node.size = get<std::uint64_t>(is);
      for (auto* e : {&node.left, &node.right}) {
        const auto kind = get<std::uint8_t>(is);
        if (kind > 2) throw CorruptStructure("cbst: bad edge kind");
        e->kind = static_cast<CbstEdge::Kind>(kind);
        e->index = get<std::uint32_t>(is);
      }
    }
    c.redirects_.resize(nred);
    for (auto& r : c.redirects_) {
      r.target = get<std::uint32_t>(is);
      r.length = get<std::uint64_t>(is);
      if (r.length > c.n_) throw CorruptStructure("cbst: redirect list longer than the element count");
      r.offset = c.labels_.size();
      for (std::uint64_t i = 0; i < r.length; ++i) c.labels_.push_back(get<std::int64_t>(is));
    }
    c.validate();
    for (const auto& node : c.retained_) {
      const auto l = get<std::uint32_t>(is), r = get<std::uint32_t>(is);
      if (l != c.edge_shape(node.left) || r != c.edge_shape(node.right))
        throw CorruptStructure("cbst: shape table disagrees with retained table");
    }
    if (is.peek() != std::char_traits<char>::eof()) throw CorruptStructure("cbst: trailing data");
    return c;
  }

  friend bool operator==(const CompactedBst&, const CompactedBst&) = default;

 private:
  SearchOutcome search_list(const Redirect& r, std::int64_t query, SearchOutcome out,
                            std::vector<std::uint64_t>* trace) const {
    std::uint32_t shape = r.target;
    std::uint64_t i = 0;
    for (;;) {
      if (i >= r.length) throw CorruptStructure("cbst: index walk left its label list");
      const auto value = labels_[r.offset + i];
      if (trace) trace->push_back(i);
      ++out.comparisons;
      if (query == value) {
        out.found = true;
        return out;
      }
      const auto& node = retained_[shape];
      const auto left_shape = edge_shape(node.left);
      if (query < value) {
        if (left_shape == kNoNode) return out;
        i += 1;
        shape = left_shape;
      } else {
        const auto right_shape = edge_shape(node.right);
        if (right_shape == kNoNode) return out;
        i += 1 + shape_size(left_shape);
        shape = right_shape;
      }
      ++out.additions;
    }
  }

  template <class T>
  static void put(std::ostream& os, T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf[i] = static_cast<char>(u & 0xFF);
      if constexpr (sizeof(T) > 1) u >>= 8;
    }
    os.write(buf, sizeof(T));
  }
  template <class T>
  static T get(std::istream& is) {
    using U = std::make_unsigned_t<T>;
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw CorruptStructure("cbst: truncated input");
    U u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) {
      if constexpr (sizeof(T) > 1) u <<= 8;
      u |= buf[i];
    }
    return static_cast<T>(u);
  }

  std::size_t n_ = 0;
  std::uint32_t root_ = 0;
  std::vector<RetainedNode> retained_;
  std::vector<Redirect> redirects_;
  std::vector<std::int64_t> labels_;
};

/// Plain BST search with the same comparison accounting (one three-way
/// comparison per visited node).
inline SearchOutcome bst_search(const LabeledTree& bst, std::int64_t query) {
  SearchOutcome out;
  auto v = bst.root();
  while (v != kNoNode) {
    ++out.comparisons;
    const auto x = bst.label(v);
    if (query == x) {
      out.found = true;
      return out;
    }
    v = query < x ? bst.left(v) : bst.right(v);
  }
  return out;
}

// Canonical byte accounting.
//   plain BST node      value 8 + two child references 8 + 8          = 24
//   retained record     value 8 + size 8 + two 4-byte edge descriptors = 24
//   redirect            target 8 + 8 per list label
// Retained records are indexed by shape id and carry the shape's size and
// child references, so the shape table adds no bytes of its own.
inline constexpr std::uint64_t kPlainNodeBytes = 24;
inline constexpr std::uint64_t kRetainedBytes = 24;
inline constexpr std::uint64_t kRedirectBytes = 8;
inline constexpr std::uint64_t kLabelBytes = 8;

inline std::uint64_t footprint(const LabeledTree& bst) { return kPlainNodeBytes * bst.size(); }

inline std::uint64_t footprint(const CompactedBst& c) {
  std::uint64_t bytes = kRetainedBytes * c.retained().size();
  for (const auto& r : c.redirects()) bytes += kRedirectBytes + kLabelBytes * r.length;
  return bytes;
}

}  // namespace treecomp
