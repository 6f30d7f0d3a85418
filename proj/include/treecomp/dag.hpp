// Compaction of a tree into the DAG of its distinct fringe subtree shapes.
//
// One postorder pass: each node's shape is interned by the tuple of its
// children's ids (sorted for Polya mode, (left, right) for plane binary
// mode). Children are interned before their parent, so the id tuple is a
// complete canonical key and interning is exact.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "treecomp/shape.hpp"
#include "treecomp/tree.hpp"

namespace treecomp {

struct DagNode {
  std::uint32_t size = 1;
  /// Polya: ids ascending. PlaneBinary: exactly {left, right}, kNoNode when absent.
  std::vector<std::uint32_t> children;

  friend bool operator==(const DagNode&, const DagNode&) = default;
};

struct Dag {
  ShapeMode mode = ShapeMode::Polya;
  std::vector<DagNode> nodes;  // interning (postorder) order
  std::uint32_t root = kNoNode;
  std::size_t source_size = 0;

  /// Number of distinct fringe shapes, X_n.
  std::size_t size() const noexcept { return nodes.size(); }

  friend bool operator==(const Dag&, const Dag&) = default;
};

/// Compaction plus the per-node bookkeeping the compressed BST needs.
struct Compaction {
  Dag dag;
  std::vector<std::uint32_t> shape_id;          // source node -> dag id
  std::vector<std::uint32_t> first_occurrence;  // dag id -> first source node in postorder
};

namespace detail {
struct IdTupleHash {
  std::size_t operator()(const std::vector<std::uint32_t>& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto x : key) {
      h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};
}  // namespace detail

inline Compaction compact_detailed(const LabeledTree& tree, ShapeMode mode) {
  if (mode != tree.mode()) throw std::invalid_argument("compact: mode incompatible with tree kind");
  Compaction out;
  out.dag.mode = mode;
  out.dag.source_size = tree.size();
  out.shape_id.assign(tree.size(), kNoNode);
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, detail::IdTupleHash> table;
  table.reserve(tree.size() / 2 + 1);
  std::vector<std::uint32_t> key;
  for (const auto v : tree.postorder()) {
    key.clear();
    std::uint32_t size = 1;
    if (mode == ShapeMode::Polya) {
      for (const auto c : tree.children(v)) {
        key.push_back(out.shape_id[c]);
        size += out.dag.nodes[out.shape_id[c]].size;
      }
      std::sort(key.begin(), key.end());
    } else {
      for (const auto c : {tree.left(v), tree.right(v)}) {
        key.push_back(c == kNoNode ? kNoNode : out.shape_id[c]);
        if (c != kNoNode) size += out.dag.nodes[out.shape_id[c]].size;
      }
    }
    const auto next_id = static_cast<std::uint32_t>(out.dag.nodes.size());
    auto [it, inserted] = table.try_emplace(key, next_id);
    if (inserted) {
      out.dag.nodes.push_back({size, key});
      out.first_occurrence.push_back(v);
    }
    out.shape_id[v] = it->second;
  }
  out.dag.root = out.shape_id[tree.root()];
  return out;
}

inline Dag compact(const LabeledTree& tree, ShapeMode mode) { return compact_detailed(tree, mode).dag; }
inline Dag compact(const LabeledTree& tree) { return compact(tree, tree.mode()); }

/// X_n / n, exact.
inline mpq_class compaction_ratio(const LabeledTree& tree, ShapeMode mode) {
  mpq_class r(static_cast<unsigned long>(compact(tree, mode).size()), static_cast<unsigned long>(tree.size()));
  r.canonicalize();
  return r;
}

/// Expands the DAG back into a tree. Polya DAGs yield a recursive tree
/// labeled in preorder; plane binary DAGs yield a BST labeled 1..n in order.
inline LabeledTree unfold(const Dag& dag) {
  if (dag.root == kNoNode) throw std::invalid_argument("unfold: empty dag");
  const auto n = dag.nodes[dag.root].size;
  std::vector<std::uint32_t> parent, left, right, dag_id;
  parent.reserve(n);
  struct Frame {
    std::uint32_t id, parent;
    int slot;
  };
  std::vector<Frame> stack{{dag.root, kNoNode, -1}};
  while (!stack.empty()) {
    const auto f = stack.back();
    stack.pop_back();
    const auto v = static_cast<std::uint32_t>(parent.size());
    parent.push_back(f.parent);
    dag_id.push_back(f.id);
    left.push_back(kNoNode);
    right.push_back(kNoNode);
    if (f.slot == 0) left[f.parent] = v;
    if (f.slot == 1) right[f.parent] = v;
    const auto& kids = dag.nodes[f.id].children;
    for (std::size_t i = kids.size(); i-- > 0;) {
      if (kids[i] == kNoNode) continue;
      stack.push_back({kids[i], v, dag.mode == ShapeMode::PlaneBinary ? static_cast<int>(i) : -1});
    }
  }
  if (dag.mode == ShapeMode::Polya) return LabeledTree::recursive(std::move(parent));
  // In-order labels make the unfolded binary tree a BST.
  std::vector<std::int64_t> labels(parent.size());
  std::int64_t next = 1;
  std::vector<std::uint32_t> stack2;
  std::uint32_t cur = 0;
  while (cur != kNoNode || !stack2.empty()) {
    while (cur != kNoNode) {
      stack2.push_back(cur);
      cur = left[cur];
    }
    cur = stack2.back();
    stack2.pop_back();
    labels[cur] = next++;
    cur = right[cur];
  }
  return LabeledTree::binary(std::move(labels), std::move(left), std::move(right), 0);
}

/// `{"mode":..., "root":id, "nodes":[{"id":k,"size":s,"children":[ids]}...]}`;
/// absent plane binary slots are null.
inline nlohmann::json dag_to_json(const Dag& dag) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t id = 0; id < dag.nodes.size(); ++id) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto c : dag.nodes[id].children) {
      if (c == kNoNode) kids.push_back(nullptr);
      else kids.push_back(c);
    }
    nodes.push_back({{"id", id}, {"size", dag.nodes[id].size}, {"children", std::move(kids)}});
  }
  return {{"mode", dag.mode == ShapeMode::Polya ? "polya" : "plane"},
          {"root", dag.root},
          {"source_size", dag.source_size},
          {"nodes", std::move(nodes)}};
}

}  // namespace treecomp
