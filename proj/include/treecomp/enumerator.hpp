// Exhaustive small-scale oracles: every labeled tree of a family, every
// shape of a given size, labeling counts and exact expectations by brute
// force. Hard size guards keep factorial work bounded.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "treecomp/dag.hpp"
#include "treecomp/shape.hpp"
#include "treecomp/tree.hpp"

namespace treecomp {

inline constexpr std::size_t kMaxRecursiveEnum = 9;
inline constexpr std::size_t kMaxBstEnum = 8;
inline constexpr std::uint32_t kMaxPolyaShapeEnum = 16;
inline constexpr std::uint32_t kMaxBinaryShapeEnum = 14;
inline constexpr std::uint32_t kMaxLabelingBrute = 9;

class GuardError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace detail {
inline void guard(bool ok, const std::string& what) {
  if (!ok) throw GuardError(what);
}
}  // namespace detail

/// Visits all (n-1)! recursive trees of size n. Parent choices are
/// enumerated as an odometer with the parent of label 2 varying slowest.
inline void for_each_recursive(std::size_t n, const std::function<void(const LabeledTree&)>& visit) {
  detail::guard(n >= 1 && n <= kMaxRecursiveEnum, "enumerate_recursive: n must be in 1..9");
  std::vector<std::uint32_t> parents(n, 0);
  parents[0] = kNoNode;
  for (;;) {
    visit(LabeledTree::recursive(parents));
    // Increment the odometer from the last label; label i+1 has i choices.
    std::size_t i = n - 1;
    for (;;) {
      if (i == 0) return;
      if (++parents[i] < i) break;
      parents[i] = 0;
      --i;
    }
  }
}

inline std::vector<LabeledTree> enumerate_recursive(std::size_t n) {
  std::vector<LabeledTree> out;
  for_each_recursive(n, [&](const LabeledTree& t) { out.push_back(t); });
  return out;
}

/// Visits the BST of every permutation of 1..n, permutations in lexicographic order.
inline void for_each_bst(std::size_t n, const std::function<void(const LabeledTree&)>& visit) {
  detail::guard(n >= 1 && n <= kMaxBstEnum, "enumerate_bsts: n must be in 1..8");
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::int64_t{1});
  do {
    visit(LabeledTree::bst_from_sequence(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

inline std::vector<LabeledTree> enumerate_bsts(std::size_t n) {
  std::vector<LabeledTree> out;
  for_each_bst(n, [&](const LabeledTree& t) { out.push_back(t); });
  return out;
}

/// All shapes of every size up to a bound, built size by size. Within a
/// size, shapes are listed in canonical (encoding) order for Polya mode and
/// by (left size, left index, right index) for plane binary mode.
class ShapeCatalog {
 public:
  explicit ShapeCatalog(ShapeMode mode) : mode_(mode) { by_size_.push_back({}); }

  ShapeMode mode() const noexcept { return mode_; }

  const std::vector<Shape>& of_size(std::uint32_t k) {
    const auto cap = mode_ == ShapeMode::Polya ? kMaxPolyaShapeEnum : kMaxBinaryShapeEnum;
    detail::guard(k >= 1 && k <= cap, "enumerate_shapes: size outside guard");
    while (by_size_.size() <= k) extend();
    return by_size_[k];
  }

 private:
  void extend() {
    const auto k = static_cast<std::uint32_t>(by_size_.size());
    std::vector<Shape> level;
    if (mode_ == ShapeMode::PlaneBinary) {
      const std::vector<Shape> none{Shape{}};
      for (std::uint32_t l = 0; l < k; ++l) {
        const auto& lefts = l == 0 ? none : by_size_[l];
        const auto& rights = (k - 1 - l) == 0 ? none : by_size_[k - 1 - l];
        for (const auto& a : lefts)
          for (const auto& b : rights) level.push_back(Shape::binary(a, b));
      }
    } else {
      // Forests of total size k-1 as non-increasing sequences over the
      // canonical list of all smaller shapes.
      std::vector<const Shape*> all;
      for (std::uint32_t s = 1; s < k; ++s)
        for (const auto& t : by_size_[s]) all.push_back(&t);
      std::vector<Shape> forest;
      std::function<void(std::uint32_t, std::size_t)> grow = [&](std::uint32_t remaining, std::size_t max_idx) {
        if (remaining == 0) {
          level.push_back(Shape::polya(forest));
          return;
        }
        for (std::size_t i = std::min(max_idx, all.size()); i-- > 0;) {
          if (all[i]->size() > remaining) continue;
          forest.push_back(*all[i]);
          grow(remaining - all[i]->size(), i + 1);
          forest.pop_back();
        }
      };
      grow(k - 1, all.size());
      std::sort(level.begin(), level.end(), Shape::canonical_less);
    }
    by_size_.push_back(std::move(level));
  }

  ShapeMode mode_;
  std::vector<std::vector<Shape>> by_size_;
};

/// Every isomorphism class of shapes of size k, each exactly once.
inline std::vector<Shape> enumerate_shapes(ShapeMode mode, std::uint32_t k) {
  ShapeCatalog catalog(mode);
  return catalog.of_size(k);
}

/// Number of distinct increasing labelings of `shape`, counted by trying
/// every increasing assignment of 1..k and deduplicating the resulting
/// labeled trees up to isomorphism of the mode.
inline std::uint64_t labelings_bruteforce(const Shape& shape) {
  const auto k = shape.size();
  detail::guard(k >= 1 && k <= kMaxLabelingBrute, "labelings_bruteforce: size must be in 1..9");
  const auto tree = tree_of(shape);
  std::vector<std::vector<std::uint32_t>> kids(k);
  for (std::uint32_t v = 0; v < k; ++v) tree.for_each_child(v, [&](std::uint32_t c) { kids[v].push_back(c); });
  const auto pre = tree.preorder();

  std::vector<std::uint32_t> label_of(k, 0);
  std::vector<std::uint32_t> available{tree.root()};
  std::set<std::vector<std::uint32_t>> distinct;
  std::function<void(std::uint32_t)> assign = [&](std::uint32_t next) {
    if (next > k) {
      std::vector<std::uint32_t> key;
      if (shape.mode() == ShapeMode::Polya) {
        // A recursive tree is determined by the parent label of each label.
        key.assign(k, 0);
        for (std::uint32_t v = 0; v < k; ++v)
          key[label_of[v] - 1] = tree.parent(v) == kNoNode ? 0 : label_of[tree.parent(v)];
      } else {
        // Plane trees have no automorphisms: positions are fixed.
        for (const auto v : pre) key.push_back(label_of[v]);
      }
      distinct.insert(std::move(key));
      return;
    }
    for (std::size_t i = 0; i < available.size(); ++i) {
      const auto v = available[i];
      label_of[v] = next;
      std::vector<std::uint32_t> saved = available;
      available.erase(available.begin() + static_cast<std::ptrdiff_t>(i));
      available.insert(available.end(), kids[v].begin(), kids[v].end());
      assign(next + 1);
      available = std::move(saved);
    }
  };
  assign(1);
  return distinct.size();
}

/// E(X_n) over the whole uniform family, exactly.
inline mpq_class expected_size_bruteforce(Family family, std::size_t n) {
  mpz_class total = 0;
  std::uint64_t count = 0;
  auto add = [&](const LabeledTree& t) {
    total += static_cast<unsigned long>(compact(t).size());
    ++count;
  };
  if (family == Family::Recursive) for_each_recursive(n, add);
  else for_each_bst(n, add);
  mpq_class e(total, mpz_class(static_cast<unsigned long>(count)));
  e.canonicalize();
  return e;
}

}  // namespace treecomp
