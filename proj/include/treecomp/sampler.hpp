// Seeded uniform samplers for random recursive trees and random BSTs.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "treecomp/rng.hpp"
#include "treecomp/tree.hpp"

namespace treecomp {

struct SamplerConfig {
  Family family = Family::Recursive;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

/// Node i (label i, i >= 2) attaches to a parent drawn uniformly from 1..i-1.
inline LabeledTree sample_recursive(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_recursive: n must be >= 1");
  Xoshiro256 gen(seed);
  std::vector<std::uint32_t> parents(n);
  parents[0] = kNoNode;
  for (std::size_t i = 1; i < n; ++i) parents[i] = static_cast<std::uint32_t>(gen.uniform_below(i));
  return LabeledTree::recursive(std::move(parents));
}

/// BST built by inserting a uniform permutation of 1..n.
inline LabeledTree sample_bst(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_bst: n must be >= 1");
  const auto perm = sample_permutation(n, seed);
  return LabeledTree::bst_from_sequence(perm);
}

inline LabeledTree sample(const SamplerConfig& cfg) {
  return cfg.family == Family::Recursive ? sample_recursive(cfg.n, cfg.seed) : sample_bst(cfg.n, cfg.seed);
}

}  // namespace treecomp
