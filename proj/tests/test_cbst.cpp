#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "test_util.hpp"
#include "treecomp/cbst.hpp"
#include "treecomp/dag.hpp"
#include "treecomp/sampler.hpp"

using namespace treecomp;

namespace {

const std::vector<std::int64_t> kFig3{4, 8, 6, 2, 9, 1, 3, 7, 5};

std::string bytes_of(const CompactedBst& c) {
  std::ostringstream os;
  c.write(os);
  return os.str();
}

CompactedBst from_bytes(const std::string& b) {
  std::istringstream is(b);
  return CompactedBst::read(is);
}

void put_u64(std::string& b, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b[at + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

}  // namespace

TEST(Cbst, Fig4Structure) {
  const auto bst = LabeledTree::bst_from_sequence(kFig3);
  const auto c = CompactedBst::build(bst);
  ASSERT_EQ(c.retained().size(), 4u);
  std::vector<std::pair<std::int64_t, std::uint64_t>> vs;
  for (const auto& r : c.retained()) vs.emplace_back(r.value, r.size);
  std::sort(vs.begin(), vs.end());
  EXPECT_EQ(vs, (std::vector<std::pair<std::int64_t, std::uint64_t>>{{1, 1}, {2, 3}, {4, 9}, {8, 5}}));
  std::vector<std::vector<std::int64_t>> lists;
  for (const auto& r : c.redirects()) {
    lists.emplace_back(c.labels(r).begin(), c.labels(r).end());
    EXPECT_EQ(r.length, c.shape_size(r.target));
  }
  EXPECT_EQ(lists, (std::vector<std::vector<std::int64_t>>{{6, 5, 7}, {9}, {3}}));
  EXPECT_EQ(c.retained().size(), compact(bst).size());
  EXPECT_EQ(c.unfold(), bst);
}

TEST(Cbst, Fig4Searches) {
  const auto c = CompactedBst::build(LabeledTree::bst_from_sequence(kFig3));
  std::vector<std::uint64_t> trace;
  const auto s7 = c.search(7, &trace);
  EXPECT_TRUE(s7.found);
  EXPECT_EQ(s7.comparisons, 4u);
  EXPECT_EQ(s7.additions, 1u);
  EXPECT_EQ(trace, (std::vector<std::uint64_t>{0, 2}));
  const auto s10 = c.search(10);
  EXPECT_FALSE(s10.found);
  EXPECT_EQ(s10.comparisons, 3u);
  const auto s4 = c.search(4);
  EXPECT_TRUE(s4.found);
  EXPECT_EQ(s4.comparisons, 1u);
  EXPECT_EQ(s4.additions, 0u);
  for (std::int64_t q = 0; q <= 10; ++q) {
    const auto a = bst_search(LabeledTree::bst_from_sequence(kFig3), q), b = c.search(q);
    EXPECT_EQ(a.found, b.found);
    EXPECT_EQ(a.comparisons, b.comparisons);
    EXPECT_EQ(b.found, q >= 1 && q <= 9);
  }
}

TEST(Cbst, SingleNodeAndBalanced) {
  const auto one = LabeledTree::bst_from_sequence(testutil::seq({42}));
  const auto c1 = CompactedBst::build(one);
  EXPECT_EQ(c1.retained().size(), 1u);
  EXPECT_TRUE(c1.redirects().empty());
  EXPECT_EQ(c1.unfold(), one);
  EXPECT_GT(footprint(c1), 0u);
  EXPECT_EQ(footprint(c1), footprint(one));  // equal fixed costs at n = 1

  const auto bal = LabeledTree::bst_from_sequence(testutil::seq({4, 2, 6, 1, 3, 5, 7}));
  const auto c = CompactedBst::build(bal);
  EXPECT_EQ(c.retained().size(), 3u);
  ASSERT_EQ(c.redirects().size(), 2u);  // leaf 3 under the kept cherry; the whole right cherry
  EXPECT_EQ(std::vector<std::int64_t>(c.labels(c.redirects()[0]).begin(), c.labels(c.redirects()[0]).end()),
            testutil::seq({6, 5, 7}));
  EXPECT_EQ(c.unfold(), bal);
}

TEST(Cbst, RejectsInvalidInput) {
  EXPECT_THROW(CompactedBst::build(LabeledTree::recursive({kNoNode, 0})), InvalidTree);
  const auto not_bst = LabeledTree::binary({2, 3, 1}, {1, kNoNode, kNoNode}, {2, kNoNode, kNoNode}, 0);
  EXPECT_THROW(CompactedBst::build(not_bst), InvalidTree);
}

TEST(Cbst, RandomEquivalence) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto n = 1 + s % 300;
    auto perm = sample_permutation(n, s);
    for (auto& x : perm) x = 3 * x - 1000;  // negative keys and gaps
    const auto bst = LabeledTree::bst_from_sequence(perm);
    const auto c = CompactedBst::build(bst);
    ASSERT_EQ(c.unfold(), bst);
    ASSERT_EQ(c.retained().size(), compact(bst).size());
    std::size_t list_total = c.retained().size();
    for (const auto& r : c.redirects()) list_total += r.length;
    ASSERT_EQ(list_total, n);
    for (std::int64_t q = -1001; q <= 3 * static_cast<std::int64_t>(n) - 998; q += 1 + s % 3) {
      const auto a = bst_search(bst, q), b = c.search(q);
      ASSERT_EQ(a.found, b.found);
      ASSERT_EQ(a.comparisons, b.comparisons);
      ASSERT_LE(b.additions, b.comparisons);
    }
  }
}

TEST(Cbst, FootprintAccounting) {
  const auto bst = LabeledTree::bst_from_sequence(kFig3);
  const auto c = CompactedBst::build(bst);
  EXPECT_EQ(footprint(bst), 9u * 24);
  // 4 retained x 24 + redirects (8 + 3*8) + (8 + 8) + (8 + 8).
  EXPECT_EQ(footprint(c), 4u * 24 + 32 + 16 + 16);
}

TEST(Cbst, SerializationRoundTripAndLayout) {
  const auto c = CompactedBst::build(LabeledTree::bst_from_sequence(kFig3));
  const auto b = bytes_of(c);
  // header 5+8+4+4+4, retained 4x26, redirects (12+24)+(12+8)+(12+8), shapes 4x8
  EXPECT_EQ(b.size(), 25u + 4 * 26 + 36 + 20 + 20 + 32);
  EXPECT_EQ(b.substr(0, 5), "CBST1");
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 9u);  // n, little-endian
  EXPECT_EQ(from_bytes(b), c);
  EXPECT_EQ(bytes_of(from_bytes(b)), b);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = CompactedBst::build(sample_bst(1 + s * 13, s));
    ASSERT_EQ(from_bytes(bytes_of(r)), r);
  }
}

TEST(Cbst, DetectsCorruption) {
  const auto c = CompactedBst::build(LabeledTree::bst_from_sequence(kFig3));
  const auto good = bytes_of(c);
  EXPECT_THROW(from_bytes("CBST2" + good.substr(5)), CorruptStructure);
  EXPECT_THROW(from_bytes(good.substr(0, good.size() - 1)), CorruptStructure);
  EXPECT_THROW(from_bytes(good + "x"), CorruptStructure);
  // First redirect list length 3 -> 2: list length no longer matches its shape.
  const std::size_t first_redirect = 25 + 4 * 26;
  auto b = good;
  put_u64(b, first_redirect + 4, 2);
  EXPECT_THROW(from_bytes(b), CorruptStructure);
  // Shape size of a retained record altered.
  b = good;
  put_u64(b, 25 + 8, 7);
  EXPECT_THROW(from_bytes(b), CorruptStructure);
  // Huge list length is rejected before allocating.
  b = good;
  put_u64(b, first_redirect + 4, 1ULL << 60);
  EXPECT_THROW(from_bytes(b), CorruptStructure);
}
