// Copyright 2026 The diffnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diffnas/search_space.hpp"

#include <map>
#include <set>

#include <gtest/gtest.h>

namespace diffnas {
namespace {

SearchSpaceSpec block(int n, int r) { return SearchSpaceSpec(SpaceKind::block, n, r); }
SearchSpaceSpec cell(int n, int r) { return SearchSpaceSpec(SpaceKind::cell, n, r); }

// Brute force: every enumerated architecture at Hamming distance k.
std::vector<Architecture> brute_neighbors(const SearchSpaceSpec& spec, const Architecture& a,
                                          int k) {
  std::vector<Architecture> out;
  for_each_architecture(spec, 1u << 20, [&](const Architecture& b) {
    int d = 0;
    for (int p = 0; p < spec.positions(); ++p) d += a.value(p) != b.value(p);
    if (d == k) out.push_back(b);
  });
  return out;
}

TEST(SearchSpaceSpec, RejectsDegenerateSpaces) {
  EXPECT_THROW(block(1, 3), InvalidSpec);
  EXPECT_THROW(block(3, 1), InvalidSpec);
  EXPECT_THROW(SearchSpaceSpec(SpaceKind::block, 3, 2, {"conv", "conv"}), InvalidSpec);
  EXPECT_THROW(SearchSpaceSpec(SpaceKind::block, 3, 2, {"conv"}), InvalidSpec);
  EXPECT_NO_THROW(SearchSpaceSpec(SpaceKind::cell, 3, 2, {"conv", "pool"}));
}

TEST(SpaceSize, PublishedFormulas) {
  EXPECT_EQ(space_size_paper(block(5, 3)), 243);
  EXPECT_EQ(space_size_paper(cell(4, 5)), 3750);
}

TEST(SpaceSize, ExactCounts) {
  EXPECT_EQ(space_size_exact(block(5, 3)), 243);
  EXPECT_EQ(space_size_exact(cell(4, 2)), 1024);
  EXPECT_EQ(space_size_exact(cell(3, 2)), 64);
  EXPECT_EQ(enumerate_space(cell(3, 2), 64).size(), 64u);
}

TEST(SpaceSize, BigIntegers) {
  // 4^20 * 2^190 is far outside 64 bits.
  const BigInt s = space_size_exact(cell(20, 4));
  EXPECT_EQ(s, ipow(2, 190) * ipow(4, 20));
  EXPECT_EQ(space_size_paper(block(20, 4)).str(), "1099511627776");
}

TEST(Enumerate, SmallBlockInOrder) {
  const auto all = enumerate_space(block(2, 2), 10);
  std::vector<std::string> keys;
  for (const auto& a : all) keys.push_back(to_key(a).text);
  EXPECT_EQ(keys, (std::vector<std::string>{"0-0", "0-1", "1-0", "1-1"}));
}

TEST(Enumerate, DistinctAndSorted) {
  const auto all = enumerate_space(block(6, 3), 1000);
  std::set<std::string> keys;
  for (const auto& a : all) keys.insert(to_key(a).text);
  EXPECT_EQ(keys.size(), 729u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
  // Tuple order coincides with string order for single-digit ops.
  std::vector<std::string> as_listed;
  for (const auto& a : all) as_listed.push_back(to_key(a).text);
  EXPECT_TRUE(std::is_sorted(as_listed.begin(), as_listed.end()));
}

TEST(Enumerate, CellSpaceKeysSorted) {
  const auto all = enumerate_space(cell(3, 2), 64);
  std::vector<std::string> keys;
  for (const auto& a : all) keys.push_back(to_key(a).text);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_EQ(keys.front(), "0-0-0:000");
  EXPECT_EQ(keys.back(), "1-1-1:111");
}

TEST(Enumerate, LimitEnforced) { EXPECT_THROW(enumerate_space(block(6, 3), 10), SpaceTooLarge); }

TEST(ArchKey, RoundTripAndErrors) {
  const auto spec = cell(4, 3);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_architecture(spec, rng);
    EXPECT_EQ(parse_key(spec, to_key(a).text), a);
  }
  EXPECT_THROW(parse_key(spec, "0-1-2-0"), InvalidKey);           // no adjacency
  EXPECT_THROW(parse_key(spec, "0-1-2-3:000000"), InvalidKey);    // op out of range
  EXPECT_THROW(parse_key(spec, "0-1-2:000000"), InvalidKey);      // too few ops
  EXPECT_THROW(parse_key(spec, "0-1-2-0:00000"), InvalidKey);     // short adjacency
  EXPECT_THROW(parse_key(spec, "0-1-x-0:000000"), InvalidKey);
  EXPECT_THROW(parse_key(block(2, 2), "0-1:1"), InvalidKey);
}

TEST(RandomArchitecture, DeterministicPerSeed) {
  const auto spec = cell(5, 3);
  EXPECT_EQ(to_key(random_architecture(spec, 42)), to_key(random_architecture(spec, 42)));
  EXPECT_EQ(random_architecture(spec, 42).adj.size(), 10u);
}

TEST(RandomArchitecture, UniformPerPosition) {
  const auto spec = block(8, 3);
  Rng rng(11);
  std::vector<std::array<int, 3>> counts(8, {0, 0, 0});
  constexpr int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto a = random_architecture(spec, rng);
    for (int p = 0; p < 8; ++p) ++counts[p][a.ops[p]];
  }
  for (const auto& pos : counts)
    for (int c : pos) {
      EXPECT_GE(c / double(draws), 0.30);
      EXPECT_LE(c / double(draws), 0.37);
    }
}

TEST(Neighbors, CountsMatchExamples) {
  const auto b4 = block(4, 3);
  EXPECT_EQ(neighbors_k(b4, random_architecture(b4, 1), 1).size(), 8u);
  const auto b5 = block(5, 3);
  const auto a5 = random_architecture(b5, 2);
  EXPECT_EQ(neighbors_k(b5, a5, 2).size(), 40u);
  EXPECT_EQ(brute_neighbors(b5, a5, 2).size(), 40u);
  const auto c4 = cell(4, 2);
  const auto ac = random_architecture(c4, 3);
  EXPECT_EQ(neighbors_k(c4, ac, 1).size(), 10u);
  EXPECT_EQ(brute_neighbors(c4, ac, 1).size(), 10u);
}

TEST(Neighbors, InvalidK) {
  const auto spec = block(4, 3);
  const auto a = random_architecture(spec, 1);
  EXPECT_THROW(neighbors_k(spec, a, 0), InvalidK);
  EXPECT_THROW(neighbors_k(spec, a, 5), InvalidK);
  EXPECT_NO_THROW(neighbors_k(cell(3, 2), random_architecture(cell(3, 2), 1), 6));
}

// |neighbors_k| == C(n,k)(r-1)^k and the set equals brute-force filtering.
TEST(Neighbors, MatchBruteForceAcrossSmallSpaces) {
  for (int n = 2; n <= 6; ++n)
    for (int r = 2; r <= 4; ++r)
      for (int k = 1; k <= std::min(3, n); ++k) {
        const auto spec = block(n, r);
        const auto a = random_architecture(spec, n * 100 + r * 10 + k);
        auto got = neighbors_k(spec, a, k);
        EXPECT_EQ(BigInt(got.size()), binomial(n, k) * ipow(r - 1, k)) << n << r << k;
        EXPECT_EQ(BigInt(got.size()), neighbor_count(spec, k));
        auto expected = brute_neighbors(spec, a, k);
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, expected) << n << r << k;
      }
}

TEST(Neighbors, SymmetricRelation) {
  const auto spec = cell(3, 3);
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_architecture(spec, rng);
    const int k = 1 + static_cast<int>(rng.below(3));
    for (const auto& b : neighbors_k(spec, a, k)) {
      const auto back = neighbors_k(spec, b, k);
      EXPECT_NE(std::find(back.begin(), back.end(), a), back.end());
    }
  }
}

TEST(RandomNeighbor, ExactDistanceAndUniform) {
  // Cell space: subsets carry unequal neighbor counts, so a uniform subset
  // choice would be visibly biased.
  const auto spec = cell(3, 4);
  const auto a = random_architecture(spec, 9);
  const auto all = neighbors_k(spec, a, 2);
  std::map<Architecture, int> hits;
  Rng rng(10);
  const int draws = 200 * static_cast<int>(all.size());
  for (int i = 0; i < draws; ++i) {
    const auto b = random_neighbor(spec, a, 2, rng);
    ASSERT_EQ(edit_distance(a, b), 2);
    ++hits[b];
  }
  EXPECT_EQ(hits.size(), all.size());
  // Chi-square with |all|-1 dof; 99.9th percentile is far below 2 * dof for
  // dof around 100.
  double chi2 = 0.0;
  for (const auto& nb : all) {
    const double diff = hits[nb] - 200.0;
    chi2 += diff * diff / 200.0;
  }
  EXPECT_LT(chi2, 2.0 * static_cast<double>(all.size()));
}

TEST(EditDistance, Examples) {
  const auto spec = block(3, 2);
  const Architecture zeros{{0, 0, 0}, {}};
  const Architecture ones{{1, 1, 1}, {}};
  EXPECT_EQ(edit_distance(zeros, zeros), 0);
  EXPECT_EQ(edit_distance(zeros, ones), 3);
  EXPECT_THROW(edit_distance(zeros, Architecture{{0, 0}, {}}), SpecMismatch);
  const auto b5 = block(5, 3);
  const auto a = random_architecture(b5, 4);
  for (const auto& b : neighbors_k(b5, a, 2)) EXPECT_EQ(edit_distance(a, b), 2);
  (void)spec;
}

TEST(EditDistance, IsAMetric) {
  const auto spec = cell(4, 3);
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_architecture(spec, rng);
    const auto b = random_architecture(spec, rng);
    const auto c = random_architecture(spec, rng);
    EXPECT_EQ(edit_distance(a, b), edit_distance(b, a));
    EXPECT_EQ(edit_distance(a, b) == 0, a == b);
    EXPECT_LE(edit_distance(a, c), edit_distance(a, b) + edit_distance(b, c));
  }
}

}  // namespace
}  // namespace diffnas
