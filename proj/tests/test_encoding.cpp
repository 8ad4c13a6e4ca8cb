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

#include "diffnas/encoding.hpp"

#include <map>
#include <set>

#include <gtest/gtest.h>

namespace diffnas {
namespace {

SearchSpaceSpec block(int n, int r) { return SearchSpaceSpec(SpaceKind::block, n, r); }
SearchSpaceSpec cell(int n, int r) { return SearchSpaceSpec(SpaceKind::cell, n, r); }

TEST(OneHot, Example) {
  EXPECT_EQ(encode_onehot(block(2, 2), Architecture{{0, 1}, {}}),
            (FeatureVector{1, 0, 0, 1}));
}

TEST(OneHot, CellLayoutAppendsAdjacency) {
  const auto v = encode_onehot(cell(3, 2), Architecture{{1, 0, 1}, {1, 0, 1}});
  EXPECT_EQ(v, (FeatureVector{0, 1, 1, 0, 0, 1, 1, 0, 1}));
}

TEST(OneHot, NodeSlicesSumToOne) {
  const auto spec = block(3, 3);
  for (const auto& a : enumerate_space(spec, 27)) {
    const auto v = encode_onehot(spec, a);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(v[3 * i] + v[3 * i + 1] + v[3 * i + 2], 1.0);
  }
}

TEST(OneHot, DecodeInvertsEncode) {
  const auto spec = cell(5, 4);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_architecture(spec, rng);
    EXPECT_EQ(decode_onehot(spec, encode_onehot(spec, a)), a);
  }
  EXPECT_THROW(decode_onehot(spec, FeatureVector(3, 0.0)), DimensionMismatch);
  auto bad = encode_onehot(spec, random_architecture(spec, rng));
  bad[0] = bad[1] = 1.0;
  EXPECT_THROW(decode_onehot(spec, bad), InvalidArgument);
}

TEST(Diff, Identity) {
  const Architecture a{{0, 1, 2}, {}};
  EXPECT_TRUE(diff(a, a).empty());
  EXPECT_EQ(apply_diff(a, DiffEncoding{}), a);
}

TEST(Diff, SingleEdit) {
  const auto d = diff(Architecture{{0, 1, 2}, {}}, Architecture{{0, 1, 0}, {}});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.edits[0], (Edit{false, 2, 2, 0}));
}

TEST(Diff, SortedOpsBeforeAdjacency) {
  const auto d = diff(Architecture{{0, 1, 2}, {0, 0, 1}}, Architecture{{1, 1, 0}, {1, 0, 0}});
  EXPECT_EQ(to_text(d), "0:0>1,2:2>0,a0:0>1,a2:1>0");
}

TEST(Diff, LengthIsEditDistanceAndRoundTrips) {
  const auto spec = cell(3, 2);
  const auto all = enumerate_space(spec, 64);
  for (const auto& a : all)
    for (const auto& b : all) {
      const auto d = diff(a, b);
      ASSERT_EQ(static_cast<int>(d.size()), edit_distance(a, b));
      ASSERT_EQ(apply_diff(a, d), b);
    }
}

TEST(Diff, SpecMismatch) {
  EXPECT_THROW(diff(Architecture{{0, 1}, {}}, Architecture{{0, 1, 2}, {}}), SpecMismatch);
}

TEST(ApplyDiff, RandomRoundTrip) {
  const auto spec = cell(6, 3);
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_architecture(spec, rng);
    const auto b = random_architecture(spec, rng);
    EXPECT_EQ(apply_diff(a, diff(a, b)), b);
  }
}

TEST(ApplyDiff, StaleAnchor) {
  DiffEncoding d{{Edit{false, 0, 1, 2}}};
  EXPECT_THROW(apply_diff(Architecture{{0, 0, 0}, {}}, d), StaleDiff);
  DiffEncoding adj{{Edit{true, 1, 1, 0}}};
  EXPECT_THROW(apply_diff(Architecture{{0, 0, 0}, {0, 0, 0}}, adj), StaleDiff);
}

TEST(DiffFeature, Examples) {
  const auto spec = block(2, 2);
  EXPECT_EQ(diff_to_feature(DiffEncoding{}, spec), FeatureVector(4, 0.0));
  EXPECT_EQ(diff_to_feature(DiffEncoding{{Edit{false, 0, 0, 1}}}, spec),
            (FeatureVector{-1, 1, 0, 0}));
}

TEST(DiffFeature, EqualsOneHotSubtraction) {
  const auto spec = cell(5, 3);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_architecture(spec, rng);
    const auto b = random_architecture(spec, rng);
    const auto f = diff_to_feature(diff(a, b), spec);
    const auto ea = encode_onehot(spec, a);
    const auto eb = encode_onehot(spec, b);
    for (std::size_t j = 0; j < f.size(); ++j) ASSERT_EQ(f[j], eb[j] - ea[j]);
    int op_edits = 0, adj_edits = 0;
    for (const auto& e : diff(a, b).edits) (e.is_adj ? adj_edits : op_edits)++;
    const auto nonzero = std::count_if(f.begin(), f.end(), [](double x) { return x != 0.0; });
    EXPECT_EQ(nonzero, 2 * op_edits + adj_edits);
  }
}

TEST(DiffFeature, InjectiveOnSmallDiffs) {
  const auto spec = cell(3, 3);
  std::map<FeatureVector, DiffEncoding> seen;
  for (const auto& a : enumerate_space(spec, 1000))
    for (int k = 1; k <= 2; ++k)
      for (const auto& b : neighbors_k(spec, a, k)) {
        const auto d = diff(a, b);
        auto [it, inserted] = seen.emplace(diff_to_feature(d, spec), d);
        if (!inserted) {
          ASSERT_EQ(it->second, d);
        }
      }
  EXPECT_EQ(BigInt(seen.size()), dk_size_exact(spec, 1) + dk_size_exact(spec, 2));
}

TEST(DiffText, RoundTripAndErrors) {
  const auto spec = cell(4, 3);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto d = diff(random_architecture(spec, rng), random_architecture(spec, rng));
    EXPECT_EQ(parse_diff(to_text(d)), d);
  }
  EXPECT_THROW(parse_diff("1:2"), ParseError);
  EXPECT_THROW(parse_diff("1:2>2"), ParseError);
  EXPECT_THROW(parse_diff("2:0>1,1:0>1"), ParseError);
  EXPECT_THROW(parse_diff("x:0>1"), ParseError);
}

TEST(DkSize, PublishedCounts) {
  EXPECT_EQ(dk_size_paper(block(5, 3), 1), 15);
  EXPECT_EQ(dk_size_paper(block(5, 3), 2), 90);
  EXPECT_EQ(dk_size_paper(block(4, 2), 4), 16);
  EXPECT_THROW(dk_size_paper(block(4, 2), 5), InvalidK);
  EXPECT_THROW(dk_size_exact(block(4, 2), 0), InvalidK);
}

// Brute force over ordered pairs of an enumerated space.
struct BruteDk {
  std::set<DiffEncoding> signed_diffs;
  std::set<std::vector<std::pair<int, int>>> projections;  // (position, new)
};

BruteDk brute_dk(const SearchSpaceSpec& spec, int k) {
  BruteDk out;
  const auto all = enumerate_space(spec, 1u << 16);
  for (const auto& a : all)
    for (const auto& b : all) {
      if (edit_distance(a, b) != k) continue;
      const auto d = diff(a, b);
      out.signed_diffs.insert(d);
      std::vector<std::pair<int, int>> proj;
      for (const auto& e : d.edits) proj.emplace_back(e.position + (e.is_adj ? 1000 : 0), e.new_val);
      out.projections.insert(proj);
    }
  return out;
}

TEST(DkSize, ExactMatchesBruteForce) {
  EXPECT_EQ(brute_dk(block(5, 3), 1).signed_diffs.size(), 30u);
  EXPECT_EQ(dk_size_exact(block(5, 3), 1), 30);
  const auto r2 = brute_dk(block(4, 2), 1);
  EXPECT_EQ(r2.signed_diffs.size(), 8u);
  EXPECT_EQ(r2.projections.size(), 8u);
  EXPECT_EQ(dk_size_paper(block(4, 2), 1), 8);
  EXPECT_EQ(brute_dk(block(3, 3), 2).signed_diffs.size(), 108u);
  EXPECT_EQ(dk_size_exact(block(3, 3), 2), 108);
}

TEST(DkSize, CellExtensionMatchesBruteForce) {
  const auto spec = cell(3, 2);
  for (int k = 1; k <= 3; ++k) {
    const auto b = brute_dk(spec, k);
    EXPECT_EQ(BigInt(b.signed_diffs.size()), dk_size_exact(spec, k)) << k;
    EXPECT_EQ(BigInt(b.projections.size()), dk_size_paper(spec, k)) << k;
  }
}

TEST(DkSize, ProjectionCountsMatchPublishedFormula) {
  for (int n = 2; n <= 5; ++n)
    for (int r = 2; r <= 3; ++r)
      for (int k = 1; k <= std::min(3, n); ++k) {
        const auto spec = block(n, r);
        EXPECT_EQ(BigInt(brute_dk(spec, k).projections.size()), dk_size_paper(spec, k));
        EXPECT_EQ(dk_size_paper(spec, k), ipow(r, k) * binomial(n, k));
      }
}

TEST(DkSize, VanishingShareOfTheSpace) {
  using boost::multiprecision::cpp_rational;
  cpp_rational previous = 1;
  for (int n : {4, 8, 12}) {
    const auto spec = block(n, 3);
    const cpp_rational share(dk_size_paper(spec, 1), space_size_paper(spec));
    EXPECT_LT(share, previous);
    previous = share;
  }
  EXPECT_LT(previous, cpp_rational(1, 10000));
}

}  // namespace
}  // namespace diffnas
