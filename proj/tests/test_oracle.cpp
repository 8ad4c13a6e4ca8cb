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

#include "diffnas/oracle.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "diffnas/encoding.hpp"

namespace diffnas {
namespace {

const SearchSpaceSpec kSpace(SpaceKind::block, 8, 3);

struct ConstantOracle {
  SearchSpaceSpec space;
  double value;
  const SearchSpaceSpec& spec() const { return space; }
  double score(const Architecture&) const { return value; }
};

TEST(Synthetic, DeterministicAndBounded) {
  const SyntheticLandscape land(kSpace, 17);
  const SyntheticLandscape twin(kSpace, 17);
  for_each_architecture(kSpace, 6561, [&](const Architecture& a) {
    const double s = land.score(a);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 1.0);
    ASSERT_EQ(s, twin.score(a));
  });
}

TEST(Synthetic, FrozenValues) {
  // Pins the hash construction: any change to derive_seed or the score
  // formula shows up here.
  const SyntheticLandscape land(kSpace, 1);
  EXPECT_EQ(land.unary_term(0, 0), bits_to_unit(derive_seed(1, 1, 0, 0)));
  EXPECT_EQ(mix64(0), 0xE220A8397B1DCDAFULL);
  const Architecture zeros{std::vector<int>(8, 0), {}};
  double unary = 0.0, pairs = 0.0;
  for (int p = 0; p < 8; ++p) unary += land.unary_term(p, 0);
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) pairs += land.pair_term(i, j, 0, 0);
  EXPECT_EQ(land.score(zeros), 0.6 * (unary / 8) + 0.4 * (pairs / 28));
}

TEST(Synthetic, AdditiveWhenPairWeightIsZero) {
  const SyntheticLandscape land(kSpace, 5, 0.0);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_architecture(kSpace, rng);
    const auto b = random_neighbor(kSpace, a, 1, rng);
    const auto e = diff(a, b).edits.at(0);
    const double expected =
        (land.unary_term(e.position, e.new_val) - land.unary_term(e.position, e.old_val)) / 8.0;
    EXPECT_NEAR(land.score(b) - land.score(a), expected, 1e-15);
  }
}

TEST(Synthetic, PairTermsMakeDeltasContextDependent) {
  const SyntheticLandscape land(kSpace, 5, 0.4);
  // Same edit at position 0, two contexts differing at position 1.
  bool found = false;
  for (int ctx = 1; ctx < 3 && !found; ++ctx) {
    Architecture a{std::vector<int>(8, 0), {}};
    Architecture b = a;
    b.ops[0] = 1;
    Architecture c = a, d = b;
    c.ops[1] = d.ops[1] = ctx;
    found = std::abs((land.score(b) - land.score(a)) - (land.score(d) - land.score(c))) > 1e-9;
  }
  EXPECT_TRUE(found);
}

TEST(Synthetic, CellSpacesAndMismatch) {
  const SearchSpaceSpec cell(SpaceKind::cell, 4, 2);
  const SyntheticLandscape land(cell, 3);
  for (const auto& a : enumerate_space(cell, 1024)) {
    const double s = land.score(a);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_THROW(land.score(Architecture{{0, 1, 0, 1}, {}}), SpecMismatch);
  EXPECT_THROW(SyntheticLandscape(kSpace, 1, 1.5), InvalidArgument);
}

TEST(NoisyProxy, ZeroSigmaIsExact) {
  const SyntheticLandscape land(kSpace, 2);
  const NoisyProxy proxy(land, 0.0, 9);
  const auto a = random_architecture(kSpace, 4);
  EXPECT_EQ(proxy.proxy_score(a, 0), land.score(a));
  EXPECT_EQ(proxy.proxy_score(a, 77), land.score(a));
}

TEST(NoisyProxy, UnbiasedAndReproducible) {
  const SyntheticLandscape land(kSpace, 2);
  const double sigma = 0.02;
  const NoisyProxy proxy(land, sigma, 9);
  const auto a = random_architecture(kSpace, 4);
  double sum = 0.0;
  for (std::uint64_t c = 0; c < 10000; ++c) sum += proxy.proxy_score(a, c);
  EXPECT_NEAR(sum / 10000, land.score(a), 3 * sigma / 100);
  EXPECT_EQ(proxy.proxy_score(a, 123), proxy.proxy_score(a, 123));
  EXPECT_NE(proxy.proxy_score(a, 123), proxy.proxy_score(a, 124));
  const NoisyProxy other(land, sigma, 10);
  EXPECT_NE(proxy.proxy_score(a, 123), other.proxy_score(a, 123));
}

TEST(CountingOracle, CountsEveryQuery) {
  const SyntheticLandscape land(kSpace, 2);
  const CountingOracle counted(land);
  const auto a = random_architecture(kSpace, 4);
  for (int i = 0; i < 7; ++i) counted.score(a);
  EXPECT_EQ(counted.calls(), 7u);
}

TEST(Tabular, EmptyEntriesAreValid) {
  std::istringstream in("# produced by hand\n#spec kind=block n=3 r=2\n");
  const auto bench = read_tabular(in);
  EXPECT_EQ(bench.size(), 0u);
  EXPECT_EQ(bench.metadata().size(), 1u);
}

TEST(Tabular, ValidationErrors) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_tabular(in);
  };
  EXPECT_THROW(parse("#spec kind=block n=3 r=2\n0-1-0 1.5\n"), ParseError);
  EXPECT_THROW(parse("#spec kind=block n=3 r=2\n0-1-0 abc\n"), ParseError);
  EXPECT_THROW(parse("0-1-0 0.5\n"), ParseError);
  EXPECT_THROW(parse("#spec kind=block n=3 r=2\n0-1-2 0.5\n"), InvalidKey);
  EXPECT_THROW(parse("#spec kind=block n=3 r=2\n0-1-0 0.5\n0-1-0 0.6\n"), DuplicateKey);
  EXPECT_THROW(parse("#spec kind=blob n=3 r=2\n"), ParseError);
  try {
    parse("#spec kind=block n=3 r=2\n0-1-0 0.5\n1-1-1 -0.1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Tabular, SaveLoadRoundTrip) {
  const SyntheticLandscape land(kSpace, 8);
  const auto bench = tabulate(land, 6561);
  ASSERT_EQ(bench.size(), 6561u);
  std::stringstream buf;
  write_tabular(buf, bench);
  const auto back = read_tabular(buf);
  EXPECT_EQ(back.entries(), bench.entries());
  EXPECT_TRUE(back.spec() == kSpace);
}

TEST(BestInSpace, ConstantOracleTakesSmallestKey) {
  const ConstantOracle flat{kSpace, 0.5};
  const auto [arch, score] = best_in_space(flat, 6561);
  EXPECT_EQ(to_key(arch).text, "0-0-0-0-0-0-0-0");
  EXPECT_EQ(score, 0.5);
}

TEST(BestInSpace, ExhaustiveArgmax) {
  const SyntheticLandscape land(kSpace, 3);
  const auto [arch, score] = best_in_space(land, 6561);
  EXPECT_EQ(land.score(arch), score);
  for_each_architecture(kSpace, 6561, [&](const Architecture& a) { ASSERT_LE(land.score(a), score); });
  EXPECT_THROW(best_in_space(land, 100), SpaceTooLarge);
}

TEST(BestInSpace, TabularEntries) {
  std::istringstream in("#spec kind=block n=3 r=2\n0-0-0 0.1\n1-0-1 0.9\n0-1-1 0.5\n");
  const auto bench = read_tabular(in);
  const auto [arch, score] = best_in_space(bench, 8);
  EXPECT_EQ(to_key(arch).text, "1-0-1");
  EXPECT_EQ(score, 0.9);
}

}  // namespace
}  // namespace diffnas
