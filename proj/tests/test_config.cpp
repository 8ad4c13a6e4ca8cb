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

#include "diffnas/config.hpp"

#include <gtest/gtest.h>

namespace diffnas {
namespace {

TEST(Config, DefaultsBuild) {
  const auto cfg = build_config(default_config());
  EXPECT_TRUE(cfg.space == SearchSpaceSpec(SpaceKind::block, 8, 3));
  EXPECT_EQ(cfg.train.epochs, 200);
  EXPECT_EQ(cfg.train.batch_size, 64);
  EXPECT_EQ(cfg.train.hidden, (std::vector<int>{64, 64}));
  EXPECT_FALSE(cfg.search.neighbor_sample);
  EXPECT_EQ(cfg.hash.size(), 16u);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(merge_config(Json::parse(R"({"dataset": {"anchors": 3}})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"extra": 1})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"space": 3})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse(R"({"space": {"n": "eight"}})")), ConfigError);
  EXPECT_THROW(merge_config(Json::parse("[1]")), ConfigError);
}

TEST(Config, OverridesParseJsonOrString) {
  Json doc = default_config();
  apply_override(doc, "search.seed=9");
  apply_override(doc, "predictor.backend=ridge");
  apply_override(doc, "search.neighbor_sample=5");
  apply_override(doc, "sweep.ks=[1,2]");
  const auto cfg = build_config(doc);
  EXPECT_EQ(cfg.search.seed, 9u);
  EXPECT_EQ(cfg.backend, Backend::ridge);
  EXPECT_EQ(cfg.search.neighbor_sample, 5u);
  EXPECT_EQ(cfg.sweep.ks, (std::vector<int>{1, 2}));
  EXPECT_THROW(apply_override(doc, "search.sed=1"), ConfigError);
  EXPECT_THROW(apply_override(doc, "noequals"), ConfigError);
  EXPECT_THROW(apply_override(doc, "search..seed=1"), ConfigError);
}

TEST(Config, RangeErrors) {
  auto with = [](const std::string& o) {
    Json doc = default_config();
    apply_override(doc, o);
    return build_config(doc);
  };
  EXPECT_THROW(with("search.seed=-1"), ConfigError);
  EXPECT_THROW(with("search.population_size=0"), ConfigError);
  EXPECT_THROW(with("predictor.epochs=0"), ConfigError);
  EXPECT_THROW(with("predictor.mode=both"), ConfigError);
  EXPECT_THROW(with("space.r=1"), ConfigError);
  EXPECT_THROW(with("oracle.type=tabular"), ConfigError);
  EXPECT_THROW(with("compare.methods=[\"rl\"]"), ConfigError);
  EXPECT_THROW(with("dataset.k=1.5"), ConfigError);
}

TEST(Config, HashTracksContent) {
  Json a = default_config();
  Json b = merge_config(Json::parse(R"({"output_dir": "out"})"));
  EXPECT_EQ(config_hash(a), config_hash(b));
  apply_override(b, "oracle.sigma=0.03");
  EXPECT_NE(config_hash(a), config_hash(b));
}

}  // namespace
}  // namespace diffnas
