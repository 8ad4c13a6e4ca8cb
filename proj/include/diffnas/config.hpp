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

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "diffnas/doa_dataset.hpp"
#include "diffnas/errors.hpp"
#include "diffnas/predictor.hpp"
#include "diffnas/rng.hpp"
#include "diffnas/search.hpp"
#include "diffnas/search_space.hpp"

namespace diffnas {

using Json = nlohmann::json;

enum class OracleKind { synthetic, tabular };

struct OracleConfig {
  OracleKind kind = OracleKind::synthetic;
  std::uint64_t seed = 0;
  double pair_weight = 0.4;
  std::string tabular_path;
  double sigma = 0.02;
  std::uint64_t proxy_seed = 1;
  std::uint64_t optimum_limit = 1000000;  // largest space scanned for the optimum
};

struct CompareConfig {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> methods;
  std::size_t random_budget = 0;
  EvolutionConfig evolution;
  double epsilon = 0.001;
};

struct SweepSection {
  std::vector<int> ks;
  std::size_t num_anchors = 0;
  int samples_per_encoding = 4;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  SearchSpaceSpec space{SpaceKind::block, 8, 3};
  OracleConfig oracle;
  DoAGenerationConfig dataset;
  FeatureMode mode = FeatureMode::diff_plus_anchor;
  Backend backend = Backend::mlp;
  TrainConfig train;
  SearchConfig search;
  CompareConfig compare;
  SweepSection sweep;
  std::string output_dir;

  Json doc;          // merged document
  std::string hash;  // of the canonical dump of `doc`
};

// Every accepted key with its default value.
inline Json default_config() {
  return Json::parse(R"({
    "space": {"kind": "block", "n": 8, "r": 3, "op_names": []},
    "oracle": {"type": "synthetic", "seed": 0, "pair_weight": 0.4, "tabular_path": "",
               "sigma": 0.02, "proxy_seed": 1, "optimum_limit": 1000000},
    "dataset": {"num_anchors": 1000, "k": 1, "samples_per_encoding": 4, "seed": 0,
                "symmetrize": false},
    "predictor": {"mode": "diff_plus_anchor", "backend": "mlp", "epochs": 200,
                  "batch_size": 64, "learning_rate": 0.001, "l2": 0.0001,
                  "hidden": [64, 64], "seed": 0},
    "search": {"population_size": 32, "max_iterations": 100, "neighbor_sample": null,
               "convergence": "no_member_improved", "final_eval_budget": 0,
               "restarts": false, "seed": 0},
    "compare": {"seeds": [0, 1, 2, 3, 4], "methods": ["delta_nas", "random", "evolution"],
                "random_budget": 6561,
                "evolution": {"population_size": 32, "tournament_size": 10, "cycles": 6561},
                "epsilon": 0.001},
    "sweep": {"ks": [1, 2, 3], "num_anchors": 1000, "samples_per_encoding": 4,
              "train_fraction": 0.8, "seed": 0},
    "output_dir": "out"
  })");
}

namespace detail {

inline bool same_kind(const Json& a, const Json& b) {
  if (a.is_null() || b.is_null()) return true;
  if (a.is_number() && b.is_number()) return true;
  return a.type() == b.type();
}

inline void merge_into(Json& base, const Json& over, const std::string& path) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      if (!it->is_object()) throw ConfigError("config key '" + key + "' must be an object");
      merge_into(slot, *it, key);
      continue;
    }
    if (!same_kind(slot, *it))
      throw ConfigError("config key '" + key + "' expects " + std::string(slot.type_name()) +
                        ", got " + it->type_name());
    slot = *it;
  }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& section) {
  const Json& v = j.at(key);
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    const bool ok = std::is_unsigned_v<T> ? v.is_number_unsigned() : v.is_number_integer();
    if (!ok)
      throw ConfigError("config key '" + section + "." + key + "' must be " +
                        (std::is_unsigned_v<T> ? "a non-negative integer" : "an integer"));
  }
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    throw ConfigError("config key '" + section + "." + key + "' has the wrong type or range");
  }
}

}  // namespace detail

// Applies `over` on top of the defaults; unknown keys and type changes are
// rejected.
inline Json merge_config(const Json& over) {
  if (!over.is_object()) throw ConfigError("config document must be an object");
  Json doc = default_config();
  detail::merge_into(doc, over, "");
  return doc;
}

// "a.b.c=value"; the value is read as JSON when it parses, otherwise as a
// string.
inline void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json patch = value;
  std::size_t end = path.size();
  while (true) {
    const auto dot = path.rfind('.', end - 1);
    const std::string key =
        path.substr(dot == std::string::npos ? 0 : dot + 1, end - (dot == std::string::npos ? 0 : dot + 1));
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    patch = Json{{key, patch}};
    if (dot == std::string::npos) break;
    end = dot;
  }
  detail::merge_into(doc, patch, "");
}

inline std::string config_hash(const Json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

inline ExperimentConfig build_config(const Json& doc) {
  using detail::get;
  ExperimentConfig c;
  try {
    const Json& sp = doc.at("space");
    c.space = SearchSpaceSpec(parse_space_kind(get<std::string>(sp, "kind", "space")),
                              get<int>(sp, "n", "space"), get<int>(sp, "r", "space"),
                              get<std::vector<std::string>>(sp, "op_names", "space"));

    const Json& o = doc.at("oracle");
    const auto type = get<std::string>(o, "type", "oracle");
    if (type == "synthetic") c.oracle.kind = OracleKind::synthetic;
    else if (type == "tabular") c.oracle.kind = OracleKind::tabular;
    else throw ConfigError("oracle.type must be 'synthetic' or 'tabular'");
    c.oracle.seed = get<std::uint64_t>(o, "seed", "oracle");
    c.oracle.pair_weight = get<double>(o, "pair_weight", "oracle");
    c.oracle.tabular_path = get<std::string>(o, "tabular_path", "oracle");
    c.oracle.sigma = get<double>(o, "sigma", "oracle");
    c.oracle.proxy_seed = get<std::uint64_t>(o, "proxy_seed", "oracle");
    c.oracle.optimum_limit = get<std::uint64_t>(o, "optimum_limit", "oracle");
    if (c.oracle.kind == OracleKind::tabular && c.oracle.tabular_path.empty())
      throw ConfigError("oracle.tabular_path is required for a tabular oracle");

    const Json& d = doc.at("dataset");
    c.dataset.num_anchors = get<std::size_t>(d, "num_anchors", "dataset");
    c.dataset.k = get<int>(d, "k", "dataset");
    c.dataset.samples_per_encoding = get<int>(d, "samples_per_encoding", "dataset");
    c.dataset.seed = get<std::uint64_t>(d, "seed", "dataset");
    c.dataset.symmetrize = get<bool>(d, "symmetrize", "dataset");

    const Json& p = doc.at("predictor");
    c.mode = parse_feature_mode(get<std::string>(p, "mode", "predictor"));
    c.backend = parse_backend(get<std::string>(p, "backend", "predictor"));
    c.train.epochs = get<int>(p, "epochs", "predictor");
    c.train.batch_size = get<int>(p, "batch_size", "predictor");
    c.train.learning_rate = get<double>(p, "learning_rate", "predictor");
    c.train.l2 = get<double>(p, "l2", "predictor");
    c.train.hidden = get<std::vector<int>>(p, "hidden", "predictor");
    c.train.seed = get<std::uint64_t>(p, "seed", "predictor");
    c.train.check();

    const Json& s = doc.at("search");
    c.search.population_size = get<std::size_t>(s, "population_size", "search");
    c.search.max_iterations = get<int>(s, "max_iterations", "search");
    if (!s.at("neighbor_sample").is_null())
      c.search.neighbor_sample = get<std::size_t>(s, "neighbor_sample", "search");
    const auto conv = get<std::string>(s, "convergence", "search");
    if (conv == "no_member_improved") c.search.convergence = Convergence::no_member_improved;
    else if (conv == "iteration_cap") c.search.convergence = Convergence::iteration_cap;
    else throw ConfigError("search.convergence must be 'no_member_improved' or 'iteration_cap'");
    c.search.final_eval_budget = get<std::size_t>(s, "final_eval_budget", "search");
    c.search.restarts = get<bool>(s, "restarts", "search");
    c.search.seed = get<std::uint64_t>(s, "seed", "search");
    c.search.check();

    const Json& cmp = doc.at("compare");
    c.compare.seeds = get<std::vector<std::uint64_t>>(cmp, "seeds", "compare");
    c.compare.methods = get<std::vector<std::string>>(cmp, "methods", "compare");
    for (const auto& m : c.compare.methods)
      if (m != "delta_nas" && m != "random" && m != "evolution")
        throw ConfigError("compare.methods: unknown method '" + m + "'");
    c.compare.random_budget = get<std::size_t>(cmp, "random_budget", "compare");
    const Json& ev = cmp.at("evolution");
    c.compare.evolution.population_size = get<std::size_t>(ev, "population_size", "compare.evolution");
    c.compare.evolution.tournament_size = get<std::size_t>(ev, "tournament_size", "compare.evolution");
    c.compare.evolution.cycles = get<std::size_t>(ev, "cycles", "compare.evolution");
    c.compare.epsilon = get<double>(cmp, "epsilon", "compare");

    const Json& sw = doc.at("sweep");
    c.sweep.ks = get<std::vector<int>>(sw, "ks", "sweep");
    c.sweep.num_anchors = get<std::size_t>(sw, "num_anchors", "sweep");
    c.sweep.samples_per_encoding = get<int>(sw, "samples_per_encoding", "sweep");
    c.sweep.train_fraction = get<double>(sw, "train_fraction", "sweep");
    c.sweep.seed = get<std::uint64_t>(sw, "seed", "sweep");

    c.output_dir = doc.at("output_dir").get<std::string>();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  c.doc = doc;
  c.hash = config_hash(doc);
  return c;
}

// Reads a config file (empty path: defaults only) and applies overrides.
inline ExperimentConfig load_config(const std::string& path,
                                    const std::vector<std::string>& overrides = {}) {
  Json user = Json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    user = Json::parse(in, nullptr, false);
    if (user.is_discarded()) throw ConfigError(path + " is not valid JSON");
  }
  Json doc = merge_config(user);
  for (const auto& o : overrides) apply_override(doc, o);
  return build_config(doc);
}

}  // namespace diffnas
