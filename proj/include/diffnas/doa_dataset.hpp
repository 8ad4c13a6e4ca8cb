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

// Difference-of-architecture datasets: sample anchors, pair each with a
// uniform k-edit neighbor, and record repeated proxy measurements of the
// accuracy delta. Many pairs share one DiffEncoding, so measurements can be
// averaged per encoding.

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "diffnas/encoding.hpp"
#include "diffnas/errors.hpp"
#include "diffnas/oracle.hpp"
#include "diffnas/rng.hpp"
#include "diffnas/search_space.hpp"

namespace diffnas {

enum class FeatureMode { diff_only, diff_plus_anchor };

inline std::string_view to_string(FeatureMode m) {
  return m == FeatureMode::diff_only ? "diff_only" : "diff_plus_anchor";
}

inline FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "diff_only") return FeatureMode::diff_only;
  if (s == "diff_plus_anchor") return FeatureMode::diff_plus_anchor;
  throw InvalidArgument("unknown feature mode '" + std::string(s) + "'");
}

template <typename P>
concept Proxy = requires(const P& p, const Architecture& a, std::uint64_t call) {
  { p.proxy_score(a, call) } -> std::convertible_to<double>;
  { p.spec() } -> std::convertible_to<const SearchSpaceSpec&>;
};

struct DoASample {
  Architecture anchor;
  DiffEncoding diff;
  FeatureVector feature;  // diff_to_feature(diff)
  double delta_acc = 0.0;  // proxy(anchor + diff) - proxy(anchor)
};

struct DoADataset {
  SearchSpaceSpec spec;
  int k = 1;
  int samples_per_encoding = 1;
  std::uint64_t seed = 0;
  std::vector<DoASample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

struct DoAGenerationConfig {
  std::size_t num_anchors = 100;
  int k = 1;
  int samples_per_encoding = 4;
  std::uint64_t seed = 0;
  // Also record the reversed pair with the negated delta.
  bool symmetrize = false;
};

inline DoASample make_sample(const SearchSpaceSpec& spec, Architecture anchor,
                             DiffEncoding d, double delta) {
  FeatureVector f = diff_to_feature(d, spec);
  return {std::move(anchor), std::move(d), std::move(f), delta};
}

// Anchor i draws from a stream keyed by (seed, i), and its j-th repeat
// queries the proxy with call index i * samples_per_encoding + j, so the
// output does not depend on how anchors are scheduled.
template <Proxy P>
DoADataset generate_doa_dataset(const P& proxy, const DoAGenerationConfig& cfg) {
  const auto& spec = proxy.spec();
  check_k(spec, cfg.k);
  if (cfg.samples_per_encoding < 1) throw InvalidArgument("samples_per_encoding must be >= 1");
  DoADataset ds{spec, cfg.k, cfg.samples_per_encoding, cfg.seed, {}};
  const std::size_t per_anchor = cfg.samples_per_encoding * (cfg.symmetrize ? 2 : 1);
  ds.samples.reserve(cfg.num_anchors * per_anchor);
  for (std::size_t i = 0; i < cfg.num_anchors; ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    const Architecture anchor = random_architecture(spec, rng);
    const Architecture neighbor = random_neighbor(spec, anchor, cfg.k, rng);
    const DiffEncoding forward = diff(anchor, neighbor);
    const DiffEncoding backward = diff(neighbor, anchor);
    for (int j = 0; j < cfg.samples_per_encoding; ++j) {
      const std::uint64_t call = i * cfg.samples_per_encoding + j;
      const double delta = proxy.proxy_score(neighbor, call) - proxy.proxy_score(anchor, call);
      ds.samples.push_back(make_sample(spec, anchor, forward, delta));
      if (cfg.symmetrize) ds.samples.push_back(make_sample(spec, neighbor, backward, -delta));
    }
  }
  return ds;
}

// One sample per group, delta replaced by the group mean. Groups are keyed
// by the DiffEncoding in diff_only mode and by (anchor, DiffEncoding)
// otherwise. Output follows the order of first appearance.
inline DoADataset aggregate_by_encoding(const DoADataset& ds,
                                        FeatureMode mode = FeatureMode::diff_only) {
  using Key = std::pair<Architecture, DiffEncoding>;
  std::map<Key, std::size_t> group_of;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  DoADataset out{ds.spec, ds.k, ds.samples_per_encoding, ds.seed, {}};
  for (const auto& s : ds.samples) {
    Key key{mode == FeatureMode::diff_only ? Architecture{} : s.anchor, s.diff};
    auto [it, inserted] = group_of.emplace(std::move(key), out.samples.size());
    if (inserted) {
      out.samples.push_back(s);
      sums.push_back(0.0);
      counts.push_back(0);
    }
    sums[it->second] += s.delta_acc;
    ++counts[it->second];
  }
  for (std::size_t g = 0; g < out.samples.size(); ++g)
    out.samples[g].delta_acc = sums[g] / static_cast<double>(counts[g]);
  return out;
}

// Partition by DiffEncoding group so that no encoding appears on both
// sides. floor(train_fraction * groups) groups go to the training side.
inline std::pair<DoADataset, DoADataset> split(const DoADataset& ds, double train_fraction,
                                               std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  std::map<DiffEncoding, std::size_t> groups;
  for (const auto& s : ds.samples) groups.emplace(s.diff, 0);
  std::vector<const DiffEncoding*> order;
  for (auto& [d, _] : groups) order.push_back(&d);
  Rng rng(seed);
  rng.shuffle(order);
  const auto train_groups =
      static_cast<std::size_t>(train_fraction * static_cast<double>(order.size()));
  if (train_groups == 0 || train_groups == order.size())
    throw InsufficientGroups(std::to_string(order.size()) + " groups cannot be split at " +
                             format_double(train_fraction));
  for (std::size_t g = 0; g < order.size(); ++g) groups[*order[g]] = g < train_groups ? 0 : 1;
  DoADataset train{ds.spec, ds.k, ds.samples_per_encoding, ds.seed, {}};
  DoADataset test = train;
  for (const auto& s : ds.samples) (groups[s.diff] == 0 ? train : test).samples.push_back(s);
  return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Dataset files
//
//   #doa kind=<block|cell> n=<int> r=<int> k=<int> samples_per_encoding=<int> seed=<int>
//   <anchor ArchKey> <DiffEncoding text> <delta_acc>

inline void write_doa_dataset(std::ostream& out, const DoADataset& ds,
                              const std::vector<std::string>& comments = {}) {
  out << "#doa kind=" << to_string(ds.spec.kind()) << " n=" << ds.spec.nodes()
      << " r=" << ds.spec.num_ops() << " k=" << ds.k
      << " samples_per_encoding=" << ds.samples_per_encoding << " seed=" << ds.seed << '\n';
  for (const auto& c : comments) out << '#' << c << '\n';
  for (const auto& s : ds.samples)
    out << to_key(s.anchor).text << ' ' << to_text(s.diff) << ' ' << format_double(s.delta_acc)
        << '\n';
}

inline DoADataset read_doa_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<DoADataset> ds;
  auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#doa", 0) == 0) {
      if (ds) throw ParseError(where() + "repeated #doa header");
      std::istringstream fields(line.substr(4));
      std::map<std::string, std::string> kv;
      std::string f;
      while (fields >> f) {
        const auto eq = f.find('=');
        if (eq == std::string::npos) throw ParseError(where() + "expected key=value");
        kv[f.substr(0, eq)] = f.substr(eq + 1);
      }
      try {
        SearchSpaceSpec spec(parse_space_kind(kv.at("kind")), std::stoi(kv.at("n")),
                             std::stoi(kv.at("r")));
        ds.emplace(DoADataset{spec, std::stoi(kv.at("k")),
                              std::stoi(kv.at("samples_per_encoding")),
                              std::stoull(kv.at("seed")),
                              {}});
      } catch (const std::logic_error&) {
        throw ParseError(where() + "incomplete or malformed #doa header");
      } catch (const InvalidSpec& e) {
        throw ParseError(where() + e.what());
      }
      check_k(ds->spec, ds->k);
      continue;
    }
    if (line.front() == '#') continue;
    if (!ds) throw ParseError(where() + "sample before #doa header");
    std::istringstream fields(line);
    std::string key, diff_text, delta_text, extra;
    if (!(fields >> key >> diff_text >> delta_text) || (fields >> extra))
      throw ParseError(where() + "expected '<ArchKey> <diff> <delta>'");
    double delta = 0.0;
    if (!parse_double(delta_text, delta)) throw ParseError(where() + "bad delta '" + delta_text + "'");
    Architecture anchor;
    DiffEncoding d;
    try {
      anchor = parse_key(ds->spec, key);
      d = parse_diff(diff_text);
      validate(ds->spec, apply_diff(anchor, d));
    } catch (const Error& e) {
      throw ParseError(where() + e.what());
    }
    if (static_cast<int>(d.size()) != ds->k)
      throw ParseError(where() + "diff has " + std::to_string(d.size()) + " edits, expected k=" +
                       std::to_string(ds->k));
    ds->samples.push_back(make_sample(ds->spec, std::move(anchor), std::move(d), delta));
  }
  if (!ds) throw ParseError("missing #doa header");
  return std::move(*ds);
}

inline void save_doa_dataset(const std::string& path, const DoADataset& ds,
                             const std::vector<std::string>& comments = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_doa_dataset(out, ds, comments);
}

inline DoADataset load_doa_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_doa_dataset(in);
}

}  // namespace diffnas
