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

// Fitness sources. Anything with `double score(const Architecture&) const`
// and `const SearchSpaceSpec& spec() const` is an oracle.

#include <atomic>
#include <charconv>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "diffnas/errors.hpp"
#include "diffnas/rng.hpp"
#include "diffnas/search_space.hpp"

namespace diffnas {

template <typename O>
concept Oracle = requires(const O& o, const Architecture& a) {
  { o.score(a) } -> std::convertible_to<double>;
  { o.spec() } -> std::convertible_to<const SearchSpaceSpec&>;
};

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
}

// Unary + pairwise random landscape with a known structure.
//
//   score(a) = (1 - w) * U(a) + w * P(a)
//   U(a) = mean over edit positions p of  u(p, value_p)
//   P(a) = mean over node pairs i < j of  q(i, j, ops_i, ops_j)
//
// Every u and q is a uniform [0, 1) number drawn from SplitMix64:
//   u(p, v)          = unit(derive_seed(seed, 1, p, v))
//   q(i, j, vi, vj)  = unit(derive_seed(seed, 2, i, j, vi, vj))
// where derive_seed folds each key into the state with the SplitMix64
// finalizer and unit() keeps the top 53 bits. Only integer arithmetic is
// involved, so the tables are identical on every platform. Adjacency bits
// of cell spaces contribute unary terms only.
class SyntheticLandscape {
 public:
  SyntheticLandscape(SearchSpaceSpec spec, std::uint64_t seed, double pair_weight = 0.4)
      : spec_(std::move(spec)), seed_(seed), pair_weight_(pair_weight) {
    if (!(pair_weight >= 0.0 && pair_weight <= 1.0))
      throw InvalidArgument("pair_weight must lie in [0, 1]");
    const int n = spec_.nodes();
    const int r = spec_.num_ops();
    unary_.resize(spec_.positions());
    for (int p = 0; p < spec_.positions(); ++p) {
      const int values = spec_.is_adj_position(p) ? 2 : r;
      for (int v = 0; v < values; ++v) unary_[p].push_back(unary_term(p, v));
    }
    pair_.assign(static_cast<std::size_t>(n) * n * r * r, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int vi = 0; vi < r; ++vi)
          for (int vj = 0; vj < r; ++vj) pair_[pair_index(i, j, vi, vj)] = pair_term(i, j, vi, vj);
  }

  const SearchSpaceSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  double pair_weight() const { return pair_weight_; }

  double unary_term(int pos, int value) const {
    return bits_to_unit(derive_seed(seed_, 1, pos, value));
  }
  double pair_term(int i, int j, int vi, int vj) const {
    return bits_to_unit(derive_seed(seed_, 2, i, j, vi, vj));
  }

  double score(const Architecture& a) const {
    validate(spec_, a);
    double unary = 0.0;
    for (int p = 0; p < spec_.positions(); ++p) unary += unary_[p][a.value(p)];
    unary /= spec_.positions();
    const int n = spec_.nodes();
    double pairs = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) pairs += pair_[pair_index(i, j, a.ops[i], a.ops[j])];
    pairs /= n * (n - 1) / 2;
    return (1.0 - pair_weight_) * unary + pair_weight_ * pairs;
  }

 private:
  std::size_t pair_index(int i, int j, int vi, int vj) const {
    const std::size_t n = spec_.nodes(), r = spec_.num_ops();
    return ((static_cast<std::size_t>(i) * n + j) * r + vi) * r + vj;
  }

  SearchSpaceSpec spec_;
  std::uint64_t seed_;
  double pair_weight_;
  std::vector<std::vector<double>> unary_;
  std::vector<double> pair_;
};

// Ground truth plus Gaussian noise. The draw for a query is keyed by
// (seed, ArchKey, call_index), so the caller controls repetition explicitly
// and no hidden counter exists.
template <Oracle Base>
class NoisyProxy {
 public:
  NoisyProxy(const Base& base, double sigma, std::uint64_t seed)
      : base_(&base), sigma_(sigma), seed_(seed) {
    if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be non-negative");
  }

  const SearchSpaceSpec& spec() const { return base_->spec(); }
  const Base& base() const { return *base_; }
  double sigma() const { return sigma_; }

  double noise(const Architecture& a, std::uint64_t call_index) const {
    if (sigma_ == 0.0) return 0.0;
    Rng rng(derive_seed(seed_, fnv1a64(to_key(a).text), call_index));
    return sigma_ * rng.normal();
  }

  double proxy_score(const Architecture& a, std::uint64_t call_index) const {
    return base_->score(a) + noise(a, call_index);
  }

 private:
  const Base* base_;
  double sigma_;
  std::uint64_t seed_;
};

// Counts every query to the wrapped oracle.
template <Oracle Base>
class CountingOracle {
 public:
  explicit CountingOracle(const Base& base) : base_(&base) {}

  const SearchSpaceSpec& spec() const { return base_->spec(); }
  double score(const Architecture& a) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return base_->score(a);
  }
  std::uint64_t calls() const { return calls_.load(); }

 private:
  const Base* base_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Tabular benchmark files
//
//   #spec kind=<block|cell> n=<int> r=<int>
//   <ArchKey> <accuracy>
//
// Other lines starting with '#' are comments and are kept as metadata.

class TabularBenchmark {
 public:
  explicit TabularBenchmark(SearchSpaceSpec spec) : spec_(std::move(spec)) {}

  const SearchSpaceSpec& spec() const { return spec_; }
  const std::map<Architecture, double>& entries() const { return entries_; }
  std::vector<std::string>& metadata() { return metadata_; }
  const std::vector<std::string>& metadata() const { return metadata_; }
  std::size_t size() const { return entries_.size(); }

  void add(const Architecture& a, double accuracy) {
    validate(spec_, a);
    if (!(accuracy >= 0.0 && accuracy <= 1.0))
      throw InvalidArgument("accuracy " + format_double(accuracy) + " outside [0, 1]");
    if (!entries_.emplace(a, accuracy).second) throw DuplicateKey(to_key(a).text);
  }

  double score(const Architecture& a) const {
    auto it = entries_.find(a);
    if (it == entries_.end()) throw InvalidKey(to_key(a).text + " is not in the benchmark");
    return it->second;
  }

 private:
  SearchSpaceSpec spec_;
  std::map<Architecture, double> entries_;
  std::vector<std::string> metadata_;
};

inline SearchSpaceSpec parse_spec_header(std::string_view line, std::size_t line_no) {
  std::istringstream in{std::string(line)};
  std::string tag;
  in >> tag;
  std::string kind;
  int n = -1, r = -1;
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    try {
      if (key == "kind") {
        kind = value;
      } else if (key == "n") {
        n = std::stoi(value);
      } else if (key == "r") {
        r = std::stoi(value);
      } else {
        throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  try {
    return SearchSpaceSpec(parse_space_kind(kind), n, r);
  } catch (const InvalidSpec& e) {
    throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

inline TabularBenchmark read_tabular(std::istream& in) {
  std::optional<TabularBenchmark> bench;
  std::vector<std::string> pending_metadata;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#spec", 0) == 0) {
      if (bench) throw ParseError("line " + std::to_string(line_no) + ": repeated #spec header");
      bench.emplace(parse_spec_header(line, line_no));
      bench->metadata() = std::move(pending_metadata);
      continue;
    }
    if (line.front() == '#') {
      (bench ? bench->metadata() : pending_metadata).push_back(line.substr(1));
      continue;
    }
    if (!bench) throw ParseError("line " + std::to_string(line_no) + ": entry before #spec header");
    std::istringstream fields(line);
    std::string key, acc_text, extra;
    if (!(fields >> key >> acc_text) || (fields >> extra))
      throw ParseError("line " + std::to_string(line_no) + ": expected '<ArchKey> <accuracy>'");
    double acc = 0.0;
    if (!parse_double(acc_text, acc))
      throw ParseError("line " + std::to_string(line_no) + ": bad accuracy '" + acc_text + "'");
    if (!(acc >= 0.0 && acc <= 1.0))
      throw ParseError("line " + std::to_string(line_no) + ": accuracy " + acc_text +
                       " outside [0, 1]");
    Architecture a;
    try {
      a = parse_key(bench->spec(), key);
    } catch (const InvalidKey& e) {
      throw InvalidKey("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (bench->entries().count(a))
      throw DuplicateKey("line " + std::to_string(line_no) + ": " + key);
    bench->add(a, acc);
  }
  if (!bench) throw ParseError("missing #spec header");
  return std::move(*bench);
}

inline TabularBenchmark load_tabular(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_tabular(in);
}

inline void write_tabular(std::ostream& out, const TabularBenchmark& bench) {
  const auto& spec = bench.spec();
  out << "#spec kind=" << to_string(spec.kind()) << " n=" << spec.nodes()
      << " r=" << spec.num_ops() << '\n';
  for (const auto& m : bench.metadata()) out << '#' << m << '\n';
  for (const auto& [arch, acc] : bench.entries())
    out << to_key(arch).text << ' ' << format_double(acc) << '\n';
}

inline void save_tabular(const std::string& path, const TabularBenchmark& bench) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_tabular(out, bench);
}

// Exhaustive table of any oracle over an enumerable space.
template <Oracle O>
TabularBenchmark tabulate(const O& oracle, std::uint64_t limit) {
  TabularBenchmark bench(oracle.spec());
  for_each_architecture(oracle.spec(), limit,
                        [&](const Architecture& a) { bench.add(a, oracle.score(a)); });
  return bench;
}

// Exhaustive argmax; ties go to the smallest ArchKey. Oracles that expose
// their entries are scanned over those entries instead of the full space.
template <Oracle O>
std::pair<Architecture, double> best_in_space(const O& oracle, std::uint64_t limit) {
  std::optional<std::pair<Architecture, double>> best;
  auto consider = [&](const Architecture& a, double s) {
    if (!best || s > best->second) best.emplace(a, s);
  };
  if constexpr (requires { oracle.entries(); }) {
    for (const auto& [a, s] : oracle.entries()) consider(a, s);
    if (!best) throw EmptyDataset("benchmark has no entries");
  } else {
    for_each_architecture(oracle.spec(), limit,
                          [&](const Architecture& a) { consider(a, oracle.score(a)); });
  }
  return *best;
}

}  // namespace diffnas
