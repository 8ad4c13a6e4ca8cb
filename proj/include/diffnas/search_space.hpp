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

// Block- and cell-based search spaces, architectures and their canonical
// keys, exhaustive enumeration, and edit-distance neighborhoods.
//
// An architecture is addressed through "edit positions": positions
// [0, n) are the per-node operation choices, positions [n, n + n(n-1)/2)
// are the bits of the strict upper triangle of the adjacency matrix
// (row-major), present only for cell spaces. One edit changes the value at
// one position.

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "diffnas/errors.hpp"
#include "diffnas/rng.hpp"

namespace diffnas {

using BigInt = boost::multiprecision::cpp_int;

enum class SpaceKind { block, cell };

inline std::string_view to_string(SpaceKind kind) {
  return kind == SpaceKind::block ? "block" : "cell";
}

inline SpaceKind parse_space_kind(std::string_view s) {
  if (s == "block") return SpaceKind::block;
  if (s == "cell") return SpaceKind::cell;
  throw InvalidSpec("unknown space kind '" + std::string(s) + "'");
}

class SearchSpaceSpec {
 public:
  SearchSpaceSpec(SpaceKind kind, int n, int r,
                  std::vector<std::string> op_names = {})
      : kind_(kind), n_(n), r_(r), op_names_(std::move(op_names)) {
    if (n < 2) throw InvalidSpec("node count must be >= 2, got " + std::to_string(n));
    if (r < 2) throw InvalidSpec("operation count must be >= 2, got " + std::to_string(r));
    if (op_names_.empty()) {
      for (int i = 0; i < r; ++i) op_names_.push_back("op" + std::to_string(i));
    }
    if (static_cast<int>(op_names_.size()) != r)
      throw InvalidSpec("expected " + std::to_string(r) + " operation names");
    std::set<std::string> unique(op_names_.begin(), op_names_.end());
    if (unique.size() != op_names_.size())
      throw InvalidSpec("operation names must be distinct");
  }

  SpaceKind kind() const { return kind_; }
  int nodes() const { return n_; }
  int num_ops() const { return r_; }
  const std::vector<std::string>& op_names() const { return op_names_; }

  int adj_size() const { return kind_ == SpaceKind::cell ? n_ * (n_ - 1) / 2 : 0; }
  int positions() const { return n_ + adj_size(); }
  bool is_adj_position(int pos) const { return pos >= n_; }
  // Number of values an edit at `pos` can move to.
  int alternatives(int pos) const { return is_adj_position(pos) ? 1 : r_ - 1; }
  int max_k() const { return positions(); }

  bool operator==(const SearchSpaceSpec& o) const {
    return kind_ == o.kind_ && n_ == o.n_ && r_ == o.r_;
  }

 private:
  SpaceKind kind_;
  int n_;
  int r_;
  std::vector<std::string> op_names_;
};

// Plain value type; the spec it belongs to is carried by the caller.
// Ordering is lexicographic on (ops, adj), which is the ArchKey order.
struct Architecture {
  std::vector<int> ops;
  std::vector<std::uint8_t> adj;

  int value(int pos) const {
    const auto n = static_cast<int>(ops.size());
    return pos < n ? ops[pos] : adj[pos - n];
  }
  void set(int pos, int v) {
    const auto n = static_cast<int>(ops.size());
    if (pos < n) {
      ops[pos] = v;
    } else {
      adj[pos - n] = static_cast<std::uint8_t>(v);
    }
  }

  auto operator<=>(const Architecture&) const = default;
  bool operator==(const Architecture&) const = default;
};

inline void validate(const SearchSpaceSpec& spec, const Architecture& a) {
  if (static_cast<int>(a.ops.size()) != spec.nodes())
    throw SpecMismatch("architecture has " + std::to_string(a.ops.size()) +
                       " ops, space has " + std::to_string(spec.nodes()) + " nodes");
  if (static_cast<int>(a.adj.size()) != spec.adj_size())
    throw SpecMismatch("adjacency length " + std::to_string(a.adj.size()) +
                       " does not match space (" + std::to_string(spec.adj_size()) + ")");
  for (int op : a.ops)
    if (op < 0 || op >= spec.num_ops())
      throw SpecMismatch("operation index " + std::to_string(op) + " out of range");
  for (auto bit : a.adj)
    if (bit > 1) throw SpecMismatch("adjacency entry is not a bit");
}

// Canonical text identity: op indices joined by '-', then for cell spaces
// ':' and the adjacency bits as '0'/'1'.
struct ArchKey {
  std::string text;

  auto operator<=>(const ArchKey&) const = default;
};

inline ArchKey to_key(const Architecture& a) {
  std::string s;
  for (std::size_t i = 0; i < a.ops.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(a.ops[i]);
  }
  if (!a.adj.empty()) {
    s += ':';
    for (auto bit : a.adj) s += bit ? '1' : '0';
  }
  return {std::move(s)};
}

inline Architecture parse_key(const SearchSpaceSpec& spec, std::string_view text) {
  auto fail = [&](const std::string& why) {
    return InvalidKey("'" + std::string(text) + "': " + why);
  };
  Architecture a;
  std::string_view ops_part = text;
  std::string_view adj_part;
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    if (spec.kind() != SpaceKind::cell) throw fail("adjacency given for a block space");
    ops_part = text.substr(0, colon);
    adj_part = text.substr(colon + 1);
  } else if (spec.kind() == SpaceKind::cell) {
    throw fail("missing adjacency for a cell space");
  }
  std::size_t start = 0;
  while (start <= ops_part.size()) {
    auto end = ops_part.find('-', start);
    if (end == std::string_view::npos) end = ops_part.size();
    const auto tok = ops_part.substr(start, end - start);
    int v = -1;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
      throw fail("bad operation index '" + std::string(tok) + "'");
    if (v < 0 || v >= spec.num_ops()) throw fail("operation index out of range");
    a.ops.push_back(v);
    start = end + 1;
  }
  if (static_cast<int>(a.ops.size()) != spec.nodes()) throw fail("wrong number of ops");
  for (char c : adj_part) {
    if (c != '0' && c != '1') throw fail("adjacency must be 0/1");
    a.adj.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (static_cast<int>(a.adj.size()) != spec.adj_size()) throw fail("wrong adjacency length");
  return a;
}

// ---------------------------------------------------------------------------
// Cardinalities

inline BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt c = 1;
  for (int i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

inline BigInt ipow(BigInt base, int e) {
  BigInt out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// Published cardinality: r^n for block spaces, (n(n-1)/2) r^n for cell
// spaces. The cell formula does not count distinct adjacency assignments;
// see space_size_exact.
inline BigInt space_size_paper(const SearchSpaceSpec& spec) {
  BigInt ops = ipow(spec.num_ops(), spec.nodes());
  if (spec.kind() == SpaceKind::block) return ops;
  return BigInt(spec.adj_size()) * ops;
}

// Number of distinct Architecture values.
inline BigInt space_size_exact(const SearchSpaceSpec& spec) {
  return ipow(2, spec.adj_size()) * ipow(spec.num_ops(), spec.nodes());
}

// Coefficient of x^k in prod_pos (1 + w(pos) x).
inline BigInt elementary_symmetric(const std::vector<BigInt>& weights, int k) {
  std::vector<BigInt> coef(k + 1, 0);
  coef[0] = 1;
  for (const auto& w : weights)
    for (int j = k; j >= 1; --j) coef[j] += coef[j - 1] * w;
  return coef[k];
}

inline void check_k(const SearchSpaceSpec& spec, int k) {
  if (k < 1 || k > spec.max_k())
    throw InvalidK("k=" + std::to_string(k) + " outside [1, " +
                   std::to_string(spec.max_k()) + "]");
}

// Number of architectures at edit distance exactly k from any architecture.
inline BigInt neighbor_count(const SearchSpaceSpec& spec, int k) {
  check_k(spec, k);
  std::vector<BigInt> w;
  for (int p = 0; p < spec.positions(); ++p) w.emplace_back(spec.alternatives(p));
  return elementary_symmetric(w, k);
}

// ---------------------------------------------------------------------------
// Enumeration

// Visits every architecture in ArchKey order. Throws SpaceTooLarge when the
// space has more than `limit` members.
inline void for_each_architecture(const SearchSpaceSpec& spec, std::uint64_t limit,
                                  const std::function<void(const Architecture&)>& visit) {
  const BigInt size = space_size_exact(spec);
  if (size > limit)
    throw SpaceTooLarge("space has " + size.str() + " architectures, limit is " +
                        std::to_string(limit));
  Architecture a{std::vector<int>(spec.nodes(), 0),
                 std::vector<std::uint8_t>(spec.adj_size(), 0)};
  const int positions = spec.positions();
  for (;;) {
    visit(a);
    int pos = positions - 1;
    for (; pos >= 0; --pos) {
      const int max_value = spec.is_adj_position(pos) ? 1 : spec.num_ops() - 1;
      if (a.value(pos) < max_value) {
        a.set(pos, a.value(pos) + 1);
        break;
      }
      a.set(pos, 0);
    }
    if (pos < 0) return;
  }
}

inline std::vector<Architecture> enumerate_space(const SearchSpaceSpec& spec,
                                                 std::uint64_t limit) {
  std::vector<Architecture> out;
  for_each_architecture(spec, limit, [&](const Architecture& a) { out.push_back(a); });
  return out;
}

inline Architecture random_architecture(const SearchSpaceSpec& spec, Rng& rng) {
  Architecture a;
  a.ops.resize(spec.nodes());
  for (auto& op : a.ops) op = static_cast<int>(rng.below(spec.num_ops()));
  a.adj.resize(spec.adj_size());
  for (auto& bit : a.adj) bit = static_cast<std::uint8_t>(rng.below(2));
  return a;
}

inline Architecture random_architecture(const SearchSpaceSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return random_architecture(spec, rng);
}

// ---------------------------------------------------------------------------
// Edit distance and neighborhoods

inline int edit_distance(const Architecture& a, const Architecture& b) {
  if (a.ops.size() != b.ops.size() || a.adj.size() != b.adj.size())
    throw SpecMismatch("architectures come from different spaces");
  int d = 0;
  for (std::size_t i = 0; i < a.ops.size(); ++i) d += a.ops[i] != b.ops[i];
  for (std::size_t i = 0; i < a.adj.size(); ++i) d += a.adj[i] != b.adj[i];
  return d;
}

// The alternative values for `pos`, ascending, excluding `current`.
inline std::vector<int> alternative_values(const SearchSpaceSpec& spec, int pos, int current) {
  std::vector<int> out;
  const int count = spec.is_adj_position(pos) ? 2 : spec.num_ops();
  for (int v = 0; v < count; ++v)
    if (v != current) out.push_back(v);
  return out;
}

// Every architecture at edit distance exactly k, each once. Order: position
// subsets in lexicographic order, then replacement values ascending with the
// last chosen position varying fastest.
inline std::vector<Architecture> neighbors_k(const SearchSpaceSpec& spec,
                                             const Architecture& arch, int k) {
  validate(spec, arch);
  check_k(spec, k);
  std::vector<Architecture> out;
  const int positions = spec.positions();
  std::vector<int> subset(k);
  for (int i = 0; i < k; ++i) subset[i] = i;
  for (;;) {
    std::vector<std::vector<int>> choices(k);
    for (int i = 0; i < k; ++i)
      choices[i] = alternative_values(spec, subset[i], arch.value(subset[i]));
    std::vector<std::size_t> digit(k, 0);
    for (;;) {
      Architecture nb = arch;
      for (int i = 0; i < k; ++i) nb.set(subset[i], choices[i][digit[i]]);
      out.push_back(std::move(nb));
      int i = k - 1;
      for (; i >= 0; --i) {
        if (++digit[i] < choices[i].size()) break;
        digit[i] = 0;
      }
      if (i < 0) break;
    }
    int i = k - 1;
    while (i >= 0 && subset[i] == positions - k + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

// Uniform draw from the architectures at edit distance exactly k.
//
// Position subsets are weighted by the number of neighbors they generate,
// so the draw is uniform over neighbors, not over subsets. Uses
// completions[p][j] = number of ways to place j edits in positions >= p.
inline Architecture random_neighbor(const SearchSpaceSpec& spec, const Architecture& arch,
                                    int k, Rng& rng) {
  check_k(spec, k);
  const int positions = spec.positions();
  std::vector<std::vector<std::uint64_t>> completions(
      positions + 1, std::vector<std::uint64_t>(k + 1, 0));
  completions[positions][0] = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (int p = positions - 1; p >= 0; --p) {
    const std::uint64_t alt = static_cast<std::uint64_t>(spec.alternatives(p));
    completions[p][0] = 1;
    for (int j = 1; j <= k; ++j) {
      const std::uint64_t skip = completions[p + 1][j];
      const std::uint64_t take_rest = completions[p + 1][j - 1];
      if (take_rest != 0 && alt > kMax / take_rest)
        throw InvalidK("neighbor count overflows 64 bits");
      const std::uint64_t take = alt * take_rest;
      if (skip > kMax - take) throw InvalidK("neighbor count overflows 64 bits");
      completions[p][j] = skip + take;
    }
  }
  Architecture nb = arch;
  int remaining = k;
  for (int p = 0; p < positions && remaining > 0; ++p) {
    const std::uint64_t take =
        static_cast<std::uint64_t>(spec.alternatives(p)) * completions[p + 1][remaining - 1];
    if (rng.below(completions[p][remaining]) < take) {
      auto alts = alternative_values(spec, p, arch.value(p));
      nb.set(p, alts[rng.below(alts.size())]);
      --remaining;
    }
  }
  return nb;
}

}  // namespace diffnas
