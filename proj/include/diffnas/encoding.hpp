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

// Dense one-hot encoding (the ADJ baseline) and the sparse
// difference-of-architecture encoding of close architecture pairs.

#include <charconv>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "diffnas/errors.hpp"
#include "diffnas/search_space.hpp"

namespace diffnas {

using FeatureVector = std::vector<double>;

// Length of both the one-hot encoding and the difference feature.
inline std::size_t feature_dim(const SearchSpaceSpec& spec) {
  return static_cast<std::size_t>(spec.nodes()) * spec.num_ops() + spec.adj_size();
}

// Node i occupies slots [i*r, (i+1)*r); adjacency bits follow.
inline FeatureVector encode_onehot(const SearchSpaceSpec& spec, const Architecture& a) {
  validate(spec, a);
  const int r = spec.num_ops();
  FeatureVector v(feature_dim(spec), 0.0);
  for (int i = 0; i < spec.nodes(); ++i) v[i * r + a.ops[i]] = 1.0;
  const std::size_t base = static_cast<std::size_t>(spec.nodes()) * r;
  for (std::size_t j = 0; j < a.adj.size(); ++j) v[base + j] = a.adj[j];
  return v;
}

inline Architecture decode_onehot(const SearchSpaceSpec& spec, const FeatureVector& v) {
  if (v.size() != feature_dim(spec))
    throw DimensionMismatch("one-hot vector has length " + std::to_string(v.size()));
  const int r = spec.num_ops();
  Architecture a;
  for (int i = 0; i < spec.nodes(); ++i) {
    int chosen = -1;
    for (int o = 0; o < r; ++o) {
      if (v[i * r + o] == 1.0) {
        if (chosen >= 0) throw InvalidArgument("node slice is not one-hot");
        chosen = o;
      } else if (v[i * r + o] != 0.0) {
        throw InvalidArgument("node slice is not one-hot");
      }
    }
    if (chosen < 0) throw InvalidArgument("node slice is not one-hot");
    a.ops.push_back(chosen);
  }
  const std::size_t base = static_cast<std::size_t>(spec.nodes()) * r;
  for (std::size_t j = base; j < v.size(); ++j) {
    if (v[j] != 0.0 && v[j] != 1.0) throw InvalidArgument("adjacency slot is not a bit");
    a.adj.push_back(static_cast<std::uint8_t>(v[j]));
  }
  return a;
}

// One edit. `position` indexes ops when !is_adj and adjacency bits otherwise.
struct Edit {
  bool is_adj = false;
  int position = 0;
  int old_val = 0;
  int new_val = 0;

  auto operator<=>(const Edit&) const = default;
};

// Edits sorted by (is_adj, position); positions unique; old != new.
struct DiffEncoding {
  std::vector<Edit> edits;

  std::size_t size() const { return edits.size(); }
  bool empty() const { return edits.empty(); }
  auto operator<=>(const DiffEncoding&) const = default;
};

inline DiffEncoding diff(const Architecture& from, const Architecture& to) {
  if (from.ops.size() != to.ops.size() || from.adj.size() != to.adj.size())
    throw SpecMismatch("diff between architectures of different spaces");
  DiffEncoding d;
  for (std::size_t i = 0; i < from.ops.size(); ++i)
    if (from.ops[i] != to.ops[i])
      d.edits.push_back({false, static_cast<int>(i), from.ops[i], to.ops[i]});
  for (std::size_t i = 0; i < from.adj.size(); ++i)
    if (from.adj[i] != to.adj[i])
      d.edits.push_back({true, static_cast<int>(i), from.adj[i], to.adj[i]});
  return d;
}

inline Architecture apply_diff(const Architecture& base, const DiffEncoding& d) {
  Architecture out = base;
  for (const auto& e : d.edits) {
    const std::size_t limit = e.is_adj ? base.adj.size() : base.ops.size();
    if (e.position < 0 || static_cast<std::size_t>(e.position) >= limit)
      throw SpecMismatch("edit position " + std::to_string(e.position) + " out of range");
    if (e.is_adj) {
      if (base.adj[e.position] != e.old_val)
        throw StaleDiff("adjacency bit " + std::to_string(e.position) + " is " +
                        std::to_string(base.adj[e.position]) + ", diff expects " +
                        std::to_string(e.old_val));
      out.adj[e.position] = static_cast<std::uint8_t>(e.new_val);
    } else {
      if (base.ops[e.position] != e.old_val)
        throw StaleDiff("op " + std::to_string(e.position) + " is " +
                        std::to_string(base.ops[e.position]) + ", diff expects " +
                        std::to_string(e.old_val));
      out.ops[e.position] = e.new_val;
    }
  }
  return out;
}

// -1 at (position, old), +1 at (position, new); adjacency slots carry the
// signed flip. Equals encode_onehot(to) - encode_onehot(from).
inline FeatureVector diff_to_feature(const DiffEncoding& d, const SearchSpaceSpec& spec) {
  const int r = spec.num_ops();
  const std::size_t base = static_cast<std::size_t>(spec.nodes()) * r;
  FeatureVector v(feature_dim(spec), 0.0);
  for (const auto& e : d.edits) {
    if (e.is_adj) {
      v.at(base + e.position) = static_cast<double>(e.new_val - e.old_val);
    } else {
      v.at(static_cast<std::size_t>(e.position) * r + e.old_val) -= 1.0;
      v.at(static_cast<std::size_t>(e.position) * r + e.new_val) += 1.0;
    }
  }
  return v;
}

// Text form `pos:old>new[,...]`; adjacency edits carry an 'a' prefix on the
// position; the empty diff is '-'.
inline std::string to_text(const DiffEncoding& d) {
  if (d.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < d.edits.size(); ++i) {
    const auto& e = d.edits[i];
    if (i) s += ',';
    if (e.is_adj) s += 'a';
    s += std::to_string(e.position) + ':' + std::to_string(e.old_val) + '>' +
         std::to_string(e.new_val);
  }
  return s;
}

inline DiffEncoding parse_diff(std::string_view text) {
  auto fail = [&](const std::string& why) {
    return ParseError("diff '" + std::string(text) + "': " + why);
  };
  DiffEncoding d;
  if (text == "-") return d;
  auto read_int = [&](std::string_view tok) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() || v < 0)
      throw fail("bad integer '" + std::string(tok) + "'");
    return v;
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto rec = text.substr(start, end - start);
    Edit e;
    if (!rec.empty() && rec.front() == 'a') {
      e.is_adj = true;
      rec.remove_prefix(1);
    }
    const auto colon = rec.find(':');
    const auto arrow = rec.find('>');
    if (colon == std::string_view::npos || arrow == std::string_view::npos || arrow < colon)
      throw fail("expected pos:old>new");
    e.position = read_int(rec.substr(0, colon));
    e.old_val = read_int(rec.substr(colon + 1, arrow - colon - 1));
    e.new_val = read_int(rec.substr(arrow + 1));
    if (e.old_val == e.new_val) throw fail("edit does not change its value");
    if (!d.edits.empty() &&
        std::pair(d.edits.back().is_adj, d.edits.back().position) >=
            std::pair(e.is_adj, e.position))
      throw fail("edits must be sorted by position without repeats");
    d.edits.push_back(e);
    start = end + 1;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Difference-space cardinalities. Cell spaces append adjacency positions as
// extra two-valued positions.

// Published count r^k C(n, k): an edit is identified by its position and its
// new value.
inline BigInt dk_size_paper(const SearchSpaceSpec& spec, int k) {
  check_k(spec, k);
  std::vector<BigInt> w(spec.nodes(), spec.num_ops());
  w.resize(spec.positions(), 2);
  return elementary_symmetric(w, k);
}

// Number of distinct DiffEncoding values (position, old, new) at distance k:
// C(n, k) (r(r-1))^k for block spaces.
inline BigInt dk_size_exact(const SearchSpaceSpec& spec, int k) {
  check_k(spec, k);
  std::vector<BigInt> w(spec.nodes(), spec.num_ops() * (spec.num_ops() - 1));
  w.resize(spec.positions(), 2);
  return elementary_symmetric(w, k);
}

}  // namespace diffnas
