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

// Experiment harnesses built from the library pieces: predictor quality as a
// function of edit distance, DoA-versus-one-hot ranking quality, and
// multi-seed searcher comparisons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "diffnas/doa_dataset.hpp"
#include "diffnas/encoding.hpp"
#include "diffnas/oracle.hpp"
#include "diffnas/predictor.hpp"
#include "diffnas/search.hpp"

namespace diffnas {

// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw EmptyDataset("quantile of an empty list");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi || v[lo] == v[hi]) return v[lo];
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

inline double iqr(const std::vector<double>& v) { return quantile(v, 0.75) - quantile(v, 0.25); }

// ---------------------------------------------------------------------------
// Predictor loss versus edit distance

struct SweepConfig {
  std::vector<int> ks = {1, 2, 3};
  std::size_t num_anchors = 1000;  // per k
  int samples_per_encoding = 4;
  double train_fraction = 0.8;
  FeatureMode mode = FeatureMode::diff_only;
  Backend backend = Backend::mlp;
  TrainConfig train;
  std::uint64_t seed = 0;
};

struct SweepRow {
  int k = 0;
  double test_mse = 0.0;
  std::optional<double> test_tau;  // undefined when the test side is constant
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
};

struct RegressionScore {
  double mse = 0.0;
  std::optional<double> tau;
};

inline RegressionScore evaluate_predictor(const PredictorModel& model, const DoADataset& ds) {
  std::vector<double> predicted, truth;
  double sse = 0.0;
  for (const auto& s : ds.samples) {
    const double p = model.regressor.predict(model_input(model.mode, ds.spec, s));
    predicted.push_back(p);
    truth.push_back(s.delta_acc);
    sse += (p - s.delta_acc) * (p - s.delta_acc);
  }
  if (ds.empty()) throw EmptyDataset("nothing to evaluate");
  RegressionScore out{sse / static_cast<double>(ds.size()), std::nullopt};
  if (ds.size() >= 2) {
    try {
      out.tau = kendall_tau(predicted, truth);
    } catch (const UndefinedCorrelation&) {
    }
  }
  return out;
}

// For each k: generate -> aggregate -> split -> train -> evaluate on the
// held-out groups, with the same anchor budget for every k.
template <Proxy P>
std::vector<SweepRow> loss_vs_edit_distance(const P& proxy, const SweepConfig& cfg) {
  if (cfg.num_anchors == 0) throw EmptyDataset("per-k budget is zero");
  for (int k : cfg.ks) check_k(proxy.spec(), k);
  std::vector<SweepRow> rows;
  for (int k : cfg.ks) {
    DoAGenerationConfig gen{cfg.num_anchors, k, cfg.samples_per_encoding,
                            derive_seed(cfg.seed, 1, k), false};
    const DoADataset all = aggregate_by_encoding(generate_doa_dataset(proxy, gen), cfg.mode);
    const auto [train_set, test_set] = split(all, cfg.train_fraction, derive_seed(cfg.seed, 2, k));
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.train.seed, 3, k);
    const auto fit = train(train_set, tc, cfg.mode, cfg.backend);
    const auto score = evaluate_predictor(fit.model, test_set);
    rows.push_back({k, score.mse, score.tau, train_set.size(), test_set.size()});
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                            const std::string& config_line) {
  out << "#config " << config_line << '\n';
  out << "k,test_mse,test_tau,train_samples,test_samples\n";
  for (const auto& r : rows)
    out << r.k << ',' << format_double(r.test_mse) << ',' << optional_cell(r.test_tau) << ','
        << r.train_samples << ',' << r.test_samples << '\n';
}

// ---------------------------------------------------------------------------
// DoA encoding versus one-hot (ADJ) encoding

struct EncodingComparisonConfig {
  // Share of the space whose architectures are measured for training.
  double space_fraction = 0.01;
  int samples_per_encoding = 4;
  int adj_samples = 1;
  std::size_t eval_anchors = 100;
  Backend backend = Backend::ridge;
  TrainConfig train;
  std::uint64_t seed = 0;
};

struct EncodingComparison {
  double doa_tau = 0.0;
  double adj_tau = 0.0;
  std::size_t train_architectures = 0;
};

// Both predictors are trained from `m` = round(space_fraction * |A|) sampled
// anchors and the same proxy. The DoA predictor learns from each anchor's
// single-edit pair (repeated measurements averaged per encoding); the ADJ
// predictor regresses the anchors' averaged proxy accuracy on their one-hot
// encodings. Quality is the mean, over held-out anchors, of Kendall's tau
// between predicted and true deltas across all single-edit neighbors.
template <Oracle O, Proxy P>
EncodingComparison compare_encodings(const O& truth, const P& proxy,
                                     const EncodingComparisonConfig& cfg) {
  const auto& spec = truth.spec();
  const double size = static_cast<double>(space_size_exact(spec));
  const auto m = static_cast<std::size_t>(std::llround(cfg.space_fraction * size));
  if (m == 0) throw EmptyDataset("space fraction selects no architectures");

  DoAGenerationConfig gen{m, 1, cfg.samples_per_encoding, derive_seed(cfg.seed, 1), false};
  const DoADataset doa = aggregate_by_encoding(generate_doa_dataset(proxy, gen));
  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(cfg.seed, 2);
  const auto doa_fit = train(doa, tc, FeatureMode::diff_only, cfg.backend);

  // Same anchors as the DoA dataset; fresh call indices for the repeats.
  std::vector<FeatureVector> rows;
  std::vector<double> targets;
  std::set<Architecture> seen;
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng(derive_seed(gen.seed, i));
    const Architecture anchor = random_architecture(spec, rng);
    double acc = 0.0;
    for (int j = 0; j < cfg.adj_samples; ++j)
      acc += proxy.proxy_score(anchor, (m + i) * cfg.samples_per_encoding + j);
    seen.insert(anchor);
    rows.push_back(encode_onehot(spec, anchor));
    targets.push_back(acc / cfg.adj_samples);
  }
  const auto adj_fit = fit_regressor(rows, targets, cfg.backend, tc);

  const DoAPredictor doa_predictor(spec, doa_fit.model);
  std::vector<double> doa_taus, adj_taus;
  Rng eval(derive_seed(cfg.seed, 3));
  while (doa_taus.size() < cfg.eval_anchors) {
    const Architecture anchor = random_architecture(spec, eval);
    if (seen.count(anchor)) continue;
    const auto neighbors = neighbors_k(spec, anchor, 1);
    const double anchor_true = truth.score(anchor);
    const double anchor_adj = adj_fit.regressor.predict(encode_onehot(spec, anchor));
    std::vector<double> true_delta, doa_delta, adj_delta;
    for (const auto& nb : neighbors) {
      true_delta.push_back(truth.score(nb) - anchor_true);
      doa_delta.push_back(doa_predictor.predict(anchor, nb));
      adj_delta.push_back(adj_fit.regressor.predict(encode_onehot(spec, nb)) - anchor_adj);
    }
    try {
      const double d = kendall_tau(doa_delta, true_delta);
      const double a = kendall_tau(adj_delta, true_delta);
      doa_taus.push_back(d);
      adj_taus.push_back(a);
    } catch (const UndefinedCorrelation&) {
      seen.insert(anchor);
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  return {mean(doa_taus), mean(adj_taus), m};
}

// ---------------------------------------------------------------------------
// Searcher comparison

struct NamedSearcher {
  std::string name;
  std::function<SearchResult(std::uint64_t seed)> run;
};

struct RunSummary {
  std::string method;
  std::uint64_t seed = 0;
  double best_score = 0.0;
  double target = 0.0;
  // Infinity when the target was never reached.
  double queries_to_target = std::numeric_limits<double>::infinity();
  std::uint64_t oracle_queries = 0;
};

struct MethodSummary {
  std::string method;
  double median_best = 0.0;
  double iqr_best = 0.0;
  double median_queries = 0.0;
  double iqr_queries = 0.0;
  std::size_t reached = 0;
  std::size_t runs = 0;
};

struct Comparison {
  std::vector<MethodSummary> table;
  std::vector<RunSummary> runs;
  std::vector<std::pair<std::string, SearchResult>> results;  // parallel to runs
};

// Runs every method on every seed. The target for a seed is
// optimum_score(seed) * (1 - epsilon).
inline Comparison compare_searchers(const std::vector<NamedSearcher>& methods,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::function<double(std::uint64_t)>& optimum_score,
                                    double epsilon) {
  if (methods.empty() || seeds.empty()) throw InvalidArgument("need at least one method and seed");
  Comparison out;
  for (const auto& m : methods) {
    std::vector<double> bests, queries;
    MethodSummary summary{m.name};
    for (auto seed : seeds) {
      SearchResult r = m.run(seed);
      RunSummary rs{m.name, seed, r.best_score, optimum_score(seed) * (1.0 - epsilon)};
      if (auto q = queries_to_reach(r.trace, rs.target)) {
        rs.queries_to_target = static_cast<double>(*q);
        ++summary.reached;
      }
      rs.oracle_queries = r.trace.oracle_queries();
      bests.push_back(rs.best_score);
      queries.push_back(rs.queries_to_target);
      out.runs.push_back(rs);
      out.results.emplace_back(m.name, std::move(r));
    }
    summary.runs = seeds.size();
    summary.median_best = median(bests);
    summary.iqr_best = iqr(bests);
    summary.median_queries = median(queries);
    summary.iqr_queries = iqr(queries);
    out.table.push_back(summary);
  }
  return out;
}

inline void write_comparison_csv(std::ostream& out, const Comparison& c,
                                 const std::string& config_line) {
  out << "#config " << config_line << '\n';
  out << "method,runs,reached,median_best,iqr_best,median_queries_to_target,iqr_queries_to_target\n";
  for (const auto& m : c.table)
    out << m.method << ',' << m.runs << ',' << m.reached << ',' << format_double(m.median_best)
        << ',' << format_double(m.iqr_best) << ',' << format_double(m.median_queries) << ','
        << format_double(m.iqr_queries) << '\n';
}

// Long format on a shared oracle-query axis: one row per method, seed and
// query count at which the best score is known.
inline void write_aligned_traces_csv(std::ostream& out, const Comparison& c,
                                     const std::string& config_line) {
  out << "#config " << config_line << '\n';
  out << "method,seed,oracle_queries,best_score,mean_edit_dist\n";
  for (std::size_t i = 0; i < c.runs.size(); ++i) {
    const auto& trace = c.results[i].second.trace;
    std::uint64_t last = 0;
    for (const auto& s : trace.steps) {
      if (s.oracle_queries == 0 || s.oracle_queries == last) continue;
      last = s.oracle_queries;
      out << c.runs[i].method << ',' << c.runs[i].seed << ',' << s.oracle_queries << ','
          << optional_cell(s.best_score) << ',' << optional_cell(s.mean_edit_distance) << '\n';
    }
  }
}

}  // namespace diffnas
