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

// Population search driven by a delta predictor, plus the random-search and
// aging-evolution baselines. Every searcher records a trace indexed by
// true-oracle queries.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "diffnas/errors.hpp"
#include "diffnas/oracle.hpp"
#include "diffnas/predictor.hpp"
#include "diffnas/rng.hpp"
#include "diffnas/search_space.hpp"

namespace diffnas {

struct TraceStep {
  int iteration = 0;
  std::uint64_t oracle_queries = 0;     // cumulative
  std::uint64_t predictor_queries = 0;  // cumulative
  std::optional<double> best_score;     // best true score seen so far
  std::optional<double> mean_edit_distance;
};

struct SearchTrace {
  std::vector<TraceStep> steps;

  std::uint64_t oracle_queries() const { return steps.empty() ? 0 : steps.back().oracle_queries; }
};

struct SearchResult {
  Architecture best;
  double best_score = 0.0;
  SearchTrace trace;
};

// Oracle queries spent when the best score first reached `target`.
inline std::optional<std::uint64_t> queries_to_reach(const SearchTrace& trace, double target) {
  for (const auto& s : trace.steps)
    if (s.best_score && *s.best_score >= target) return s.oracle_queries;
  return std::nullopt;
}

inline std::optional<double> mean_distance(const std::vector<Architecture>& population,
                                           const std::optional<Architecture>& optimum) {
  if (!optimum || population.empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& a : population) total += edit_distance(a, *optimum);
  return total / static_cast<double>(population.size());
}

// Tracks the running argmax over true-oracle queries (ties: smallest key).
template <Oracle O>
class ScoreKeeper {
 public:
  explicit ScoreKeeper(const O& oracle) : oracle_(&oracle) {}

  double evaluate(const Architecture& a) {
    const double s = oracle_->score(a);
    ++queries_;
    if (!best_ || s > best_->second || (s == best_->second && a < best_->first))
      best_.emplace(a, s);
    return s;
  }

  std::uint64_t queries() const { return queries_; }
  std::optional<double> best_score() const {
    return best_ ? std::optional<double>(best_->second) : std::nullopt;
  }
  SearchResult result(SearchTrace trace) const {
    if (!best_) throw InvalidArgument("search made no oracle queries");
    return {best_->first, best_->second, std::move(trace)};
  }

 private:
  const O* oracle_;
  std::uint64_t queries_ = 0;
  std::optional<std::pair<Architecture, double>> best_;
};

// ---------------------------------------------------------------------------
// Predictor-guided population walk

enum class Convergence { no_member_improved, iteration_cap };

struct SearchConfig {
  std::size_t population_size = 256;
  int max_iterations = 100;
  // Neighbors scored per member and iteration; nullopt scores all of D1.
  std::optional<std::size_t> neighbor_sample;
  Convergence convergence = Convergence::no_member_improved;
  // True-oracle evaluations of the final pool; 0 evaluates all of it.
  std::size_t final_eval_budget = 0;
  // Replace members with no improving neighbor by fresh random draws; their
  // resting points are kept for the final evaluation.
  bool restarts = false;
  std::uint64_t seed = 0;

  void check() const {
    if (population_size < 1) throw InvalidArgument("population_size must be >= 1");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
    if (neighbor_sample && *neighbor_sample < 1)
      throw InvalidArgument("neighbor sample must be >= 1");
  }
};

struct DeltaSearchResult : SearchResult {
  std::vector<Architecture> initial_population;
  std::vector<Architecture> final_population;
  int iterations = 0;
};

// Each iteration moves every member to its neighbor with the largest
// predicted delta when that delta is positive. Predictor calls are free;
// only the final evaluation of the distinct resting points queries the true
// oracle. That pool is evaluated in order of how many members rest at each
// point (most first), then by ArchKey.
template <DeltaPredictor P, Oracle O>
DeltaSearchResult delta_search(const SearchSpaceSpec& spec, const P& predictor,
                               const O& true_oracle, const SearchConfig& cfg,
                               const std::optional<Architecture>& optimum = std::nullopt) {
  cfg.check();
  if (!(true_oracle.spec() == spec)) throw SpecMismatch("oracle belongs to a different space");
  Rng init(derive_seed(cfg.seed, 0));
  std::vector<Architecture> population;
  for (std::size_t m = 0; m < cfg.population_size; ++m)
    population.push_back(random_architecture(spec, init));

  DeltaSearchResult out;
  out.initial_population = population;
  std::map<Architecture, std::size_t> resting;  // restarted members' last positions
  std::uint64_t predictor_queries = 0;
  SearchTrace trace;
  trace.steps.push_back({0, 0, 0, std::nullopt, mean_distance(population, optimum)});

  int iteration = 0;
  while (iteration < cfg.max_iterations) {
    ++iteration;
    std::size_t improved = 0;
    for (std::size_t m = 0; m < population.size(); ++m) {
      const Architecture& p = population[m];
      std::vector<Architecture> candidates = neighbors_k(spec, p, 1);
      if (cfg.neighbor_sample && *cfg.neighbor_sample < candidates.size()) {
        std::vector<std::size_t> idx(candidates.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng pick(derive_seed(cfg.seed, 1, iteration, m));
        for (std::size_t i = 0; i < *cfg.neighbor_sample; ++i)
          std::swap(idx[i], idx[i + pick.below(idx.size() - i)]);
        idx.resize(*cfg.neighbor_sample);
        std::sort(idx.begin(), idx.end());
        std::vector<Architecture> chosen;
        for (auto i : idx) chosen.push_back(std::move(candidates[i]));
        candidates = std::move(chosen);
      }
      double best_delta = -std::numeric_limits<double>::infinity();
      std::size_t best = 0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double d = predictor.predict(p, candidates[c]);
        ++predictor_queries;
        if (d > best_delta) {
          best_delta = d;
          best = c;
        }
      }
      if (best_delta > 0.0) {
        population[m] = std::move(candidates[best]);
        ++improved;
      } else if (cfg.restarts) {
        ++resting[p];
        Rng fresh(derive_seed(cfg.seed, 2, iteration, m));
        population[m] = random_architecture(spec, fresh);
      }
    }
    trace.steps.push_back(
        {iteration, 0, predictor_queries, std::nullopt, mean_distance(population, optimum)});
    if (improved == 0 && cfg.convergence == Convergence::no_member_improved) break;
  }
  out.iterations = iteration;
  out.final_population = population;

  for (const auto& a : population) ++resting[a];
  std::vector<std::pair<Architecture, std::size_t>> pool(resting.begin(), resting.end());
  std::stable_sort(pool.begin(), pool.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (cfg.final_eval_budget > 0 && pool.size() > cfg.final_eval_budget)
    pool.resize(cfg.final_eval_budget);

  ScoreKeeper keeper(true_oracle);
  const auto final_distance = trace.steps.back().mean_edit_distance;
  for (const auto& [arch, count] : pool) {
    keeper.evaluate(arch);
    trace.steps.push_back(
        {iteration + 1, keeper.queries(), predictor_queries, keeper.best_score(), final_distance});
  }
  static_cast<SearchResult&>(out) = keeper.result(std::move(trace));
  return out;
}

// ---------------------------------------------------------------------------
// Baselines

// `budget` uniform draws with replacement. The distance column tracks the
// best architecture found so far.
template <Oracle O>
SearchResult random_search(const O& true_oracle, std::size_t budget, std::uint64_t seed,
                           const std::optional<Architecture>& optimum = std::nullopt) {
  if (budget < 1) throw InvalidArgument("budget must be >= 1");
  const auto& spec = true_oracle.spec();
  Rng rng(seed);
  ScoreKeeper keeper(true_oracle);
  SearchTrace trace;
  std::optional<Architecture> incumbent;
  double incumbent_score = 0.0;
  for (std::size_t i = 0; i < budget; ++i) {
    Architecture a = random_architecture(spec, rng);
    const double s = keeper.evaluate(a);
    if (!incumbent || s > incumbent_score || (s == incumbent_score && a < *incumbent)) {
      incumbent = a;
      incumbent_score = s;
    }
    std::optional<double> dist;
    if (optimum) dist = edit_distance(*incumbent, *optimum);
    trace.steps.push_back({static_cast<int>(i + 1), keeper.queries(), 0, keeper.best_score(), dist});
  }
  return keeper.result(std::move(trace));
}

struct EvolutionConfig {
  std::size_t population_size = 256;
  std::size_t tournament_size = 10;
  std::size_t cycles = 1000;  // total oracle queries, initial population included
  std::uint64_t seed = 0;
};

struct EvolutionResult : SearchResult {
  std::vector<std::pair<Architecture, Architecture>> lineage;  // (parent, child)
  std::vector<std::size_t> population_sizes;                   // after each query
  std::vector<Architecture> final_population;
};

// Aging evolution: the oldest member dies each cycle. A tournament of
// distinct members is drawn uniformly; its best (ties: oldest) is mutated
// by one uniform edit.
template <Oracle O>
EvolutionResult regularized_evolution(const O& true_oracle, const EvolutionConfig& cfg,
                                      const std::optional<Architecture>& optimum = std::nullopt) {
  if (cfg.population_size < 1 || cfg.tournament_size < 1)
    throw InvalidArgument("population and tournament sizes must be >= 1");
  if (cfg.cycles < cfg.population_size)
    throw InvalidArgument("cycles must be >= population_size");
  const auto& spec = true_oracle.spec();
  Rng rng(cfg.seed);
  ScoreKeeper keeper(true_oracle);
  EvolutionResult out;
  SearchTrace trace;
  std::deque<std::pair<Architecture, double>> population;

  auto record = [&](int cycle) {
    std::vector<Architecture> members;
    for (const auto& [a, s] : population) members.push_back(a);
    out.population_sizes.push_back(population.size());
    trace.steps.push_back(
        {cycle, keeper.queries(), 0, keeper.best_score(), mean_distance(members, optimum)});
  };

  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    Architecture a = random_architecture(spec, rng);
    const double s = keeper.evaluate(a);
    population.emplace_back(std::move(a), s);
    record(static_cast<int>(i + 1));
  }
  std::vector<std::size_t> idx(population.size());
  const std::size_t tsize = std::min(cfg.tournament_size, population.size());
  for (std::size_t c = cfg.population_size; c < cfg.cycles; ++c) {
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < tsize; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    std::size_t parent = idx[0];
    for (std::size_t i = 1; i < tsize; ++i) {
      const std::size_t j = idx[i];
      if (population[j].second > population[parent].second ||
          (population[j].second == population[parent].second && j < parent))
        parent = j;
    }
    Architecture child = random_neighbor(spec, population[parent].first, 1, rng);
    out.lineage.emplace_back(population[parent].first, child);
    const double s = keeper.evaluate(child);
    population.emplace_back(std::move(child), s);
    population.pop_front();
    record(static_cast<int>(c + 1));
  }
  for (const auto& [a, s] : population) out.final_population.push_back(a);
  static_cast<SearchResult&>(out) = keeper.result(std::move(trace));
  return out;
}

// ---------------------------------------------------------------------------
// Trace CSV

inline std::string optional_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("nan");
}

inline void write_trace_csv(std::ostream& out, const SearchTrace& trace,
                            const std::string& config_line) {
  out << "#config " << config_line << '\n';
  out << "iteration,oracle_queries,predictor_queries,best_score,mean_edit_dist\n";
  for (const auto& s : trace.steps)
    out << s.iteration << ',' << s.oracle_queries << ',' << s.predictor_queries << ','
        << optional_cell(s.best_score) << ',' << optional_cell(s.mean_edit_distance) << '\n';
}

}  // namespace diffnas
