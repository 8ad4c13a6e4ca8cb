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

// diffnas: command-line driver for the difference-of-architecture pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "diffnas/config.hpp"
#include "diffnas/doa_dataset.hpp"
#include "diffnas/encoding.hpp"
#include "diffnas/experiments.hpp"
#include "diffnas/oracle.hpp"
#include "diffnas/predictor.hpp"
#include "diffnas/search.hpp"

namespace fs = std::filesystem;
using namespace diffnas;

namespace {

constexpr const char* kDataset = "dataset.doa";
constexpr const char* kModel = "model.txt";

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  bool force = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("-c,--config", opt.config_path, "JSON experiment config (defaults when omitted)");
  cmd->add_option("--set", opt.overrides, "override one key, e.g. --set search.seed=3");
  cmd->add_flag("--force", opt.force, "overwrite existing outputs");
}

std::string config_line(const ExperimentConfig& cfg) {
  return "hash=" + cfg.hash + " " + cfg.doc.dump();
}

std::vector<std::string> stamp(const ExperimentConfig& cfg) {
  return {"config_hash=" + cfg.hash, "config " + cfg.doc.dump()};
}

fs::path output_path(const ExperimentConfig& cfg, const std::string& name) {
  return fs::path(cfg.output_dir) / name;
}

void write_output(const fs::path& path, const std::string& text, bool force) {
  if (fs::exists(path) && !force)
    throw IoError(path.string() + " exists; pass --force to overwrite");
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("write failed for " + path.string());
  std::cout << "wrote " << path.string() << '\n';
}

fs::path require(const ExperimentConfig& cfg, const std::string& name, const std::string& producer) {
  const auto path = output_path(cfg, name);
  if (!fs::exists(path))
    throw MissingArtifact(path.string() + " not found; run 'diffnas " + producer +
                          "' with this config first");
  return path;
}

// Calls fn with the configured ground-truth oracle.
template <typename Fn>
void with_oracle(const ExperimentConfig& cfg, Fn&& fn) {
  if (cfg.oracle.kind == OracleKind::synthetic) {
    const SyntheticLandscape land(cfg.space, cfg.oracle.seed, cfg.oracle.pair_weight);
    fn(land);
    return;
  }
  const auto bench = load_tabular(cfg.oracle.tabular_path);
  if (!(bench.spec() == cfg.space))
    throw SpecMismatch("tabular benchmark " + cfg.oracle.tabular_path +
                       " does not match the configured space");
  fn(bench);
}

template <typename O>
std::optional<std::pair<Architecture, double>> known_optimum(const ExperimentConfig& cfg,
                                                             const O& oracle) {
  if (space_size_exact(cfg.space) > BigInt(cfg.oracle.optimum_limit)) return std::nullopt;
  return best_in_space(oracle, cfg.oracle.optimum_limit);
}

PredictorModel load_checked_model(const ExperimentConfig& cfg) {
  const auto path = require(cfg, kModel, "train");
  auto model = load_model(path.string());
  if (model.feature_dim != feature_dim(cfg.space))
    throw SpecMismatch(path.string() + " was trained for a different search space");
  return model;
}

// ---------------------------------------------------------------------------

int cmd_size(const std::string& kind, int n, int r, const std::vector<int>& ks) {
  const SearchSpaceSpec spec(parse_space_kind(kind), n, r);
  for (int k : ks) check_k(spec, k);
  std::cout << "space kind=" << to_string(spec.kind()) << " n=" << n << " r=" << r
            << " positions=" << spec.positions() << '\n';
  std::cout << "|A| nominal=" << space_size_paper(spec) << " exact=" << space_size_exact(spec) << '\n';
  for (int k : ks)
    std::cout << "|D^" << k << "| nominal=" << dk_size_paper(spec, k)
              << " exact=" << dk_size_exact(spec, k) << '\n';
  return 0;
}

int cmd_config(const CommonOptions& opt) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  std::cout << cfg.doc.dump(2) << '\n' << "config_hash=" << cfg.hash << '\n';
  return 0;
}

int cmd_gen_dataset(const CommonOptions& opt) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  with_oracle(cfg, [&](const auto& oracle) {
    const NoisyProxy proxy(oracle, cfg.oracle.sigma, cfg.oracle.proxy_seed);
    const auto ds = generate_doa_dataset(proxy, cfg.dataset);
    const auto groups = aggregate_by_encoding(ds, FeatureMode::diff_only).size();
    const auto pairs = aggregate_by_encoding(ds, FeatureMode::diff_plus_anchor).size();
    std::ostringstream out;
    write_doa_dataset(out, ds, stamp(cfg));
    write_output(output_path(cfg, kDataset), out.str(), opt.force);
    std::cout << "samples " << ds.size() << '\n'
              << "distinct_encodings " << groups << '\n'
              << "distinct_anchor_encoding_pairs " << pairs << '\n'
              << "mean_samples_per_encoding "
              << format_double(static_cast<double>(ds.size()) / static_cast<double>(groups))
              << '\n';
  });
  return 0;
}

int cmd_train(const CommonOptions& opt) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  const auto path = require(cfg, kDataset, "gen-dataset");
  const auto ds = load_doa_dataset(path.string());
  if (!(ds.spec == cfg.space) || ds.k != cfg.dataset.k ||
      ds.samples_per_encoding != cfg.dataset.samples_per_encoding || ds.seed != cfg.dataset.seed)
    throw MissingArtifact(path.string() +
                          " was generated from different dataset settings; rerun "
                          "'diffnas gen-dataset --force'");
  const auto agg = aggregate_by_encoding(ds, cfg.mode);
  const auto fit = train(agg, cfg.train, cfg.mode, cfg.backend);
  std::ostringstream out;
  write_model(out, fit.model, stamp(cfg));
  write_output(output_path(cfg, kModel), out.str(), opt.force);
  std::cout << "training_rows " << agg.size() << '\n'
            << "train_mse " << format_double(fit.train_mse) << '\n';
  return 0;
}

int cmd_search(const CommonOptions& opt) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  const auto model = load_checked_model(cfg);
  with_oracle(cfg, [&](const auto& oracle) {
    const auto optimum = known_optimum(cfg, oracle);
    const DoAPredictor predictor(cfg.space, model);
    std::optional<Architecture> target;
    if (optimum) target = optimum->first;
    const auto res = delta_search(cfg.space, predictor, oracle, cfg.search, target);
    std::ostringstream out;
    write_trace_csv(out, res.trace, config_line(cfg));
    write_output(output_path(cfg, "search_trace.csv"), out.str(), opt.force);
    std::cout << "best " << to_key(res.best).text << ' ' << format_double(res.best_score) << '\n'
              << "iterations " << res.iterations << '\n'
              << "oracle_queries " << res.trace.oracle_queries() << '\n'
              << "predictor_queries " << res.trace.steps.back().predictor_queries << '\n';
    if (optimum)
      std::cout << "optimum " << to_key(optimum->first).text << ' '
                << format_double(optimum->second) << '\n';
  });
  return 0;
}

int cmd_compare(const CommonOptions& opt) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  std::optional<PredictorModel> model;
  for (const auto& m : cfg.compare.methods)
    if (m == "delta_nas") model = load_checked_model(cfg);
  with_oracle(cfg, [&](const auto& oracle) {
    const auto optimum = known_optimum(cfg, oracle);
    if (!optimum)
      throw SpaceTooLarge("compare needs the optimum; raise oracle.optimum_limit above the space size");
    std::vector<NamedSearcher> methods;
    for (const auto& name : cfg.compare.methods) {
      if (name == "delta_nas") {
        methods.push_back({name, [&](std::uint64_t seed) {
                             SearchConfig sc = cfg.search;
                             sc.seed = seed;
                             const DoAPredictor predictor(cfg.space, *model);
                             return static_cast<SearchResult>(
                                 delta_search(cfg.space, predictor, oracle, sc, optimum->first));
                           }});
      } else if (name == "random") {
        methods.push_back({name, [&](std::uint64_t seed) {
                             return random_search(oracle, cfg.compare.random_budget, seed,
                                                  optimum->first);
                           }});
      } else {
        methods.push_back({name, [&](std::uint64_t seed) {
                             EvolutionConfig ec = cfg.compare.evolution;
                             ec.seed = seed;
                             return static_cast<SearchResult>(
                                 regularized_evolution(oracle, ec, optimum->first));
                           }});
      }
    }
    const auto cmp = compare_searchers(
        methods, cfg.compare.seeds, [&](std::uint64_t) { return optimum->second; },
        cfg.compare.epsilon);
    std::ostringstream table, traces;
    write_comparison_csv(table, cmp, config_line(cfg));
    write_aligned_traces_csv(traces, cmp, config_line(cfg));
    write_output(output_path(cfg, "comparison.csv"), table.str(), opt.force);
    write_output(output_path(cfg, "comparison_traces.csv"), traces.str(), opt.force);
    for (const auto& m : cmp.table)
      std::cout << m.method << " reached " << m.reached << '/' << m.runs << " median_queries "
                << format_double(m.median_queries) << " median_best "
                << format_double(m.median_best) << '\n';
  });
  return 0;
}

int cmd_sweep_k(const CommonOptions& opt) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  SweepConfig sc;
  sc.ks = cfg.sweep.ks;
  sc.num_anchors = cfg.sweep.num_anchors;
  sc.samples_per_encoding = cfg.sweep.samples_per_encoding;
  sc.train_fraction = cfg.sweep.train_fraction;
  sc.mode = cfg.mode;
  sc.backend = cfg.backend;
  sc.train = cfg.train;
  sc.seed = cfg.sweep.seed;
  with_oracle(cfg, [&](const auto& oracle) {
    const NoisyProxy proxy(oracle, cfg.oracle.sigma, cfg.oracle.proxy_seed);
    const auto rows = loss_vs_edit_distance(proxy, sc);
    std::ostringstream out;
    write_sweep_csv(out, rows, config_line(cfg));
    write_output(output_path(cfg, "sweep_k.csv"), out.str(), opt.force);
    for (const auto& r : rows)
      std::cout << "k=" << r.k << " test_mse " << format_double(r.test_mse) << " test_tau "
                << optional_cell(r.test_tau) << '\n';
  });
  return 0;
}

int cmd_export_tabular(const CommonOptions& opt, const std::string& path) {
  const auto cfg = load_config(opt.config_path, opt.overrides);
  if (cfg.oracle.kind != OracleKind::synthetic)
    throw ConfigError("export-tabular needs oracle.type=synthetic");
  const SyntheticLandscape land(cfg.space, cfg.oracle.seed, cfg.oracle.pair_weight);
  auto bench = tabulate(land, cfg.oracle.optimum_limit);
  bench.metadata() = stamp(cfg);
  std::ostringstream out;
  write_tabular(out, bench);
  write_output(path, out.str(), opt.force);
  std::cout << "entries " << bench.size() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Difference-of-architecture predictor and search"};
  app.require_subcommand(1);

  std::string kind = "block";
  int n = 0, r = 0;
  std::vector<int> ks{1};
  auto* size = app.add_subcommand("size", "print search-space and difference-space sizes");
  size->add_option("--kind", kind, "block or cell")->capture_default_str();
  size->add_option("--n", n, "nodes")->required();
  size->add_option("--r", r, "operations per node")->required();
  size->add_option("--k", ks, "edit distances")->capture_default_str();

  CommonOptions opt;
  auto* config = app.add_subcommand("config", "print the merged config and its hash");
  auto* gen = app.add_subcommand("gen-dataset", "sample anchor/neighbor pairs from the proxy");
  auto* trn = app.add_subcommand("train", "fit the delta predictor on the dataset");
  auto* search = app.add_subcommand("search", "run the predictor-guided search once");
  auto* compare = app.add_subcommand("compare", "compare searchers over several seeds");
  auto* sweep = app.add_subcommand("sweep-k", "predictor test loss versus edit distance");
  auto* exp = app.add_subcommand("export-tabular", "dump the synthetic landscape as a table");
  std::string export_path;
  exp->add_option("--output", export_path, "destination file")->required();
  for (auto* cmd : {config, gen, trn, search, compare, sweep, exp}) add_common(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*size) return cmd_size(kind, n, r, ks);
    if (*config) return cmd_config(opt);
    if (*gen) return cmd_gen_dataset(opt);
    if (*trn) return cmd_train(opt);
    if (*search) return cmd_search(opt);
    if (*compare) return cmd_compare(opt);
    if (*sweep) return cmd_sweep_k(opt);
    if (*exp) return cmd_export_tabular(opt, export_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
