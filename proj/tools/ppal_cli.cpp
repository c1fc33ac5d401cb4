// Copyright 2026 The ppal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: generate, run, sweep, privacy-table.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ppal/ppal.hpp"

namespace {

constexpr int kExitConfig = 2;

struct Flags {
  std::vector<double> betas;
  std::vector<std::int64_t> ks;
  std::vector<std::uint64_t> seeds;
  std::string corpus;
  std::string out_dir = "out";
  std::string strategy;
  std::optional<std::int64_t> budget_cap;
  std::string config;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--corpus", f.corpus, "Corpus TSV file (text<TAB>label per occurrence)");
  cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--config", f.config, "JSON file; its keys override command-line flags");
}

void add_learning(CLI::App* cmd, Flags& f) {
  cmd->add_option("--strategy", f.strategy, "least_confidence | margin | entropy | variance");
  cmd->add_option("--budget-cap", f.budget_cap, "Maximum labels per run (0: no cap)");
}

// Flags first, then the config file on top.
void resolve(const Flags& f, ppal::RunConfig& cfg, ppal::RunSelection& sel,
             bool seed_is_corpus = false) {
  if (!f.corpus.empty()) cfg.corpus_path = f.corpus;
  if (!f.strategy.empty()) cfg.strategy = ppal::parse_strategy(f.strategy);
  if (f.budget_cap) cfg.budget_cap = *f.budget_cap;
  if (!f.betas.empty()) {
    cfg.betas = f.betas;
    sel.beta = f.betas.front();
  }
  if (!f.ks.empty()) {
    cfg.ks = f.ks;
    sel.k = f.ks.front();
  }
  if (!f.seeds.empty()) {
    cfg.seeds = f.seeds;
    sel.seed = f.seeds.front();
    if (seed_is_corpus) cfg.corpus.seed = f.seeds.front();
  }
  if (!f.config.empty()) ppal::apply_json_file(f.config, cfg, sel);
  cfg.validate();
}

std::int64_t corpus_size(const ppal::RunConfig& cfg, const ppal::Corpus* corpus) {
  return corpus != nullptr ? static_cast<std::int64_t>(corpus->stream.size()) : cfg.corpus.n_total;
}

void warn_delta(double delta, std::int64_t n_records) {
  if (n_records > 0 && delta >= 1.0 / static_cast<double>(n_records)) {
    std::cerr << "warning: delta " << delta << " is not below 1/|D| = "
              << 1.0 / static_cast<double>(n_records) << "\n";
  }
}

int cmd_generate(const Flags& f) {
  ppal::RunConfig cfg;
  ppal::RunSelection sel;
  resolve(f, cfg, sel, true);
  const ppal::Corpus corpus = ppal::generate(cfg.corpus);
  std::filesystem::create_directories(f.out_dir);
  const auto path = std::filesystem::path(f.out_dir) / "corpus.tsv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  ppal::write_corpus(out, corpus);
  std::size_t pos = 0;
  for (const auto& q : corpus.queries) pos += ppal::GroundTruth::label(q) == ppal::Label::kPositive;
  std::cout << "wrote " << path.string() << ": " << corpus.stream.size() << " occurrences, "
            << corpus.queries.size() << " distinct, zipf_s=" << corpus.zipf_s
            << ", singleton_fraction=" << corpus.singleton_fraction() << ", positive_fraction="
            << static_cast<double>(pos) / static_cast<double>(corpus.queries.size()) << "\n";
  return 0;
}

int cmd_run(const Flags& f) {
  ppal::RunConfig cfg;
  ppal::RunSelection sel;
  resolve(f, cfg, sel);
  const ppal::Corpus corpus = ppal::load_corpus(cfg);
  const ppal::RunMetrics m = ppal::run_single(cfg, corpus, sel.beta, sel.k, sel.seed);
  warn_delta(m.delta, corpus_size(cfg, &corpus));

  const std::filesystem::path dir(f.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "run.json");
    out << ppal::metrics_json(m).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "accuracy_curve.csv", std::ios::binary);
    out << "budget,accuracy\n";
    for (const auto& p : m.accuracy_curve) out << p.budget << ',' << ppal::detail::fmt(p.accuracy, "%.4f") << '\n';
  }
  {
    std::ofstream out(dir / "releases.jsonl", std::ios::binary);
    for (const auto& r : m.release_log) {
      out << nlohmann::json{{"query_hash", r.query_hash}, {"phi", r.phi}, {"k", r.k},
                            {"beta", r.beta}, {"step", r.step}}.dump()
          << '\n';
    }
  }
  if (!m.ok()) {
    std::cerr << "run failed: " << m.error << "\n";
    return 1;
  }
  std::cout << "beta=" << m.beta << " k=" << m.k << " seed=" << m.seed << " pool=" << m.pool_size
            << " labels=" << m.labels_purchased << " accuracy=" << m.bootstrap_accuracy << " -> "
            << m.final_accuracy << " epsilon=" << m.epsilon << " delta=" << m.delta
            << (m.empty_pool ? " (empty pool)" : "") << "\n";
  return 0;
}

int cmd_sweep(const Flags& f) {
  ppal::RunConfig cfg;
  ppal::RunSelection sel;
  resolve(f, cfg, sel);
  const ppal::Corpus corpus = ppal::load_corpus(cfg);
  const auto runs = ppal::run_grid(cfg, corpus);
  ppal::emit_reports(cfg, runs, f.out_dir);
  std::size_t failed = 0;
  for (const auto& r : runs) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "cell beta=" << r.beta << " k=" << r.k << " seed=" << r.seed << " failed: " << r.error << "\n";
    }
  }
  std::cout << "sweep: " << runs.size() << " runs, " << failed << " failed, reports in " << f.out_dir << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_privacy_table(const Flags& f) {
  ppal::RunConfig cfg;
  ppal::RunSelection sel;
  resolve(f, cfg, sel);
  std::optional<ppal::Corpus> corpus;
  if (cfg.corpus_path) corpus = ppal::load_corpus(cfg);
  for (double d : cfg.table.deltas) warn_delta(d, corpus_size(cfg, corpus ? &*corpus : nullptr));
  const auto cells = ppal::privacy_table(cfg);
  std::filesystem::create_directories(f.out_dir);
  const auto path = std::filesystem::path(f.out_dir) / "privacy_table.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  ppal::write_grid_csv(out, cells);
  std::size_t shaded = 0;
  for (const auto& c : cells) shaded += c.satisfied;
  std::cout << "wrote " << path.string() << ": " << cells.size() << " cells, " << shaded << " satisfied\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving active learning: sketches, accountant and experiment harness"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("generate", "Write a synthetic corpus to <out-dir>/corpus.tsv");
  add_common(gen, f);
  gen->add_option("--seed", f.seeds, "Corpus seed")->expected(1);

  auto* run = app.add_subcommand("run", "One active-learning run at a single (beta, k, seed)");
  add_common(run, f);
  add_learning(run, f);
  run->add_option("--beta", f.betas, "Sampling rate")->expected(1);
  run->add_option("--k", f.ks, "Anonymity threshold")->expected(1);
  run->add_option("--seed", f.seeds, "Master seed")->expected(1);

  auto* sweep = app.add_subcommand("sweep", "Grid over betas x ks x seeds; writes CSV and JSON reports");
  add_common(sweep, f);
  add_learning(sweep, f);
  sweep->add_option("--beta", f.betas, "Sampling rates (repeatable)");
  sweep->add_option("--k", f.ks, "Anonymity thresholds (repeatable)");
  sweep->add_option("--seed", f.seeds, "Master seeds (repeatable)");

  auto* table = app.add_subcommand("privacy-table", "Write the (epsilon, delta) x beta x k guarantee grid");
  add_common(table, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(f);
    if (*run) return cmd_run(f);
    if (*sweep) return cmd_sweep(f);
    if (*table) return cmd_privacy_table(f);
  } catch (const ppal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
