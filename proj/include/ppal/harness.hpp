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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "ppal/annotator.hpp"
#include "ppal/cmm.hpp"
#include "ppal/error.hpp"
#include "ppal/hll.hpp"
#include "ppal/learner.hpp"
#include "ppal/pipeline.hpp"
#include "ppal/privacy.hpp"
#include "ppal/stats.hpp"
#include "ppal/truth.hpp"
#include "ppal/workload.hpp"

namespace ppal {

enum class FrequencyScope { kFullStream, kSubsample };

struct PrivacyTableConfig {
  std::vector<double> epsilons{0.25, 0.5, 0.75, 1.0};
  std::vector<double> deltas{1e-6, 1e-9, 1e-12, 1e-15};
  std::vector<double> betas{0.1, 0.3, 0.6, 0.9};
  std::vector<std::int64_t> ks{20, 100, 200, 500};
};

struct RunConfig {
  std::optional<std::string> corpus_path;
  CorpusSpec corpus;
  std::vector<double> betas{0.1, 0.3, 0.6, 0.9};
  std::vector<std::int64_t> ks{1, 20, 100, 200, 500};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::int64_t bootstrap_size = 100;
  std::int64_t eval_size = 0;  // 0: eval_fraction of the distinct queries
  double eval_fraction = 0.1;
  Strategy strategy = Strategy::kLeastConfidence;
  LearnerOptions learner;
  double accuracy_mean = 0.65;
  double accuracy_sd = 0.01;
  std::int64_t budget_cap = 0;  // 0: until the pool is exhausted
  std::int64_t eval_interval = 250;
  int hll_precision = HllSketch::kDefaultPrecision;
  std::size_t cmm_depth = CountMeanMinSketch::kDefaultDepth;
  std::size_t cmm_width = CountMeanMinSketch::kDefaultWidth;
  FrequencyScope frequency_scope = FrequencyScope::kFullStream;
  double target_epsilon = 1.0;
  std::int64_t n_max = kDefaultNMax;
  unsigned threads = 0;  // 0: hardware concurrency
  PrivacyTableConfig table;

  void validate() const {
    if (betas.empty() || ks.empty() || seeds.empty()) throw ConfigError("betas, ks and seeds must be non-empty");
    for (double b : betas) {
      if (!(b > 0.0 && b <= 1.0)) throw ConfigError("beta must be in (0, 1]");
    }
    for (auto k : ks) {
      if (k < 1) throw ConfigError("k must be >= 1");
    }
    if (bootstrap_size < 2) throw ConfigError("bootstrap_size must be >= 2");
    if (eval_size < 0) throw ConfigError("eval_size must be >= 0");
    if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) throw ConfigError("eval_fraction must be in (0, 1)");
    if (budget_cap < 0) throw ConfigError("budget_cap must be >= 0");
    if (eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
    if (!(target_epsilon >= 0.0)) throw ConfigError("target_epsilon must be >= 0");
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    learner.validate();
    OracleConfig{accuracy_mean, accuracy_sd, 0}.validate();
    HllSketch probe(hll_precision);
    (void)probe;
    if (cmm_depth < 1 || cmm_width < 2) throw ConfigError("CMM needs depth >= 1 and width >= 2");
    if (!corpus_path) corpus.validate();
  }
};

struct CurvePoint {
  std::int64_t budget;
  double accuracy;  // percent
};

struct RunMetrics {
  double beta = 1.0;
  std::int64_t k = 1;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double delta = 1.0;
  std::vector<CurvePoint> accuracy_curve;
  double bootstrap_accuracy = 0.0;
  double final_accuracy = 0.0;
  std::int64_t labels_purchased = 0;
  std::int64_t annotator_ledger = 0;
  std::int64_t releases = 0;
  std::int64_t learner_updates = 0;
  std::int64_t pool_size = 0;
  std::int64_t expected_pool_size = 0;
  double distinct_estimate = 0.0;
  std::int64_t below_k_releases = 0;  // released with true frequency < k
  std::uint64_t hll_seed = 0;
  std::uint64_t cmm_seed = 0;
  bool empty_pool = false;
  std::string error;
  double wall_time = 0.0;  // seconds
  std::vector<ReleaseRecord> release_log;

  bool ok() const { return error.empty(); }
  bool budget_identity() const {
    return labels_purchased == annotator_ledger && labels_purchased == learner_updates &&
           labels_purchased == releases;
  }
};

inline double percent_correct(const Model& model, std::span<const SparseVector> xs,
                              std::span<const Label> ys) {
  if (xs.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) hit += model.predict(xs[i]) == ys[i];
  return 100.0 * static_cast<double>(hit) / static_cast<double>(xs.size());
}

// Everything a seed shares across its (beta, k) cells: the data split, the
// sketches and the bootstrapped model.
class SeedContext {
 public:
  SeedContext(const RunConfig& cfg, const Corpus& corpus, std::uint64_t seed)
      : cfg_(cfg), corpus_(corpus), seed_(seed),
        hll_(cfg.hll_precision, derive_seed(seed, "hll")),
        cmm_(cfg.cmm_depth, cfg.cmm_width, derive_seed(seed, "cmm")) {
    const std::size_t n = corpus.queries.size();
    const auto n_eval = static_cast<std::size_t>(
        cfg.eval_size > 0 ? cfg.eval_size
                          : std::llround(cfg.eval_fraction * static_cast<double>(n)));
    const auto n_gold = static_cast<std::size_t>(cfg.bootstrap_size);
    if (n_eval + n_gold >= n) {
      throw ConfigError("eval (" + std::to_string(n_eval) + ") plus bootstrap (" +
                        std::to_string(n_gold) + ") leaves no candidates among " +
                        std::to_string(n) + " distinct queries");
    }
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    Rng(derive_seed(seed, "split")).shuffle(order);

    role_.assign(n, Role::kCandidate);
    for (std::size_t i = 0; i < n_eval; ++i) {
      role_[order[i]] = Role::kEval;
      const auto& q = corpus.queries[order[i]];
      eval_labels_.push_back(GroundTruth::label(q));
    }
    std::vector<LabeledQuery> golden;
    for (std::size_t i = n_eval; i < n_eval + n_gold; ++i) {
      role_[order[i]] = Role::kGolden;
      const auto& q = corpus.queries[order[i]];
      golden.push_back({q, GroundTruth::label(q)});
    }

    true_freq_ = corpus.frequencies();
    for (const auto i : corpus.stream) {
      cmm_.update(corpus.queries[i].text());
      if (role_[i] == Role::kCandidate) {
        al_stream_.push_back(i);
        hll_.insert(corpus.queries[i].text());
      }
    }

    model_ = std::make_unique<Model>(Model::bootstrap(golden, cfg.learner, derive_seed(seed, "model")));
    for (std::size_t i = 0; i < n_eval; ++i) eval_x_.push_back(model_->featurize(corpus.queries[order[i]]));
    bootstrap_accuracy_ = percent_correct(*model_, eval_x_, eval_labels_);
  }

  RunMetrics run(double beta, std::int64_t k) const {
    const auto t0 = std::chrono::steady_clock::now();
    RunMetrics m;
    m.beta = beta;
    m.k = k;
    m.seed = seed_;
    try {
      run_into(m);
    } catch (const std::exception& e) {
      m.error = e.what();
    }
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
  }

  const HllSketch& hll() const { return hll_; }
  const CountMeanMinSketch& cmm() const { return cmm_; }
  const Model& bootstrap_model() const { return *model_; }
  double bootstrap_accuracy() const { return bootstrap_accuracy_; }
  std::span<const std::uint32_t> al_stream() const { return al_stream_; }
  std::span<const std::int64_t> true_frequencies() const { return true_freq_; }

 private:
  enum class Role : std::uint8_t { kCandidate, kEval, kGolden };

  void run_into(RunMetrics& m) const {
    const double beta = m.beta;
    const std::int64_t k = m.k;
    m.epsilon = cfg_.target_epsilon;
    m.delta = base_delta_for_k(k, beta, cfg_.target_epsilon, std::max(cfg_.n_max, k));
    m.bootstrap_accuracy = bootstrap_accuracy_;
    m.distinct_estimate = hll_.estimate();
    m.hll_seed = hll_.hash_seed();
    m.cmm_seed = cmm_.seed();
    m.expected_pool_size = expected_pool_size(hll_, beta);

    const auto sample = subsample(std::span<const std::uint32_t>(al_stream_), beta,
                                  derive_seed(seed_, "sample"));
    std::vector<Query> distinct;
    {
      std::unordered_set<std::uint32_t> seen;
      for (auto i : sample) {
        if (seen.insert(i).second) distinct.push_back(corpus_.queries[i]);
      }
    }
    std::optional<CountMeanMinSketch> local;
    if (cfg_.frequency_scope == FrequencyScope::kSubsample) {
      local.emplace(cfg_.cmm_depth, cfg_.cmm_width, derive_seed(seed_, "cmm"));
      for (auto i : sample) local->update(corpus_.queries[i].text());
    }
    const CountMeanMinSketch& freq = local ? *local : cmm_;

    Model model = *model_;
    const Strategy strategy = cfg_.strategy;
    RankedExamplePool pool = build_pool(
        distinct, k, freq,
        [&](const Query& q) {
          PoolScore s;
          s.features = model.featurize(q);
          const auto [mean, var] = model.mean_and_variance(s.features);
          s.phi = var;
          s.uncertainty = acquisition_score(strategy, mean, var);
          return s;
        },
        beta);
    m.pool_size = static_cast<std::int64_t>(pool.size());
    m.empty_pool = pool.size() == 0;

    std::unordered_map<std::uint64_t, std::uint32_t> index_of;
    for (auto i : sample) index_of.emplace(corpus_.queries[i].hash(), i);

    Annotator oracle({cfg_.accuracy_mean, cfg_.accuracy_sd, derive_seed(seed_, "oracle")});
    ReleaseLedger ledger;
    m.accuracy_curve.push_back({0, bootstrap_accuracy_});
    std::int64_t purchased = 0;
    while (!pool.empty() && (cfg_.budget_cap == 0 || purchased < cfg_.budget_cap)) {
      const auto pick = next_example(pool, model, strategy);
      if (!pick) break;
      const PoolEntry& entry = pool.take(*pick);
      const Query released = ledger.release(entry, k, beta, purchased + 1);
      const Label y = oracle.annotate(released);
      model.update(released, entry.features, y);
      ++purchased;
      if (true_freq_[index_of.at(released.hash())] < k) ++m.below_k_releases;
      if (purchased % cfg_.eval_interval == 0) {
        m.accuracy_curve.push_back({purchased, percent_correct(model, eval_x_, eval_labels_)});
      }
    }
    model.finalize();
    const double final_acc = percent_correct(model, eval_x_, eval_labels_);
    if (m.accuracy_curve.back().budget == purchased) {
      m.accuracy_curve.back().accuracy = final_acc;
    } else {
      m.accuracy_curve.push_back({purchased, final_acc});
    }
    m.final_accuracy = final_acc;
    m.labels_purchased = purchased;
    m.annotator_ledger = oracle.ledger().labels_purchased;
    m.releases = static_cast<std::int64_t>(ledger.count());
    m.learner_updates = static_cast<std::int64_t>(model.update_count());
    m.release_log.assign(ledger.records().begin(), ledger.records().end());
    if (!m.budget_identity()) throw LedgerError("budget accounting identity violated");
  }

  const RunConfig& cfg_;
  const Corpus& corpus_;
  std::uint64_t seed_;
  HllSketch hll_;
  CountMeanMinSketch cmm_;
  std::vector<Role> role_;
  std::vector<std::int64_t> true_freq_;
  std::vector<std::uint32_t> al_stream_;
  std::unique_ptr<Model> model_;
  std::vector<SparseVector> eval_x_;
  std::vector<Label> eval_labels_;
  double bootstrap_accuracy_ = 0.0;
};

inline Corpus load_corpus(const RunConfig& cfg) {
  if (cfg.corpus_path) {
    std::ifstream in(*cfg.corpus_path);
    if (!in) throw ConfigError("cannot open corpus file " + *cfg.corpus_path);
    Corpus c = read_corpus(in);
    if (c.queries.empty()) throw ConfigError("corpus file " + *cfg.corpus_path + " is empty");
    return c;
  }
  return generate(cfg.corpus);
}

inline RunMetrics run_single(const RunConfig& cfg, const Corpus& corpus, double beta,
                             std::int64_t k, std::uint64_t seed) {
  cfg.validate();
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
  if (k < 1) throw ConfigError("k must be >= 1");
  SeedContext ctx(cfg, corpus, seed);
  return ctx.run(beta, k);
}

// Cartesian sweep. Seeds are distributed over worker threads; every cell owns
// its state, so results do not depend on the thread count. A failing cell is
// recorded and the sweep continues.
inline std::vector<RunMetrics> run_grid(const RunConfig& cfg, const Corpus& corpus) {
  cfg.validate();
  const std::size_t per_seed = cfg.betas.size() * cfg.ks.size();
  std::vector<RunMetrics> out(cfg.seeds.size() * per_seed);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s; (s = next.fetch_add(1)) < cfg.seeds.size();) {
      const std::uint64_t seed = cfg.seeds[s];
      std::unique_ptr<SeedContext> ctx;
      std::string failure;
      try {
        ctx = std::make_unique<SeedContext>(cfg, corpus, seed);
      } catch (const std::exception& e) {
        failure = e.what();
      }
      std::size_t slot = s * per_seed;
      for (double beta : cfg.betas) {
        for (std::int64_t k : cfg.ks) {
          if (ctx) {
            out[slot] = ctx->run(beta, k);
          } else {
            out[slot].beta = beta;
            out[slot].k = k;
            out[slot].seed = seed;
            out[slot].error = failure;
          }
          ++slot;
        }
      }
    }
  };
  unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, cfg.seeds.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

struct CellSummary {
  double beta;
  std::int64_t k;
  std::size_t n_ok = 0;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;
  double mean_budget = 0.0;
  double sd_budget = 0.0;
  double mean_pool = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

inline std::vector<CellSummary> summarize(const RunConfig& cfg, std::span<const RunMetrics> runs) {
  std::vector<CellSummary> cells;
  for (double beta : cfg.betas) {
    for (std::int64_t k : cfg.ks) {
      CellSummary c{beta, k};
      std::vector<double> acc, budget, pool;
      for (const auto& r : runs) {
        if (r.beta != beta || r.k != k || !r.ok()) continue;
        acc.push_back(r.final_accuracy);
        budget.push_back(static_cast<double>(r.labels_purchased));
        pool.push_back(static_cast<double>(r.pool_size));
        c.epsilon = r.epsilon;
        c.delta = r.delta;
      }
      c.n_ok = acc.size();
      c.mean_accuracy = stats::mean(acc);
      c.sd_accuracy = stats::stddev(acc);
      c.mean_budget = stats::mean(budget);
      c.sd_budget = stats::stddev(budget);
      c.mean_pool = stats::mean(pool);
      cells.push_back(c);
    }
  }
  return cells;
}

struct TrendReport {
  std::vector<double> accuracy_rho_by_beta;   // Spearman(k, mean accuracy) per beta
  std::vector<double> budget_rho_k_by_beta;   // Spearman(k, mean budget) per beta
  std::vector<double> budget_rho_beta_by_k;   // Spearman(beta, mean budget) per k
  double first_quintile_gain = 0.0;
  double last_quintile_gain = 0.0;
  double saturation_beta = 0.0;
  std::int64_t saturation_k = 0;
};

inline const CellSummary& find_cell(std::span<const CellSummary> cells, double beta, std::int64_t k) {
  for (const auto& c : cells) {
    if (c.beta == beta && c.k == k) return c;
  }
  throw DomainError("no summary cell for the requested beta and k");
}

// Rank trends over the seed means, plus the saturation check on the curves of
// the configuration with the widest pool (largest beta, smallest k): accuracy
// gain over the first and the last fifth of each curve's budget, averaged
// over seeds.
inline TrendReport trends(const RunConfig& cfg, std::span<const RunMetrics> runs) {
  const auto cells = summarize(cfg, runs);
  TrendReport t;
  std::vector<double> ks_d(cfg.ks.begin(), cfg.ks.end());
  for (double beta : cfg.betas) {
    std::vector<double> acc, bud;
    for (auto k : cfg.ks) {
      acc.push_back(find_cell(cells, beta, k).mean_accuracy);
      bud.push_back(find_cell(cells, beta, k).mean_budget);
    }
    t.accuracy_rho_by_beta.push_back(cfg.ks.size() > 1 ? stats::spearman(ks_d, acc) : 0.0);
    t.budget_rho_k_by_beta.push_back(cfg.ks.size() > 1 ? stats::spearman(ks_d, bud) : 0.0);
  }
  for (auto k : cfg.ks) {
    std::vector<double> bud;
    for (double beta : cfg.betas) bud.push_back(find_cell(cells, beta, k).mean_budget);
    t.budget_rho_beta_by_k.push_back(cfg.betas.size() > 1 ? stats::spearman(cfg.betas, bud) : 0.0);
  }
  t.saturation_beta = *std::max_element(cfg.betas.begin(), cfg.betas.end());
  t.saturation_k = *std::min_element(cfg.ks.begin(), cfg.ks.end());
  std::vector<double> first, last;
  for (const auto& r : runs) {
    if (r.beta != t.saturation_beta || r.k != t.saturation_k || !r.ok()) continue;
    if (r.labels_purchased == 0) continue;
    std::vector<double> xs, ys;
    for (const auto& p : r.accuracy_curve) {
      xs.push_back(static_cast<double>(p.budget));
      ys.push_back(p.accuracy);
    }
    const double b = static_cast<double>(r.labels_purchased);
    auto at = [&](double f) { return stats::interpolate(xs, ys, f * b); };
    first.push_back(at(0.2) - at(0.0));
    last.push_back(at(1.0) - at(0.8));
  }
  t.first_quintile_gain = stats::mean(first);
  t.last_quintile_gain = stats::mean(last);
  return t;
}

namespace detail {
inline std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::ofstream open_report(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}
}  // namespace detail

inline std::vector<GuaranteeCell> privacy_table(const RunConfig& cfg,
                                                std::span<const CellSummary> cells = {}) {
  auto grid_cells = grid(cfg.table.betas, cfg.table.ks, cfg.table.epsilons, cfg.table.deltas, cfg.n_max);
  for (auto& g : grid_cells) {
    if (!g.satisfied) continue;
    for (const auto& c : cells) {
      if (c.beta == g.params.beta && c.k == g.params.k && c.n_ok > 0) g.accuracy = c.mean_accuracy;
    }
  }
  return grid_cells;
}

inline nlohmann::json metrics_json(const RunMetrics& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : r.accuracy_curve) curve.push_back({p.budget, p.accuracy});
  return {{"beta", r.beta},
          {"k", r.k},
          {"seed", r.seed},
          {"epsilon", r.epsilon},
          {"delta", r.delta},
          {"bootstrap_accuracy", r.bootstrap_accuracy},
          {"final_accuracy", r.final_accuracy},
          {"labels_purchased", r.labels_purchased},
          {"pool_size", r.pool_size},
          {"expected_pool_size", r.expected_pool_size},
          {"distinct_estimate", r.distinct_estimate},
          {"below_k_releases", r.below_k_releases},
          {"hll_seed", r.hll_seed},
          {"cmm_seed", r.cmm_seed},
          {"empty_pool", r.empty_pool},
          {"budget_identity", r.budget_identity()},
          {"accuracy_curve", curve},
          {"error", r.error},
          {"wall_time", r.wall_time}};
}

// accuracy_vs_k.csv, budget_vs_k.csv, budget_accuracy.csv, privacy_table.csv
// and summary.json. Timing appears only in the JSON, so the CSVs are a pure
// function of the configuration.
inline void emit_reports(const RunConfig& cfg, std::span<const RunMetrics> runs,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  using detail::fmt;
  const auto cells = summarize(cfg, runs);

  {
    auto out = detail::open_report(dir / "accuracy_vs_k.csv");
    out << "beta,k,n_seeds,mean_accuracy,sd_accuracy,epsilon,delta\n";
    for (const auto& c : cells) {
      out << fmt(c.beta) << ',' << c.k << ',' << c.n_ok << ',' << fmt(c.mean_accuracy, "%.4f") << ','
          << fmt(c.sd_accuracy, "%.4f") << ',' << fmt(c.epsilon) << ',' << fmt(c.delta, "%.6e") << '\n';
    }
  }
  {
    auto out = detail::open_report(dir / "budget_vs_k.csv");
    out << "beta,k,n_seeds,mean_labels,sd_labels,mean_pool_size\n";
    for (const auto& c : cells) {
      out << fmt(c.beta) << ',' << c.k << ',' << c.n_ok << ',' << fmt(c.mean_budget, "%.2f") << ','
          << fmt(c.sd_budget, "%.2f") << ',' << fmt(c.mean_pool, "%.2f") << '\n';
    }
  }
  {
    auto out = detail::open_report(dir / "budget_accuracy.csv");
    out << "beta,k,seed,budget,accuracy\n";
    for (const auto& r : runs) {
      for (const auto& p : r.accuracy_curve) {
        out << fmt(r.beta) << ',' << r.k << ',' << r.seed << ',' << p.budget << ','
            << fmt(p.accuracy, "%.4f") << '\n';
      }
    }
  }
  {
    auto out = detail::open_report(dir / "privacy_table.csv");
    write_grid_csv(out, privacy_table(cfg, cells));
  }
  {
    nlohmann::json j;
    nlohmann::json jruns = nlohmann::json::array();
    std::size_t failures = 0;
    std::int64_t below_k = 0;
    double wall = 0.0;
    for (const auto& r : runs) {
      jruns.push_back(metrics_json(r));
      failures += !r.ok();
      below_k += r.below_k_releases;
      wall += r.wall_time;
    }
    j["runs"] = jruns;
    j["failed_runs"] = failures;
    j["below_k_releases"] = below_k;
    j["wall_time"] = wall;
    if (failures < runs.size()) {
      const auto t = trends(cfg, runs);
      j["trends"] = {{"accuracy_spearman_k_by_beta", t.accuracy_rho_by_beta},
                     {"budget_spearman_k_by_beta", t.budget_rho_k_by_beta},
                     {"budget_spearman_beta_by_k", t.budget_rho_beta_by_k},
                     {"saturation_beta", t.saturation_beta},
                     {"saturation_k", t.saturation_k},
                     {"first_quintile_gain", t.first_quintile_gain},
                     {"last_quintile_gain", t.last_quintile_gain}};
    }
    std::ofstream out(dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << j.dump(2) << '\n';
  }
}

}  // namespace ppal
