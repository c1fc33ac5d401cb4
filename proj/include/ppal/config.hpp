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

#include <fstream>
#include <set>
#include <string>

#include "json.hpp"
#include "ppal/error.hpp"
#include "ppal/harness.hpp"

namespace ppal {

// Single-run selection read from the same JSON document as RunConfig.
struct RunSelection {
  double beta = 1.0;
  std::int64_t k = 1;
  std::uint64_t seed = 1;
};

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

}  // namespace detail

// Overlays a JSON object onto cfg and sel. Unknown keys and type mismatches
// raise ConfigError.
inline void apply_json(const nlohmann::json& j, RunConfig& cfg, RunSelection& sel) {
  using detail::json_get;
  detail::reject_unknown(
      j,
      {"corpus_path", "corpus", "betas", "ks", "seeds", "bootstrap_size", "eval_size",
       "eval_fraction", "strategy", "members", "feature_bits", "learning_rate", "l2", "epochs",
       "annotator_noise", "refit_interval", "accuracy_mean", "accuracy_sd", "budget_cap",
       "eval_interval", "hll_precision", "cmm_depth", "cmm_width", "frequency_scope",
       "target_epsilon", "n_max", "threads", "privacy_table", "beta", "k", "seed"},
      "");
  if (j.contains("corpus_path")) cfg.corpus_path = json_get<std::string>(j, "corpus_path");
  if (j.contains("corpus")) {
    const auto& c = j.at("corpus");
    detail::reject_unknown(c,
                           {"n_total", "n_distinct", "zipf_s", "positive_fraction",
                            "singleton_fraction", "seed", "vocabulary", "label_noise"},
                           "corpus.");
    if (c.contains("n_total")) cfg.corpus.n_total = json_get<std::int64_t>(c, "n_total");
    if (c.contains("n_distinct")) cfg.corpus.n_distinct_target = json_get<std::int64_t>(c, "n_distinct");
    if (c.contains("zipf_s")) cfg.corpus.zipf_s = json_get<double>(c, "zipf_s");
    if (c.contains("positive_fraction")) cfg.corpus.positive_fraction = json_get<double>(c, "positive_fraction");
    if (c.contains("singleton_fraction")) {
      cfg.corpus.singleton_fraction_target = json_get<double>(c, "singleton_fraction");
    }
    if (c.contains("seed")) cfg.corpus.seed = json_get<std::uint64_t>(c, "seed");
    if (c.contains("vocabulary")) cfg.corpus.vocabulary = json_get<std::int64_t>(c, "vocabulary");
    if (c.contains("label_noise")) cfg.corpus.label_noise = json_get<double>(c, "label_noise");
  }
  if (j.contains("betas")) cfg.betas = json_get<std::vector<double>>(j, "betas");
  if (j.contains("ks")) cfg.ks = json_get<std::vector<std::int64_t>>(j, "ks");
  if (j.contains("seeds")) cfg.seeds = json_get<std::vector<std::uint64_t>>(j, "seeds");
  if (j.contains("bootstrap_size")) cfg.bootstrap_size = json_get<std::int64_t>(j, "bootstrap_size");
  if (j.contains("eval_size")) cfg.eval_size = json_get<std::int64_t>(j, "eval_size");
  if (j.contains("eval_fraction")) cfg.eval_fraction = json_get<double>(j, "eval_fraction");
  if (j.contains("strategy")) cfg.strategy = parse_strategy(json_get<std::string>(j, "strategy"));
  if (j.contains("members")) cfg.learner.members = json_get<std::size_t>(j, "members");
  if (j.contains("feature_bits")) cfg.learner.feature_bits = json_get<int>(j, "feature_bits");
  if (j.contains("learning_rate")) cfg.learner.learning_rate = json_get<double>(j, "learning_rate");
  if (j.contains("l2")) cfg.learner.l2 = json_get<double>(j, "l2");
  if (j.contains("epochs")) cfg.learner.epochs = json_get<int>(j, "epochs");
  if (j.contains("annotator_noise")) cfg.learner.annotator_noise = json_get<double>(j, "annotator_noise");
  if (j.contains("refit_interval")) cfg.learner.refit_interval = json_get<std::size_t>(j, "refit_interval");
  if (j.contains("accuracy_mean")) cfg.accuracy_mean = json_get<double>(j, "accuracy_mean");
  if (j.contains("accuracy_sd")) cfg.accuracy_sd = json_get<double>(j, "accuracy_sd");
  if (j.contains("budget_cap")) cfg.budget_cap = json_get<std::int64_t>(j, "budget_cap");
  if (j.contains("eval_interval")) cfg.eval_interval = json_get<std::int64_t>(j, "eval_interval");
  if (j.contains("hll_precision")) cfg.hll_precision = json_get<int>(j, "hll_precision");
  if (j.contains("cmm_depth")) cfg.cmm_depth = json_get<std::size_t>(j, "cmm_depth");
  if (j.contains("cmm_width")) cfg.cmm_width = json_get<std::size_t>(j, "cmm_width");
  if (j.contains("frequency_scope")) {
    const auto s = json_get<std::string>(j, "frequency_scope");
    if (s == "full") cfg.frequency_scope = FrequencyScope::kFullStream;
    else if (s == "subsample") cfg.frequency_scope = FrequencyScope::kSubsample;
    else throw ConfigError("frequency_scope must be 'full' or 'subsample'");
  }
  if (j.contains("target_epsilon")) cfg.target_epsilon = json_get<double>(j, "target_epsilon");
  if (j.contains("n_max")) cfg.n_max = json_get<std::int64_t>(j, "n_max");
  if (j.contains("threads")) cfg.threads = json_get<unsigned>(j, "threads");
  if (j.contains("privacy_table")) {
    const auto& t = j.at("privacy_table");
    detail::reject_unknown(t, {"epsilons", "deltas", "betas", "ks"}, "privacy_table.");
    if (t.contains("epsilons")) cfg.table.epsilons = json_get<std::vector<double>>(t, "epsilons");
    if (t.contains("deltas")) cfg.table.deltas = json_get<std::vector<double>>(t, "deltas");
    if (t.contains("betas")) cfg.table.betas = json_get<std::vector<double>>(t, "betas");
    if (t.contains("ks")) cfg.table.ks = json_get<std::vector<std::int64_t>>(t, "ks");
  }
  if (j.contains("beta")) sel.beta = json_get<double>(j, "beta");
  if (j.contains("k")) sel.k = json_get<std::int64_t>(j, "k");
  if (j.contains("seed")) sel.seed = json_get<std::uint64_t>(j, "seed");
}

inline void apply_json_file(const std::string& path, RunConfig& cfg, RunSelection& sel) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  apply_json(j, cfg, sel);
}

}  // namespace ppal
