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
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ppal/error.hpp"
#include "ppal/hash.hpp"
#include "ppal/query.hpp"
#include "ppal/rng.hpp"
#include "ppal/truth.hpp"

namespace ppal {

struct OracleConfig {
  double accuracy_mean = 0.65;
  double accuracy_sd = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(accuracy_sd >= 0.0)) throw ConfigError("accuracy_sd must be >= 0");
    if (!std::isfinite(accuracy_mean)) throw ConfigError("accuracy_mean must be finite");
  }
};

struct BudgetLedger {
  std::int64_t labels_purchased = 0;
  std::vector<std::pair<std::int64_t, std::uint64_t>> per_step_log;  // (step, query_hash)

  void write_jsonl(std::ostream& out) const {
    for (const auto& [step, hash] : per_step_log) {
      out << nlohmann::json{{"step", step}, {"query_hash", hash}}.dump() << '\n';
    }
  }
};

// Simulated crowd oracle. Each call draws its own correctness probability
// from N(mean, sd) clamped to [0, 1]. The random stream of a call is keyed by
// (seed, query, how many times that query was asked before), so a query gets
// the same answer in every run that asks it, whatever else was asked.
class Annotator {
 public:
  explicit Annotator(OracleConfig config) : config_(config) { config_.validate(); }

  Label annotate(const Query& q) {
    const Label truth = GroundTruth::label(q);
    const std::uint64_t repeat = asked_[q.hash()]++;
    Rng rng(derive_seed(config_.seed, "annotate", mix64(q.hash()) + repeat));
    const double p_correct =
        std::clamp(config_.accuracy_mean + config_.accuracy_sd * rng.normal(), 0.0, 1.0);
    const bool correct = rng.uniform() < p_correct;
    ++ledger_.labels_purchased;
    ledger_.per_step_log.emplace_back(ledger_.labels_purchased, q.hash());
    return correct ? truth : flip(truth);
  }

  const BudgetLedger& ledger() const { return ledger_; }
  const OracleConfig& config() const { return config_; }

 private:
  OracleConfig config_;
  BudgetLedger ledger_;
  std::unordered_map<std::uint64_t, std::uint64_t> asked_;
};

}  // namespace ppal
