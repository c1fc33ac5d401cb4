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
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "ppal/cmm.hpp"
#include "ppal/error.hpp"
#include "ppal/features.hpp"
#include "ppal/hash.hpp"
#include "ppal/hll.hpp"
#include "ppal/query.hpp"
#include "ppal/rng.hpp"

namespace ppal {

// Bernoulli(beta) occurrence sampling in one pass, order preserved. The
// uniform sequence depends only on the seed, so for a fixed seed the sample
// at a smaller beta is a subset of the sample at a larger one.
template <typename T>
std::vector<T> subsample(std::span<const T> stream, double beta, std::uint64_t seed) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
  std::vector<T> kept;
  kept.reserve(static_cast<std::size_t>(beta * static_cast<double>(stream.size())) + 16);
  Rng rng(derive_seed(seed, "subsample"));
  for (const auto& item : stream) {
    if (rng.uniform() < beta) kept.push_back(item);
  }
  return kept;
}

inline std::int64_t expected_pool_size(double distinct_estimate, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
  const double x = beta * distinct_estimate;
  // Absorb representation error such as 0.1 * 58000 = 5800.000000000001.
  return static_cast<std::int64_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
}

inline std::int64_t expected_pool_size(const HllSketch& hll, double beta) {
  return expected_pool_size(hll.estimate(), beta);
}

struct PoolEntry {
  Query query;
  double score = 0.0;        // phi, prediction variance across members
  double uncertainty = 0.0;  // strategy score at pool construction
  SparseVector features;     // optional cache, may be empty
};

struct PoolScore {
  double phi = 0.0;
  double uncertainty = 0.0;
  SparseVector features;
};

using PoolScorer = std::function<PoolScore(const Query&)>;

// Candidate queries ordered by descending phi, ties by ascending query hash.
class RankedExamplePool {
 public:
  RankedExamplePool(std::vector<PoolEntry> entries, std::int64_t k, double beta)
      : entries_(std::move(entries)), taken_(entries_.size(), false), k_(k), beta_(beta),
        remaining_(entries_.size()) {
    std::sort(entries_.begin(), entries_.end(), [](const PoolEntry& a, const PoolEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.query.hash() < b.query.hash();
    });
  }

  std::span<const PoolEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t remaining() const { return remaining_; }
  bool empty() const { return remaining_ == 0; }
  bool available(std::size_t i) const { return !taken_[i]; }
  std::int64_t k() const { return k_; }
  double beta() const { return beta_; }

  // Removes entry i from further selection.
  const PoolEntry& take(std::size_t i) {
    if (taken_.at(i)) throw LedgerError("pool entry already taken");
    taken_[i] = true;
    --remaining_;
    return entries_[i];
  }

 private:
  std::vector<PoolEntry> entries_;
  std::vector<bool> taken_;
  std::int64_t k_;
  double beta_;
  std::size_t remaining_;
};

// Distinct sampled queries whose sketch frequency reaches k, scored and
// ranked. The sketch decides with the noise-deducted estimate, which never
// exceeds the count-min bound, so doubtful queries are rejected.
inline RankedExamplePool build_pool(std::span<const Query> sample, std::int64_t k,
                                    const CountMeanMinSketch& freq, const PoolScorer& scorer,
                                    double beta = 1.0) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::unordered_set<std::uint64_t> seen;
  std::vector<PoolEntry> entries;
  for (const auto& q : sample) {
    if (!seen.insert(q.hash()).second) continue;
    if (freq.estimate(q.text()) < static_cast<double>(k)) continue;
    PoolScore s = scorer(q);
    if (!(s.phi >= 0.0)) throw DomainError("pool score must be non-negative");
    entries.push_back({q, s.phi, s.uncertainty, std::move(s.features)});
  }
  return RankedExamplePool(std::move(entries), k, beta);
}

struct ReleaseRecord {
  std::uint64_t query_hash;
  double phi;
  std::int64_t k;
  double beta;
  std::int64_t step;
};

// One representative per distinct query leaves the system.
class ReleaseLedger {
 public:
  Query release(const PoolEntry& entry, std::int64_t k, double beta, std::int64_t step) {
    if (!released_.insert(entry.query.hash()).second) {
      throw LedgerError("query already released: " + entry.query.text());
    }
    records_.push_back({entry.query.hash(), entry.score, k, beta, step});
    return entry.query;
  }

  std::size_t count() const { return records_.size(); }
  std::span<const ReleaseRecord> records() const { return records_; }
  bool released(std::uint64_t query_hash) const { return released_.contains(query_hash); }

  void write_jsonl(std::ostream& out) const {
    for (const auto& r : records_) {
      nlohmann::json j{{"query_hash", r.query_hash}, {"phi", r.phi}, {"k", r.k},
                       {"beta", r.beta}, {"step", r.step}};
      out << j.dump() << '\n';
    }
  }

 private:
  std::unordered_set<std::uint64_t> released_;
  std::vector<ReleaseRecord> records_;
};

}  // namespace ppal
