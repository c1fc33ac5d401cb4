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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "ppal/cmm.hpp"
#include "ppal/error.hpp"
#include "ppal/hll.hpp"
#include "ppal/pipeline.hpp"
#include "ppal/rng.hpp"

namespace {

std::vector<std::uint32_t> iota_stream(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

// Score each query by a fixed function of its text so tests control ordering.
ppal::PoolScorer fixed_scores(std::map<std::string, double> table, double fallback = 0.0) {
  return [table = std::move(table), fallback](const ppal::Query& q) {
    const auto it = table.find(q.text());
    return ppal::PoolScore{it == table.end() ? fallback : it->second, 0.0, {}};
  };
}

std::vector<ppal::Query> repeated(std::vector<std::pair<std::string, int>> spec) {
  std::vector<ppal::Query> out;
  for (const auto& [text, n] : spec) {
    for (int i = 0; i < n; ++i) out.emplace_back(text);
  }
  return out;
}

ppal::CountMeanMinSketch sketch_of(const std::vector<ppal::Query>& stream) {
  ppal::CountMeanMinSketch s;
  for (const auto& q : stream) s.update(q.text());
  return s;
}

TEST(Subsample, FullRateIsIdentity) {
  const auto s = iota_stream(1000);
  EXPECT_EQ(ppal::subsample(std::span<const std::uint32_t>(s), 1.0, 9), s);
}

TEST(Subsample, SizeWithinThreeSigma) {
  const auto s = iota_stream(200000);
  for (double beta : {0.1, 0.3, 0.6, 0.9}) {
    const auto kept = ppal::subsample(std::span<const std::uint32_t>(s), beta, 42);
    const double n = static_cast<double>(s.size());
    const double sd = std::sqrt(n * beta * (1.0 - beta));
    EXPECT_LE(std::abs(static_cast<double>(kept.size()) - n * beta), 3.0 * sd) << beta;
  }
}

TEST(Subsample, PreservesOrderAndIsDeterministic) {
  const auto s = iota_stream(5000);
  const auto a = ppal::subsample(std::span<const std::uint32_t>(s), 0.3, 7);
  EXPECT_EQ(a, ppal::subsample(std::span<const std::uint32_t>(s), 0.3, 7));
  EXPECT_NE(a, ppal::subsample(std::span<const std::uint32_t>(s), 0.3, 8));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(Subsample, SmallerRateIsNestedInLarger) {
  const auto s = iota_stream(20000);
  const auto small = ppal::subsample(std::span<const std::uint32_t>(s), 0.1, 3);
  const auto large = ppal::subsample(std::span<const std::uint32_t>(s), 0.6, 3);
  EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
}

TEST(Subsample, EachOccurrenceKeptIndependently) {
  // Every occurrence of one repeated item is a separate Bernoulli trial.
  const std::vector<std::uint32_t> s(100000, 5u);
  const auto kept = ppal::subsample(std::span<const std::uint32_t>(s), 0.5, 11);
  EXPECT_NEAR(static_cast<double>(kept.size()), 50000.0, 3.0 * std::sqrt(25000.0));
}

TEST(Subsample, RejectsInvalidRate) {
  const auto s = iota_stream(10);
  const std::span<const std::uint32_t> sp(s);
  EXPECT_THROW(ppal::subsample(sp, 0.0, 1), ppal::ConfigError);
  EXPECT_THROW(ppal::subsample(sp, 1.5, 1), ppal::ConfigError);
  EXPECT_THROW(ppal::subsample(sp, std::nan(""), 1), ppal::ConfigError);
}

TEST(ExpectedPoolSize, CeilingOfScaledEstimate) {
  EXPECT_EQ(ppal::expected_pool_size(58000.0, 0.1), 5800);
  EXPECT_EQ(ppal::expected_pool_size(1001.0, 0.5), 501);
  EXPECT_EQ(ppal::expected_pool_size(0.0, 0.5), 0);
  ppal::HllSketch h;
  for (int i = 0; i < 1000; ++i) h.insert("q" + std::to_string(i));
  EXPECT_EQ(ppal::expected_pool_size(h, 1.0), static_cast<std::int64_t>(std::ceil(h.estimate() - 1e-6)));
  EXPECT_THROW(ppal::expected_pool_size(h, 0.0), ppal::ConfigError);
}

TEST(BuildPool, KOneAdmitsEveryDistinctQuery) {
  const auto stream = repeated({{"a", 3}, {"b", 1}, {"c", 7}});
  const auto pool = ppal::build_pool(stream, 1, sketch_of(stream), fixed_scores({}));
  EXPECT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool.remaining(), 3u);
}

TEST(BuildPool, OnlyFrequentQueriesPass) {
  const auto stream = repeated({{"play music", 150}, {"rare query", 3}});
  const auto pool = ppal::build_pool(stream, 100, sketch_of(stream), fixed_scores({}));
  ASSERT_EQ(pool.size(), 1u);
  EXPECT_EQ(pool.entries()[0].query.text(), "play music");
  EXPECT_EQ(pool.k(), 100);
}

TEST(BuildPool, KAboveMaxFrequencyIsEmpty) {
  const auto stream = repeated({{"play music", 150}, {"rare query", 3}});
  const auto pool = ppal::build_pool(stream, 151, sketch_of(stream), fixed_scores({}));
  EXPECT_TRUE(pool.empty());
  EXPECT_EQ(pool.size(), 0u);
}

TEST(BuildPool, AdmittedSetMatchesExactCountsWhenSketchIsCollisionFree) {
  std::vector<ppal::Query> stream;
  std::map<std::string, int> truth;
  for (int i = 0; i < 60; ++i) {
    const std::string t = "query " + std::to_string(i);
    truth[t] = i;
    for (int j = 0; j < i; ++j) stream.emplace_back(t);
  }
  const auto sketch = sketch_of(stream);
  for (std::int64_t k : {1, 10, 30, 59}) {
    const auto pool = ppal::build_pool(stream, k, sketch, fixed_scores({}));
    std::size_t want = 0;
    for (const auto& [t, n] : truth) want += n >= k;
    EXPECT_EQ(pool.size(), want) << k;
    for (const auto& e : pool.entries()) EXPECT_GE(truth.at(e.query.text()), k);
  }
}

TEST(BuildPool, OrderedByScoreThenHash) {
  const auto stream = repeated({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}});
  const auto pool =
      ppal::build_pool(stream, 1, sketch_of(stream), fixed_scores({{"a", 0.1}, {"b", 0.7}, {"c", 0.1}, {"d", 0.9}}, 0.1));
  const auto e = pool.entries();
  ASSERT_EQ(e.size(), 5u);
  EXPECT_EQ(e[0].query.text(), "d");
  EXPECT_EQ(e[1].query.text(), "b");
  for (std::size_t i = 2; i + 1 < e.size(); ++i) {
    EXPECT_EQ(e[i].score, 0.1);
    EXPECT_LT(e[i].query.hash(), e[i + 1].query.hash());
  }
}

TEST(BuildPool, InputOrderDoesNotChangeRanking) {
  std::vector<ppal::Query> stream;
  ppal::Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const int reps = 1 + static_cast<int>(rng.below(5));
    for (int j = 0; j < reps; ++j) stream.emplace_back("item" + std::to_string(i));
  }
  auto scorer = [](const ppal::Query& q) {
    return ppal::PoolScore{static_cast<double>(q.hash() % 7), 0.0, {}};
  };
  const auto sketch = sketch_of(stream);
  const auto base = ppal::build_pool(stream, 3, sketch, scorer);
  auto shuffled = stream;
  ppal::Rng(99).shuffle(shuffled);
  const auto other = ppal::build_pool(shuffled, 3, sketch, scorer);
  ASSERT_EQ(base.size(), other.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(base.entries()[i].query, other.entries()[i].query);
  }
}

TEST(BuildPool, BijectiveRenamingKeepsPoolSize) {
  std::vector<ppal::Query> stream, renamed;
  ppal::Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const int reps = 1 + static_cast<int>(rng.below(40));
    for (int j = 0; j < reps; ++j) {
      stream.emplace_back("original-" + std::to_string(i));
      renamed.emplace_back("renamed#" + std::to_string(i * 7919));
    }
  }
  for (double beta : {0.3, 1.0}) {
    for (std::int64_t k : {1, 5, 20}) {
      const auto s1 = ppal::subsample(std::span<const ppal::Query>(stream), beta, 4);
      const auto s2 = ppal::subsample(std::span<const ppal::Query>(renamed), beta, 4);
      const auto p1 = ppal::build_pool(s1, k, sketch_of(stream), fixed_scores({}));
      const auto p2 = ppal::build_pool(s2, k, sketch_of(renamed), fixed_scores({}));
      EXPECT_EQ(p1.size(), p2.size()) << beta << ' ' << k;
    }
  }
}

TEST(BuildPool, RejectsNegativeScoreAndBadK) {
  const auto stream = repeated({{"x", 2}});
  const auto sketch = sketch_of(stream);
  EXPECT_THROW(ppal::build_pool(stream, 1, sketch, fixed_scores({{"x", -1.0}})), ppal::DomainError);
  EXPECT_THROW(ppal::build_pool(stream, 0, sketch, fixed_scores({})), ppal::ConfigError);
}

TEST(RankedPool, TakeRemovesEntryOnce) {
  const auto stream = repeated({{"a", 1}, {"b", 1}});
  auto pool = ppal::build_pool(stream, 1, sketch_of(stream), fixed_scores({}));
  pool.take(0);
  EXPECT_FALSE(pool.available(0));
  EXPECT_EQ(pool.remaining(), 1u);
  EXPECT_THROW(pool.take(0), ppal::LedgerError);
  pool.take(1);
  EXPECT_TRUE(pool.empty());
}

TEST(ReleaseLedger, OneReleasePerDistinctQuery) {
  const auto stream = repeated({{"play music", 150}});
  const auto pool = ppal::build_pool(stream, 100, sketch_of(stream), fixed_scores({}));
  ppal::ReleaseLedger ledger;
  const auto q = ledger.release(pool.entries()[0], 100, 1.0, 0);
  EXPECT_EQ(q.text(), "play music");
  EXPECT_EQ(ledger.count(), 1u);
  EXPECT_THROW(ledger.release(pool.entries()[0], 100, 1.0, 1), ppal::LedgerError);
  EXPECT_EQ(ledger.count(), 1u);
}

TEST(ReleaseLedger, TenDistinctEntries) {
  std::vector<std::pair<std::string, int>> spec;
  for (int i = 0; i < 10; ++i) spec.push_back({"q" + std::to_string(i), 2});
  const auto stream = repeated(spec);
  const auto pool = ppal::build_pool(stream, 2, sketch_of(stream), fixed_scores({}));
  ppal::ReleaseLedger ledger;
  for (std::size_t i = 0; i < pool.size(); ++i) ledger.release(pool.entries()[i], 2, 0.5, static_cast<std::int64_t>(i));
  EXPECT_EQ(ledger.count(), 10u);
}

TEST(ReleaseLedger, JsonLines) {
  const ppal::PoolEntry entry{ppal::Query("hello"), 0.25, 0.0, {}};
  ppal::ReleaseLedger ledger;
  ledger.release(entry, 20, 0.3, 4);
  std::ostringstream out;
  ledger.write_jsonl(out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j.at("query_hash").get<std::uint64_t>(), ppal::Query("hello").hash());
  EXPECT_EQ(j.at("phi").get<double>(), 0.25);
  EXPECT_EQ(j.at("k").get<std::int64_t>(), 20);
  EXPECT_EQ(j.at("beta").get<double>(), 0.3);
  EXPECT_EQ(j.at("step").get<std::int64_t>(), 4);
}

}  // namespace
