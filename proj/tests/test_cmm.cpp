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
#include <string>
#include <unordered_map>
#include <vector>

#include "oracles.hpp"
#include "ppal/cmm.hpp"
#include "ppal/error.hpp"

namespace {

using ppal::CountMeanMinSketch;
using ppal::UpdateRule;

std::string key(std::uint32_t id) { return "item-" + std::to_string(id); }

struct Fed {
  CountMeanMinSketch sketch;
  std::unordered_map<std::uint32_t, std::int64_t> exact;
};

Fed feed_zipf(std::size_t d, std::size_t w, std::size_t updates, std::uint32_t universe, double s,
              std::uint64_t seed, UpdateRule rule = UpdateRule::kConservative) {
  const auto stream = oracle::zipf_stream(updates, universe, s, seed);
  Fed f{CountMeanMinSketch(d, w, seed * 31 + 7, rule), oracle::exact_counts(stream)};
  for (auto id : stream) f.sketch.update(key(id));
  return f;
}

TEST(Cmm, ConstructionBounds) {
  EXPECT_NO_THROW(CountMeanMinSketch(4, 2048));
  EXPECT_NO_THROW(CountMeanMinSketch(1, 16));
  EXPECT_THROW(CountMeanMinSketch(4, 1), ppal::ConfigError);
  EXPECT_THROW(CountMeanMinSketch(0, 16), ppal::ConfigError);
  CountMeanMinSketch s(4, 2048);
  EXPECT_EQ(s.stream_length(), 0u);
  for (auto c : s.counters()) ASSERT_EQ(c, 0u);
}

TEST(Cmm, FirstUpdateSetsAddressedCountersToOne) {
  CountMeanMinSketch s(4, 2048);
  s.update("a");
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(s.counter(r, "a"), 1u);
  EXPECT_EQ(s.stream_length(), 1u);
  std::uint64_t total = 0;
  for (auto c : s.counters()) total += c;
  EXPECT_EQ(total, 4u);
}

TEST(Cmm, EmptyAndSingleItemStreams) {
  CountMeanMinSketch s(4, 2048);
  EXPECT_EQ(s.estimate("never"), 0.0);
  for (int i = 0; i < 7; ++i) s.update("solo");
  EXPECT_EQ(s.estimate("solo"), 7.0);
  EXPECT_EQ(s.count_min("solo"), 7u);
}

TEST(Cmm, RepeatedItemWithoutCollisionsIsExact) {
  CountMeanMinSketch s(4, 16384);
  for (int i = 0; i < 5; ++i) s.update("a");
  s.update("b");
  s.update("c");
  for (std::size_t r = 0; r < 4; ++r) {
    ASSERT_NE(s.column(r, "a"), s.column(r, "b"));
    ASSERT_NE(s.column(r, "a"), s.column(r, "c"));
  }
  EXPECT_EQ(s.estimate("a"), 5.0);
}

TEST(Cmm, SingleRowCollisionStaysExact) {
  CountMeanMinSketch s(4, 64, 11);
  // Two items sharing their row-0 column and nothing else.
  std::string a = "x0", b;
  for (int i = 1; b.empty() && i < 100000; ++i) {
    const std::string c = "x" + std::to_string(i);
    bool ok = s.column(0, c) == s.column(0, a);
    for (std::size_t r = 1; r < 4; ++r) ok = ok && s.column(r, c) != s.column(r, a);
    if (ok) b = c;
  }
  ASSERT_FALSE(b.empty());
  for (int i = 0; i < 3; ++i) s.update(a);
  for (int i = 0; i < 5; ++i) s.update(b);
  EXPECT_EQ(s.count_min(a), 3u);
  EXPECT_EQ(s.count_min(b), 5u);
  EXPECT_EQ(s.estimate(a), 3.0);
  EXPECT_EQ(s.estimate(b), 5.0);
}

TEST(Cmm, TopItemsOfZipfStreamWithinTwoPercent) {
  const auto f = feed_zipf(4, 4096, 100000, 100000, 1.05, 5);
  std::vector<std::pair<std::int64_t, std::uint32_t>> top;
  for (const auto& [id, c] : f.exact) top.emplace_back(c, id);
  std::sort(top.rbegin(), top.rend());
  for (int i = 0; i < 10; ++i) {
    const double est = f.sketch.estimate(key(top[i].second));
    EXPECT_LE(std::abs(est - static_cast<double>(top[i].first)), 0.02 * static_cast<double>(top[i].first))
        << "rank " << i + 1;
  }
}

TEST(Cmm, CountMinNeverUnderestimates) {
  for (std::size_t w : {64u, 1024u, 16384u}) {
    for (auto rule : {UpdateRule::kConservative, UpdateRule::kPlain}) {
      const auto f = feed_zipf(4, w, 100000, 50000, 1.05, 9, rule);
      for (const auto& [id, c] : f.exact) {
        ASSERT_GE(f.sketch.count_min(key(id)), static_cast<std::uint64_t>(c)) << "w=" << w;
        ASSERT_LE(f.sketch.estimate(key(id)), static_cast<double>(f.sketch.count_min(key(id))));
      }
    }
  }
}

TEST(Cmm, ConservativeCountersNeverExceedPlain) {
  const auto stream = oracle::zipf_stream(50000, 20000, 1.0, 17);
  CountMeanMinSketch cons(4, 512, 3, UpdateRule::kConservative);
  CountMeanMinSketch plain(4, 512, 3, UpdateRule::kPlain);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    cons.update(key(stream[i]));
    plain.update(key(stream[i]));
    if (i % 997 == 0 || i + 1 == stream.size()) {
      const auto a = cons.counters();
      const auto b = plain.counters();
      for (std::size_t j = 0; j < a.size(); ++j) ASSERT_LE(a[j], b[j]);
    }
  }
}

double mean_abs_error(const Fed& f, bool deducted) {
  double err = 0.0;
  for (const auto& [id, c] : f.exact) {
    const double est = deducted ? f.sketch.estimate(key(id)) : static_cast<double>(f.sketch.count_min(key(id)));
    err += std::abs(est - static_cast<double>(c));
  }
  return err / static_cast<double>(f.exact.size());
}

// Aggregate over 20 seeds for streams where the sketch is sparse and where
// it is saturated.
TEST(Cmm, NoiseDeductionDoesNotIncreaseMeanAbsoluteError) {
  struct Regime {
    std::size_t w;
    std::uint32_t universe;
  };
  for (const Regime reg : {Regime{16384, 100000}, Regime{4096, 100000}, Regime{1024, 100000}}) {
    double with = 0.0, without = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto f = feed_zipf(4, reg.w, 100000, reg.universe, 1.05, seed);
      with += mean_abs_error(f, true);
      without += mean_abs_error(f, false);
    }
    EXPECT_LE(with, without) << "w=" << reg.w << " universe=" << reg.universe;
  }
}

TEST(Cmm, DoublingTheStreamDoublesHeavyHitters) {
  const auto stream = oracle::zipf_stream(50000, 50000, 1.05, 23);
  CountMeanMinSketch once(4, 16384, 1), twice(4, 16384, 1);
  for (auto id : stream) once.update(key(id));
  for (int rep = 0; rep < 2; ++rep) {
    for (auto id : stream) twice.update(key(id));
  }
  const auto exact = oracle::exact_counts(stream);
  for (const auto& [id, c] : exact) {
    if (c < 100) continue;
    const double e1 = once.estimate(key(id));
    const double e2 = twice.estimate(key(id));
    EXPECT_LE(std::abs(e1 - static_cast<double>(c)), 0.02 * static_cast<double>(c));
    EXPECT_LE(std::abs(e2 - 2.0 * static_cast<double>(c)), 0.02 * 2.0 * static_cast<double>(c));
  }
}

TEST(Cmm, SerializationRoundTrip) {
  auto f = feed_zipf(3, 300, 20000, 5000, 1.1, 4);
  const auto blob = f.sketch.serialize();
  ASSERT_EQ(blob.size(), 1u + 1u + 4u + 4u + 8u + 8u + 3u * 300u * 8u);
  const auto back = CountMeanMinSketch::deserialize(blob);
  EXPECT_TRUE(back == f.sketch);
  for (const auto& [id, c] : f.exact) ASSERT_EQ(back.estimate(key(id)), f.sketch.estimate(key(id)));
  auto truncated = blob;
  truncated.resize(blob.size() - 3);
  EXPECT_THROW(CountMeanMinSketch::deserialize(truncated), ppal::FormatError);
  auto bad_rule = blob;
  bad_rule[1] = 9;
  EXPECT_THROW(CountMeanMinSketch::deserialize(bad_rule), ppal::FormatError);
}

}  // namespace
