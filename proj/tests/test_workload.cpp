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
#include <functional>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "ppal/error.hpp"
#include "ppal/truth.hpp"
#include "ppal/workload.hpp"

namespace {

const ppal::Corpus& default_corpus() {
  static const ppal::Corpus c = ppal::generate(ppal::CorpusSpec{});
  return c;
}

// Largest gap between the occurrence-weighted rank CDF and truncated Zipf(s).
double rank_ks_distance(std::vector<std::int64_t> f, double s) {
  std::sort(f.begin(), f.end(), std::greater<>());
  double total = 0.0, norm = 0.0;
  for (std::size_t r = 0; r < f.size(); ++r) {
    total += static_cast<double>(f[r]);
    norm += std::pow(static_cast<double>(r + 1), -s);
  }
  double emp = 0.0, model = 0.0, worst = 0.0;
  for (std::size_t r = 0; r < f.size(); ++r) {
    emp += static_cast<double>(f[r]) / total;
    model += std::pow(static_cast<double>(r + 1), -s) / norm;
    worst = std::max(worst, std::abs(emp - model));
  }
  return worst;
}

TEST(Workload, AllSingletonsWhenTotalsMatch) {
  ppal::CorpusSpec spec;
  spec.n_total = 1000;
  spec.n_distinct_target = 1000;
  const auto c = ppal::generate(spec);
  EXPECT_EQ(c.stream.size(), 1000u);
  EXPECT_EQ(c.queries.size(), 1000u);
  EXPECT_DOUBLE_EQ(c.singleton_fraction(), 1.0);
}

TEST(Workload, DefaultSizesAreExact) {
  const auto& c = default_corpus();
  EXPECT_EQ(c.stream.size(), 250000u);
  EXPECT_EQ(c.queries.size(), 5800u);
  std::unordered_set<std::string> texts;
  for (const auto& q : c.queries) texts.insert(q.text());
  EXPECT_EQ(texts.size(), 5800u);
  for (auto f : c.frequencies()) EXPECT_GE(f, 1);
}

TEST(Workload, DefaultSingletonFractionNearTarget) {
  const double frac = default_corpus().singleton_fraction();
  EXPECT_GE(frac, 0.55);
  EXPECT_LE(frac, 0.65);
}

TEST(Workload, PositiveFractionWithinThreeSigma) {
  const auto& c = default_corpus();
  std::size_t pos = 0;
  for (const auto& q : c.queries) pos += ppal::GroundTruth::label(q) == ppal::Label::kPositive;
  const double n = static_cast<double>(c.queries.size());
  const double frac = static_cast<double>(pos) / n;
  EXPECT_LE(std::abs(frac - 0.63), 3.0 * std::sqrt(0.63 * 0.37 / n));
}

TEST(Workload, RankFrequenciesFollowFittedZipf) {
  const auto& c = default_corpus();
  EXPECT_GT(c.zipf_s, 0.0);
  EXPECT_LE(rank_ks_distance(c.frequencies(), c.zipf_s), 0.05);
}

TEST(Workload, FixedExponentIsHonoured) {
  ppal::CorpusSpec spec;
  spec.n_total = 20000;
  spec.n_distinct_target = 2000;
  spec.zipf_s = 1.1;
  const auto c = ppal::generate(spec);
  EXPECT_EQ(c.zipf_s, 1.1);
  EXPECT_EQ(c.stream.size(), 20000u);
  EXPECT_LE(rank_ks_distance(c.frequencies(), 1.1), 0.05);
}

TEST(Workload, MultiplicitiesSumExactly) {
  for (double s : {0.5, 1.0, 2.0}) {
    const auto f = ppal::zipf_multiplicities(10007, 999, s);
    std::int64_t sum = 0;
    for (auto x : f) sum += x;
    EXPECT_EQ(sum, 10007);
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end(), std::greater<>()));
  }
}

TEST(Workload, InfeasibleSpecIsConfigError) {
  ppal::CorpusSpec spec;
  spec.n_total = 6000;
  spec.n_distinct_target = 5800;
  EXPECT_THROW(ppal::generate(spec), ppal::ConfigError);
  spec.n_total = 100;
  spec.n_distinct_target = 200;
  EXPECT_THROW(ppal::generate(spec), ppal::ConfigError);
  spec = {};
  spec.positive_fraction = 1.0;
  EXPECT_THROW(ppal::generate(spec), ppal::ConfigError);
}

TEST(Workload, DeterministicPerSeed) {
  ppal::CorpusSpec spec;
  spec.n_total = 30000;
  spec.n_distinct_target = 1500;
  const auto a = ppal::generate(spec);
  const auto b = ppal::generate(spec);
  spec.seed = 2;
  const auto c = ppal::generate(spec);
  EXPECT_EQ(a.stream, b.stream);
  EXPECT_EQ(a.queries, b.queries);
  EXPECT_NE(a.queries, c.queries);
}

TEST(Workload, TsvRoundTrip) {
  ppal::CorpusSpec spec;
  spec.n_total = 5000;
  spec.n_distinct_target = 400;
  const auto c = ppal::generate(spec);
  std::stringstream io;
  ppal::write_corpus(io, c);
  const auto r = ppal::read_corpus(io);
  ASSERT_EQ(r.stream.size(), c.stream.size());
  for (std::size_t i = 0; i < c.stream.size(); ++i) {
    const auto& a = c.queries[c.stream[i]];
    const auto& b = r.queries[r.stream[i]];
    EXPECT_EQ(a.text(), b.text());
    EXPECT_EQ(ppal::GroundTruth::label(a), ppal::GroundTruth::label(b));
  }
  EXPECT_EQ(r.queries.size(), c.queries.size());
}

TEST(Workload, ReaderRejectsMalformedLines) {
  std::istringstream no_tab("hello world\n");
  EXPECT_THROW(ppal::read_corpus(no_tab), ppal::FormatError);
  std::istringstream bad_label("hello\tMaybe\n");
  EXPECT_THROW(ppal::read_corpus(bad_label), ppal::FormatError);
  std::istringstream conflict("hello\tPositive\nhello\tNegative\n");
  EXPECT_THROW(ppal::read_corpus(conflict), ppal::FormatError);
  std::istringstream crlf("hello\tPositive\r\n\nhi\tNegative\n");
  EXPECT_EQ(ppal::read_corpus(crlf).stream.size(), 2u);
}

}  // namespace
