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
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ppal/error.hpp"
#include "ppal/hash.hpp"
#include "ppal/query.hpp"
#include "ppal/rng.hpp"
#include "ppal/truth.hpp"

namespace ppal {

struct CorpusSpec {
  std::int64_t n_total = 250'000;
  std::int64_t n_distinct_target = 5'800;
  double zipf_s = 0.0;  // 0: calibrate to singleton_fraction_target
  double positive_fraction = 0.63;
  double singleton_fraction_target = 0.60;
  std::uint64_t seed = 1;
  std::int64_t vocabulary = 3'000;
  double label_noise = 0.3;  // sd of the per-query score perturbation

  void validate() const {
    if (n_distinct_target < 1) throw ConfigError("n_distinct_target must be >= 1");
    if (n_distinct_target > n_total) {
      throw ConfigError("n_distinct_target (" + std::to_string(n_distinct_target) +
                        ") exceeds n_total (" + std::to_string(n_total) + ")");
    }
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) {
      throw ConfigError("positive_fraction must be in (0, 1)");
    }
    if (!(singleton_fraction_target > 0.0 && singleton_fraction_target < 1.0)) {
      throw ConfigError("singleton_fraction_target must be in (0, 1)");
    }
    if (zipf_s < 0.0) throw ConfigError("zipf_s must be >= 0");
    if (vocabulary < 8) throw ConfigError("vocabulary must be >= 8");
  }
};

struct Corpus {
  std::vector<Query> queries;         // distinct, labelled
  std::vector<std::uint32_t> stream;  // occurrence -> index into queries
  double zipf_s = 0.0;

  std::vector<std::int64_t> frequencies() const {
    std::vector<std::int64_t> f(queries.size(), 0);
    for (auto i : stream) ++f[i];
    return f;
  }

  double singleton_fraction() const {
    const auto f = frequencies();
    if (f.empty()) return 0.0;
    return static_cast<double>(std::count(f.begin(), f.end(), 1)) / static_cast<double>(f.size());
  }
};

// Rank-frequency counts f_r = max(1, round(C r^-s)), r = 1..n_distinct, with
// C the largest scale whose total fits n_total. The shortfall goes to rank 1
// so the total is exact.
inline std::vector<std::int64_t> zipf_multiplicities(std::int64_t n_total, std::int64_t n_distinct,
                                                     double s) {
  if (n_distinct < 1 || n_distinct > n_total) throw ConfigError("need 1 <= n_distinct <= n_total");
  std::vector<double> log_rank(static_cast<std::size_t>(n_distinct));
  for (std::size_t r = 0; r < log_rank.size(); ++r) log_rank[r] = std::log(static_cast<double>(r + 1));
  auto fill = [&](double log_c, std::vector<std::int64_t>& f) {
    std::int64_t sum = 0;
    for (std::size_t r = 0; r < f.size(); ++r) {
      f[r] = std::max<std::int64_t>(1, std::llround(std::exp(log_c - s * log_rank[r])));
      sum += f[r];
    }
    return sum;
  };
  std::vector<std::int64_t> f(log_rank.size());
  double lo = 0.0;
  double hi = std::log(static_cast<double>(n_total)) + 1.0;
  while (fill(hi, f) <= n_total) hi += 8.0;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid, f) <= n_total) lo = mid; else hi = mid;
  }
  const std::int64_t sum = fill(lo, f);
  f[0] += n_total - sum;
  return f;
}

inline double singleton_fraction(const std::vector<std::int64_t>& f) {
  return static_cast<double>(std::count(f.begin(), f.end(), 1)) / static_cast<double>(f.size());
}

// Bisection on s toward the singleton target; the closest iterate wins.
inline double calibrate_zipf_s(std::int64_t n_total, std::int64_t n_distinct, double target) {
  double lo = 0.01, hi = 8.0;
  double best_s = lo, best_gap = 2.0;
  for (int it = 0; it < 48; ++it) {
    const double s = 0.5 * (lo + hi);
    const double frac = singleton_fraction(zipf_multiplicities(n_total, n_distinct, s));
    const double gap = std::abs(frac - target);
    if (gap < best_gap) {
      best_gap = gap;
      best_s = s;
    }
    if (frac < target) lo = s; else hi = s;
  }
  return best_s;
}

namespace detail {

inline std::string word_for(std::int64_t id) {
  static constexpr char kCons[] = "bdfgklmnprstvz";
  static constexpr char kVow[] = "aeiou";
  constexpr std::int64_t kSyl = 14 * 5;
  std::string w;
  do {
    const std::int64_t syl = id % kSyl;
    w += kCons[syl % 14];
    w += kVow[syl / 14];
    id /= kSyl;
  } while (id > 0);
  if (w.size() < 4) w += "ra";
  return w;
}

}  // namespace detail

// Synthetic query corpus with Zipf multiplicities, 2-6 token utterances over
// a Zipf(1) vocabulary and labels from a latent linear score, thresholded so
// exactly round(positive_fraction * n) distinct queries are Positive.
inline Corpus generate(const CorpusSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n_distinct_target);
  Corpus corpus;
  std::vector<std::int64_t> mult;
  if (spec.n_total == spec.n_distinct_target) {
    mult.assign(n, 1);
    corpus.zipf_s = spec.zipf_s;
  } else {
    corpus.zipf_s = spec.zipf_s > 0.0 ? spec.zipf_s
                                      : calibrate_zipf_s(spec.n_total, spec.n_distinct_target,
                                                         spec.singleton_fraction_target);
    mult = zipf_multiplicities(spec.n_total, spec.n_distinct_target, corpus.zipf_s);
    const double achieved = singleton_fraction(mult);
    if (spec.zipf_s == 0.0 && std::abs(achieved - spec.singleton_fraction_target) > 0.05) {
      throw ConfigError("singleton fraction " + std::to_string(spec.singleton_fraction_target) +
                        " is infeasible for n_total=" + std::to_string(spec.n_total) +
                        ", n_distinct=" + std::to_string(spec.n_distinct_target) +
                        " (closest achievable " + std::to_string(achieved) + ")");
    }
  }

  // Vocabulary sampling table.
  const auto v = static_cast<std::size_t>(spec.vocabulary);
  std::vector<double> cdf(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < v; ++i) cdf[i] = acc += 1.0 / static_cast<double>(i + 1);
  for (auto& c : cdf) c /= acc;

  Rng text_rng(derive_seed(spec.seed, "query-text"));
  std::unordered_set<std::string> seen;
  std::vector<std::vector<std::uint32_t>> tokens;
  std::vector<std::string> texts;
  std::size_t attempts = 0;
  while (texts.size() < n) {
    if (++attempts > 200 * n + 1000) {
      throw ConfigError("vocabulary too small for " + std::to_string(n) + " distinct queries");
    }
    const auto len = 2 + text_rng.below(5);
    std::vector<std::uint32_t> t(len);
    std::string s;
    for (auto& tok : t) {
      tok = static_cast<std::uint32_t>(std::upper_bound(cdf.begin(), cdf.end(), text_rng.uniform()) -
                                       cdf.begin());
      tok = std::min<std::uint32_t>(tok, static_cast<std::uint32_t>(v - 1));
      if (!s.empty()) s += ' ';
      s += detail::word_for(tok);
    }
    if (!seen.insert(s).second) continue;
    tokens.push_back(std::move(t));
    texts.push_back(std::move(s));
  }

  Rng label_rng(derive_seed(spec.seed, "labels"));
  std::vector<double> weight(v);
  for (auto& w : weight) w = label_rng.normal();
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (auto tok : tokens[i]) z += weight[tok];
    score[i] = z / std::sqrt(static_cast<double>(tokens[i].size())) + spec.label_noise * label_rng.normal();
  }
  std::vector<std::size_t> by_score(n);
  std::iota(by_score.begin(), by_score.end(), 0);
  std::stable_sort(by_score.begin(), by_score.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  const auto n_pos = static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(n)));
  std::vector<Label> labels(n, Label::kNegative);
  for (std::size_t i = 0; i < n_pos; ++i) labels[by_score[i]] = Label::kPositive;

  corpus.queries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) corpus.queries.push_back(GroundTruth::make(texts[i], labels[i]));

  // Query i gets the multiplicity of a random rank.
  std::vector<std::size_t> rank_of(n);
  std::iota(rank_of.begin(), rank_of.end(), 0);
  Rng(derive_seed(spec.seed, "rank-assignment")).shuffle(rank_of);
  corpus.stream.reserve(static_cast<std::size_t>(spec.n_total));
  for (std::size_t i = 0; i < n; ++i) {
    corpus.stream.insert(corpus.stream.end(), static_cast<std::size_t>(mult[rank_of[i]]),
                         static_cast<std::uint32_t>(i));
  }
  Rng(derive_seed(spec.seed, "occurrence-order")).shuffle(corpus.stream);
  return corpus;
}

// One line per occurrence: query text, a tab, Positive or Negative.
inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (auto i : corpus.stream) {
    const auto& q = corpus.queries[i];
    out << q.text() << '\t' << label_name(GroundTruth::label(q)) << '\n';
  }
}

inline Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_map<std::string, std::uint32_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("corpus line " + std::to_string(line_no) + ": expected <text>\\t<label>");
    }
    const std::string text = line.substr(0, tab);
    const std::string lab = line.substr(tab + 1);
    Label y;
    if (lab == "Positive") y = Label::kPositive;
    else if (lab == "Negative") y = Label::kNegative;
    else throw FormatError("corpus line " + std::to_string(line_no) + ": unknown label '" + lab + "'");
    auto [it, fresh] = index.try_emplace(text, static_cast<std::uint32_t>(corpus.queries.size()));
    if (fresh) {
      corpus.queries.push_back(GroundTruth::make(text, y));
    } else if (GroundTruth::label(corpus.queries[it->second]) != y) {
      throw FormatError("corpus line " + std::to_string(line_no) + ": conflicting label for '" + text + "'");
    }
    corpus.stream.push_back(it->second);
  }
  return corpus;
}

}  // namespace ppal
