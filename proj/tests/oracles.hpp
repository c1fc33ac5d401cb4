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

// Independent reference implementations used by the tests.

#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

// Worst-case suppression tail by brute force. The Binomial(n, beta) pmf is
// evolved exactly (in 50-digit arithmetic) by the convolution
// P_{n+1}(j) = (1 - beta) P_n(j) + beta P_n(j - 1), and every tail is summed
// directly from it. One pass per beta serves all (k, epsilon) pairs.
class SuppressionTail {
 public:
  struct Query {
    std::int64_t k;
    double epsilon;
  };

  // Results keyed by (k, epsilon).
  static std::map<std::pair<std::int64_t, double>, double> run(double beta,
                                                               const std::vector<Query>& queries,
                                                               std::int64_t n_max) {
    const Big b(beta);
    const Big one(1);
    struct State {
      Query q;
      Big gamma;
      Big kl;
      std::int64_t n0;
      Big best{0};
      bool done = false;
    };
    std::vector<State> states;
    for (const auto& q : queries) {
      State s{q, one - (one - b) * exp(-Big(q.epsilon)), 0, 0};
      s.kl = s.gamma * log(s.gamma / b) + (one - s.gamma) * log((one - s.gamma) / (one - b));
      Big n0 = ceil(Big(q.k) / s.gamma) - 1;
      s.n0 = std::max<std::int64_t>(1, n0.convert_to<std::int64_t>());
      if (s.n0 > n_max) s.done = true;
      states.push_back(s);
    }
    std::vector<Big> pmf{one};  // n = 0
    for (std::int64_t n = 1; n <= n_max; ++n) {
      bool any = false;
      for (const auto& s : states) any = any || !s.done;
      if (!any) break;
      pmf.push_back(Big(0));
      for (std::int64_t j = n; j >= 1; --j) pmf[j] = (one - b) * pmf[j] + b * pmf[j - 1];
      pmf[0] *= (one - b);
      for (auto& s : states) {
        if (s.done || n < s.n0) continue;
        const auto m = ceil(s.gamma * n).convert_to<std::int64_t>();
        Big tail(0);
        for (std::int64_t j = n; j > m; --j) tail += pmf[j];
        if (tail > s.best) s.best = tail;
        // Every tail beyond n is at most exp(-(n+1) KL).
        if (s.best > 0 && exp(-Big(n + 1) * s.kl) <= s.best) s.done = true;
      }
    }
    std::map<std::pair<std::int64_t, double>, double> out;
    for (const auto& s : states) {
      const double v = s.best < Big("1e-300") ? 0.0 : s.best.convert_to<double>();
      out[{s.q.k, s.q.epsilon}] = v;
    }
    return out;
  }
};

// Exact counts.
template <typename Key>
std::unordered_map<Key, std::int64_t> exact_counts(const std::vector<Key>& stream) {
  std::unordered_map<Key, std::int64_t> c;
  for (const auto& x : stream) ++c[x];
  return c;
}

// Zipf(s) draws over item ids 1..universe by inverse CDF.
inline std::vector<std::uint32_t> zipf_stream(std::size_t updates, std::uint32_t universe, double s,
                                             std::uint64_t seed) {
  std::vector<double> cdf(universe);
  double acc = 0.0;
  for (std::uint32_t r = 0; r < universe; ++r) cdf[r] = acc += std::pow(r + 1.0, -s);
  for (auto& c : cdf) c /= acc;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint32_t> out(updates);
  for (auto& x : out) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u(rng));
    x = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), universe - 1)) + 1;
  }
  return out;
}

inline bool same_significant_digits(double a, double b, int digits) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= scale * std::pow(10.0, -digits);
}

}  // namespace oracle
