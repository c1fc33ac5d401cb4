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
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ppal/binomial.hpp"
#include "ppal/error.hpp"

namespace ppal {

struct EpsilonDelta {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct PrivacyParams {
  double beta = 1.0;
  std::int64_t k = 1;
  double epsilon = 0.0;
  double delta = 0.0;

  void validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must be in (0, 1]");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("delta must be in [0, 1)");
  }
};

inline constexpr std::int64_t kDefaultNMax = 1'000'000;

// ln(p_d / p_d'), the privacy loss of one outcome.
inline double privacy_loss(double p_d, double p_dprime) {
  if (!(p_d > 0.0) || !(p_dprime > 0.0)) {
    throw DomainError("privacy_loss needs strictly positive probabilities");
  }
  return std::log(p_d) - std::log(p_dprime);
}

// Guarantee of a mechanism run on a beta2/beta1 Bernoulli subsample of the
// data it was calibrated for at rate beta1.
inline EpsilonDelta amplify(double epsilon1, double delta1, double beta1, double beta2) {
  if (!(beta2 > 0.0) || !(beta1 <= 1.0)) throw DomainError("sampling rates must be in (0, 1]");
  if (beta2 > beta1) throw DomainError("amplification requires beta2 <= beta1");
  if (!(epsilon1 >= 0.0)) throw DomainError("epsilon1 must be >= 0");
  if (!(delta1 >= 0.0 && delta1 < 1.0)) throw DomainError("delta1 must be in [0, 1)");
  if (beta2 == beta1) return {epsilon1, delta1};
  const double ratio = beta2 / beta1;
  return {std::log1p(ratio * std::expm1(epsilon1)), ratio * delta1};
}

// delta of Bernoulli(beta) sampling followed by frequency-k suppression.
//
// gamma = 1 - (1 - beta) e^-eps. For a record whose quasi-identifier is shared
// by n others, the release is eps-indistinguishable unless the sampled count
// exceeds ceil(gamma n); delta is the worst such tail over n in
// [ceil(k / gamma) - 1, n_max]. The scan stops early once the Chernoff bound
// exp(-n KL(gamma || beta)) drops below the running maximum, since every later
// tail is smaller than that bound.
inline double base_delta_for_k(std::int64_t k, double beta, double epsilon,
                               std::int64_t n_max = kDefaultNMax) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must be in (0, 1]");
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be >= 0");
  if (n_max < k) throw DomainError("n_max must be >= k");
  if (beta == 1.0) return 1.0;

  const double gamma = -std::expm1(std::log1p(-beta) - epsilon);
  if (gamma >= 1.0) return 0.0;
  const std::int64_t n0 = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(static_cast<double>(k) / gamma)) - 1);
  const double kl = gamma * std::log(gamma / beta) +
                    (1.0 - gamma) * (std::log1p(-gamma) - std::log1p(-beta));

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double best = kNegInf;
  for (std::int64_t n = n0; n <= n_max; ++n) {
    const auto m = static_cast<std::int64_t>(std::ceil(gamma * static_cast<double>(n)));
    best = std::max(best, binomial::log_upper_tail_above_mode(n, m, beta));
    if (best > kNegInf && -static_cast<double>(n + 1) * kl <= best) break;
  }
  constexpr double kFloorLog = -690.7755278982137;  // ln(1e-300)
  if (best < kFloorLog) return 0.0;
  return std::exp(best);
}

inline bool satisfies(const PrivacyParams& p, std::int64_t n_max = kDefaultNMax) {
  p.validate();
  return base_delta_for_k(p.k, p.beta, p.epsilon, n_max) <= p.delta;
}

struct GuaranteeCell {
  PrivacyParams params;
  bool satisfied = false;
  std::optional<double> accuracy;
};

// Cartesian grid, epsilon outermost, then delta, then beta, then k.
inline std::vector<GuaranteeCell> grid(std::span<const double> betas,
                                       std::span<const std::int64_t> ks,
                                       std::span<const double> epsilons,
                                       std::span<const double> deltas,
                                       std::int64_t n_max = kDefaultNMax) {
  if (betas.empty() || ks.empty() || epsilons.empty() || deltas.empty()) {
    throw ConfigError("privacy grid needs non-empty parameter lists");
  }
  std::map<std::tuple<double, std::int64_t, double>, double> cache;
  std::vector<GuaranteeCell> cells;
  cells.reserve(betas.size() * ks.size() * epsilons.size() * deltas.size());
  for (const double eps : epsilons) {
    for (const double delta : deltas) {
      for (const double beta : betas) {
        for (const std::int64_t k : ks) {
          PrivacyParams p{beta, k, eps, delta};
          p.validate();
          auto key = std::make_tuple(beta, k, eps);
          auto it = cache.find(key);
          if (it == cache.end()) it = cache.emplace(key, base_delta_for_k(k, beta, eps, n_max)).first;
          cells.push_back({p, it->second <= delta, std::nullopt});
        }
      }
    }
  }
  return cells;
}

inline void write_grid_csv(std::ostream& out, std::span<const GuaranteeCell> cells) {
  out << "epsilon,delta,beta,k,satisfied,accuracy\n";
  char buf[64];
  for (const auto& c : cells) {
    out << c.params.epsilon << ',' << c.params.delta << ',' << c.params.beta << ',' << c.params.k
        << ',' << (c.satisfied ? "true" : "false") << ',';
    if (c.accuracy) {
      std::snprintf(buf, sizeof buf, "%.4f", *c.accuracy);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace ppal
