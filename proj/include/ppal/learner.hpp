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
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppal/binary_io.hpp"
#include "ppal/error.hpp"
#include "ppal/features.hpp"
#include "ppal/hash.hpp"
#include "ppal/pipeline.hpp"
#include "ppal/query.hpp"
#include "ppal/rng.hpp"

namespace ppal {

inline constexpr double kProbabilityFloor = 1e-9;

inline double clamp_probability(double p) {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

namespace detail {
inline void require_open_unit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0, 1)");
}
}  // namespace detail

inline double least_confidence(double p) {
  detail::require_open_unit(p);
  return 1.0 - std::max(p, 1.0 - p);
}

// Gap between the two class probabilities; small means uncertain.
inline double margin(double p) {
  detail::require_open_unit(p);
  const double top = std::max(p, 1.0 - p);
  return top - (1.0 - top);
}

inline double entropy(double p) {
  detail::require_open_unit(p);
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

enum class Strategy { kLeastConfidence, kMargin, kEntropy, kVariance };

inline std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kLeastConfidence: return "least_confidence";
    case Strategy::kMargin: return "margin";
    case Strategy::kEntropy: return "entropy";
    case Strategy::kVariance: return "variance";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kLeastConfidence, Strategy::kMargin, Strategy::kEntropy,
                 Strategy::kVariance}) {
    if (name == strategy_name(s)) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected least_confidence, margin, entropy or variance)");
}

// Larger means more worth labelling. Margin is negated so every strategy is
// an argmax.
inline double acquisition_score(Strategy s, double mean_p, double phi) {
  const double p = clamp_probability(mean_p);
  switch (s) {
    case Strategy::kLeastConfidence: return least_confidence(p);
    case Strategy::kMargin: return -margin(p);
    case Strategy::kEntropy: return entropy(p);
    case Strategy::kVariance: return phi;
  }
  return 0.0;
}

struct LearnerOptions {
  std::size_t members = 10;
  int feature_bits = kDefaultFeatureBits;
  double learning_rate = 0.5;
  double l2 = 1e-3;
  int epochs = 8;
  // Flip rate assumed for annotator labels in the forward-corrected loss.
  double annotator_noise = 0.35;
  std::size_t refit_interval = 500;

  void validate() const {
    if (members < 2) throw ConfigError("ensemble needs at least 2 members");
    if (feature_bits < 1 || feature_bits > 30) throw ConfigError("feature_bits must be in [1, 30]");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(l2 >= 0.0)) throw ConfigError("l2 must be >= 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(annotator_noise >= 0.0 && annotator_noise < 0.5)) {
      throw ConfigError("annotator_noise must be in [0, 0.5)");
    }
  }
};

// Logistic regression over hashed features.
//
// Per-example objective, with observed label y and flip rate rho:
//   q = rho + (1 - 2 rho) sigmoid(w.x + b)
//   L = -y log q - (1 - y) log(1 - q) + (l2 / 2) sum_{i in x} w_i^2
// rho = 0 is plain log-loss. The penalty touches only the example's own
// features, so a single SGD step follows the exact gradient of L.
class LogisticMember {
 public:
  explicit LogisticMember(std::uint32_t dim) : w_(dim, 0.0) {}

  double logit(const SparseVector& x) const {
    double z = b_;
    for (const auto& e : x) z += w_[e.index] * e.value;
    return z;
  }

  double probability(const SparseVector& x) const { return clamp_probability(sigmoid(logit(x))); }

  double loss(const SparseVector& x, Label y, double rho, double l2) const {
    const double z = logit(x);
    const double t = y == Label::kPositive ? 1.0 : 0.0;
    double nll;
    if (rho == 0.0) {
      nll = t * softplus(-z) + (1.0 - t) * softplus(z);
    } else {
      const double q = rho + (1.0 - 2.0 * rho) * sigmoid(z);
      nll = -t * std::log(q) - (1.0 - t) * std::log1p(-q);
    }
    double pen = 0.0;
    for (const auto& e : x) pen += w_[e.index] * w_[e.index];
    return nll + 0.5 * l2 * pen;
  }

  // dL/dz for the data term.
  double dloss_dlogit(const SparseVector& x, Label y, double rho) const {
    const double s = sigmoid(logit(x));
    const double t = y == Label::kPositive ? 1.0 : 0.0;
    if (rho == 0.0) return s - t;
    const double q = rho + (1.0 - 2.0 * rho) * s;
    const double dq = (1.0 - 2.0 * rho) * s * (1.0 - s);
    return (-t / q + (1.0 - t) / (1.0 - q)) * dq;
  }

  // Gradient of `loss` with respect to the weights of x's features and the bias.
  void gradient(const SparseVector& x, Label y, double rho, double l2, std::vector<double>& gw,
                double& gb) const {
    const double g = dloss_dlogit(x, y, rho);
    gw.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) gw[j] = g * x[j].value + l2 * w_[x[j].index];
    gb = g;
  }

  void sgd_step(const SparseVector& x, Label y, double rho, double l2, double lr) {
    const double g = dloss_dlogit(x, y, rho);
    for (const auto& e : x) {
      double& w = w_[e.index];
      w -= lr * (g * e.value + l2 * w);
    }
    b_ -= lr * g;
  }

  void reset() {
    std::fill(w_.begin(), w_.end(), 0.0);
    b_ = 0.0;
  }

  std::uint32_t dim() const { return static_cast<std::uint32_t>(w_.size()); }
  double weight(std::uint32_t i) const { return w_[i]; }
  void set_weight(std::uint32_t i, double v) { w_[i] = v; }
  double bias() const { return b_; }
  void set_bias(double v) { b_ = v; }

 private:
  std::vector<double> w_;
  double b_ = 0.0;
};

struct LabeledQuery {
  Query query;
  Label label;
};

struct TrainingLogEntry {
  std::uint64_t query_hash;
  Label label;
  std::int64_t step;
};

// Bagged ensemble of logistic members.
//
// Member b trains on its own bootstrap resample of the golden set. Each
// acquired example enters member b with a Poisson(1) multiplicity keyed by
// (seed, b, query hash, repeat index), the streaming form of the same
// resampling. Refits visit examples in an order derived from their hashes,
// so a refit depends on the labelled set and not on the order it was
// acquired in.
class Model {
 public:
  static constexpr std::uint8_t kFormatVersion = 1;
  static constexpr char kMagic[4] = {'P', 'P', 'A', 'L'};

  static Model bootstrap(std::span<const LabeledQuery> golden, const LearnerOptions& opts,
                         std::uint64_t seed) {
    opts.validate();
    if (golden.empty()) throw ConfigError("golden set is empty");
    bool pos = false, neg = false;
    for (const auto& g : golden) (g.label == Label::kPositive ? pos : neg) = true;
    if (!pos || !neg) throw ConfigError("golden set must contain both labels");

    Model m(opts, seed);
    const std::size_t n = golden.size();
    for (const auto& g : golden) {
      m.examples_.push_back({m.hasher_.transform(g.query.text()), g.label, g.query.hash(), 0.0,
                             std::vector<std::uint16_t>(opts.members, 0)});
    }
    for (std::size_t b = 0; b < opts.members; ++b) {
      Rng rng(derive_seed(seed, "bootstrap-resample", b));
      for (std::size_t draw = 0; draw < n; ++draw) ++m.examples_[rng.below(n)].weights[b];
    }
    m.refit();
    return m;
  }

  std::size_t members() const { return members_.size(); }
  std::uint32_t feature_dim() const { return hasher_.dim(); }
  const LearnerOptions& options() const { return opts_; }
  std::uint64_t seed() const { return seed_; }

  SparseVector featurize(const Query& q) const { return hasher_.transform(q.text()); }

  const LogisticMember& member(std::size_t i) const { return members_.at(i); }
  LogisticMember& member(std::size_t i) { return members_.at(i); }

  std::vector<double> member_probabilities(const SparseVector& x) const {
    std::vector<double> p(members_.size());
    for (std::size_t i = 0; i < members_.size(); ++i) p[i] = members_[i].probability(x);
    return p;
  }

  // Mean and population variance of member probabilities in one pass.
  // Deviations are taken from the first member, so agreeing members give
  // exactly zero.
  std::pair<double, double> mean_and_variance(const SparseVector& x) const {
    const double p0 = members_.front().probability(x);
    double sum = 0.0, shift = 0.0, sq = 0.0;
    for (const auto& m : members_) {
      const double p = m.probability(x);
      const double d = p - p0;
      sum += p;
      shift += d;
      sq += d * d;
    }
    const double n = static_cast<double>(members_.size());
    return {sum / n, std::max(0.0, (sq - shift * shift / n) / n)};
  }

  double predict_proba(const SparseVector& x) const {
    double sum = 0.0;
    for (const auto& m : members_) sum += m.probability(x);
    return sum / static_cast<double>(members_.size());
  }
  double predict_proba(const Query& q) const { return predict_proba(featurize(q)); }

  Label predict(const SparseVector& x) const {
    return predict_proba(x) > 0.5 ? Label::kPositive : Label::kNegative;
  }

  double variance_score(const SparseVector& x) const { return mean_and_variance(x).second; }
  double variance_score(const Query& q) const { return variance_score(featurize(q)); }

  void update(const Query& q, Label y) { update(q, featurize(q), y); }

  void update(const Query& q, const SparseVector& x, Label y) {
    std::vector<std::uint16_t> w(members_.size());
    const std::uint64_t repeat = seen_[q.hash()]++;
    const std::uint64_t key = mix64(q.hash() + repeat);
    for (std::size_t b = 0; b < members_.size(); ++b) {
      const double u = unit_interval(derive_seed(seed_, "online-bag", key ^ b));
      w[b] = static_cast<std::uint16_t>(poisson_from_uniform(1.0, u));
      for (int r = 0; r < w[b]; ++r) {
        members_[b].sgd_step(x, y, opts_.annotator_noise, opts_.l2, incremental_rate());
      }
    }
    examples_.push_back({x, y, q.hash(), opts_.annotator_noise, std::move(w)});
    ++updates_;
    log_.push_back({q.hash(), y, static_cast<std::int64_t>(updates_)});
    since_refit_ = true;
    if (opts_.refit_interval > 0 && updates_ % opts_.refit_interval == 0) refit();
  }

  // Refit if anything was learned since the last full refit.
  void finalize() {
    if (since_refit_) refit();
  }

  // Retrain every member from zero on its weighted share of all examples.
  void refit() {
    std::vector<std::size_t> order(examples_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return examples_[a].hash < examples_[b].hash;
    });
    std::vector<std::size_t> visit;
    for (std::size_t b = 0; b < members_.size(); ++b) {
      auto& m = members_[b];
      m.reset();
      for (int epoch = 0; epoch < opts_.epochs; ++epoch) {
        visit = order;
        Rng(derive_seed(seed_, "refit-order", b * 4096 + static_cast<std::size_t>(epoch)))
            .shuffle(visit);
        const double lr = opts_.learning_rate / std::sqrt(1.0 + epoch);
        for (const std::size_t i : visit) {
          const auto& ex = examples_[i];
          for (int r = 0; r < ex.weights[b]; ++r) m.sgd_step(ex.x, ex.y, ex.rho, opts_.l2, lr);
        }
      }
    }
    since_refit_ = false;
  }

  std::span<const TrainingLogEntry> training_log() const { return log_; }
  std::size_t update_count() const { return updates_; }

  // magic(4) | version(u8) | feature_dim(u32) | l(u32) |
  // per member: feature_dim weights then bias, f32 little-endian
  std::vector<std::uint8_t> serialize() const {
    binary::Writer w;
    for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
    w.u8(kFormatVersion);
    w.le(feature_dim());
    w.le(static_cast<std::uint32_t>(members_.size()));
    for (const auto& m : members_) {
      for (std::uint32_t i = 0; i < m.dim(); ++i) w.f32(static_cast<float>(m.weight(i)));
      w.f32(static_cast<float>(m.bias()));
    }
    return std::move(w).take();
  }

  static Model deserialize(std::span<const std::uint8_t> blob) {
    binary::Reader r(blob);
    for (char c : kMagic) {
      if (r.u8() != static_cast<std::uint8_t>(c)) throw FormatError("bad model checkpoint magic");
    }
    if (r.u8() != kFormatVersion) throw FormatError("unsupported model checkpoint version");
    const auto dim = r.le<std::uint32_t>();
    const auto l = r.le<std::uint32_t>();
    if (dim < 2 || !std::has_single_bit(dim)) throw FormatError("feature_dim must be a power of two");
    LearnerOptions opts;
    opts.members = l;
    opts.feature_bits = std::countr_zero(dim);
    try {
      opts.validate();
    } catch (const ConfigError& e) {
      throw FormatError(std::string("bad model checkpoint: ") + e.what());
    }
    Model m(opts, 0);
    for (auto& mem : m.members_) {
      for (std::uint32_t i = 0; i < dim; ++i) mem.set_weight(i, r.f32());
      mem.set_bias(r.f32());
    }
    r.expect_end();
    return m;
  }

 private:
  struct Example {
    SparseVector x;
    Label y;
    std::uint64_t hash;
    double rho;
    std::vector<std::uint16_t> weights;  // multiplicity per member
  };

  Model(const LearnerOptions& opts, std::uint64_t seed)
      : opts_(opts), seed_(seed), hasher_(opts.feature_bits),
        members_(opts.members, LogisticMember(std::uint32_t{1} << opts.feature_bits)) {}

  double incremental_rate() const {
    return opts_.learning_rate / std::sqrt(static_cast<double>(opts_.epochs));
  }

  LearnerOptions opts_;
  std::uint64_t seed_;
  FeatureHasher hasher_;
  std::vector<LogisticMember> members_;
  std::vector<Example> examples_;
  std::vector<TrainingLogEntry> log_;
  std::unordered_map<std::uint64_t, std::uint64_t> seen_;  // updates per query hash
  std::size_t updates_ = 0;
  bool since_refit_ = false;
};

// Index of the available pool entry with the highest acquisition score under
// the current model; ties go to the earlier entry in pool order. nullopt when
// the pool is exhausted.
inline std::optional<std::size_t> next_example(const RankedExamplePool& pool, const Model& model,
                                               Strategy strategy) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  const auto entries = pool.entries();
  SparseVector scratch;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!pool.available(i)) continue;
    const SparseVector* x = &entries[i].features;
    if (x->empty()) {
      scratch = model.featurize(entries[i].query);
      x = &scratch;
    }
    const auto [mean, var] = model.mean_and_variance(*x);
    const double score = acquisition_score(strategy, mean, var);
    if (!best || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

}  // namespace ppal
