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
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppal/binary_io.hpp"
#include "ppal/error.hpp"
#include "ppal/hash.hpp"

namespace ppal {

inline constexpr std::uint64_t kDefaultCmmSeed = 0x5eed'0002'c330'3000ULL;

enum class UpdateRule : std::uint8_t {
  kConservative = 0,  // raise only the addressed counters that sit at the minimum
  kPlain = 1,         // classic count-min: increment every addressed counter
};

// Count-Mean-Min frequency sketch.
//
// d rows of w counters, one independent XXH64 seed per row. `count_min` is the
// classic upper bound. `estimate` deducts a per-row collision-noise floor and
// takes the median over rows, clamped to [0, count_min].
//
// Noise floor: the q-quantile of the row's counters with q = 1 - 0.5^(1/d),
// i.e. the level the minimum of d independent collision loads exceeds half of
// the time. In sparse rows it is 0 and the estimate equals the count-min
// bound; in saturated rows it removes the typical background load.
//
// Single writer. Const member functions may run concurrently.
class CountMeanMinSketch {
 public:
  static constexpr std::uint8_t kFormatVersion = 1;
  static constexpr std::size_t kDefaultDepth = 4;
  static constexpr std::size_t kDefaultWidth = 16384;

  CountMeanMinSketch(std::size_t depth = kDefaultDepth, std::size_t width = kDefaultWidth,
                     std::uint64_t seed = kDefaultCmmSeed,
                     UpdateRule rule = UpdateRule::kConservative)
      : depth_(depth), width_(width), seed_(seed), rule_(rule) {
    if (depth < 1) throw ConfigError("CMM depth must be >= 1");
    if (width < 2) throw ConfigError("CMM width must be >= 2");
    counters_.assign(depth * width, 0);
    row_seeds_.resize(depth);
    for (std::size_t i = 0; i < depth; ++i) row_seeds_[i] = derive_seed(seed, "cmm-row", i);
    histograms_.assign(depth * kHistogramBins, 0);
    for (std::size_t i = 0; i < depth; ++i) histograms_[i * kHistogramBins] = width;
  }

  void update(std::string_view item) {
    std::uint64_t* cells[kMaxStackDepth];
    std::vector<std::uint64_t*> heap_cells;
    std::span<std::uint64_t*> addressed = address(item, cells, heap_cells);

    if (rule_ == UpdateRule::kPlain) {
      for (std::size_t i = 0; i < depth_; ++i) set(i, *addressed[i], *addressed[i] + 1);
    } else {
      std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
      for (auto* c : addressed) lo = std::min(lo, *c);
      for (std::size_t i = 0; i < depth_; ++i) {
        if (*addressed[i] < lo + 1) set(i, *addressed[i], lo + 1);
      }
    }
    ++stream_length_;
  }

  // Minimum over the d addressed counters. Never below the true frequency.
  std::uint64_t count_min(std::string_view item) const {
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < depth_; ++i) lo = std::min(lo, counter(i, item));
    return lo;
  }

  // Noise-deducted frequency estimate.
  double estimate(std::string_view item) const {
    std::vector<double> deducted(depth_);
    std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < depth_; ++i) {
      const std::uint64_t c = counter(i, item);
      lo = std::min(lo, c);
      deducted[i] = static_cast<double>(c) - static_cast<double>(noise_floor(i));
    }
    return std::clamp(median(deducted), 0.0, static_cast<double>(lo));
  }

  std::uint64_t noise_floor(std::size_t row) const {
    const auto rank = noise_rank();
    const std::uint64_t* hist = &histograms_[row * kHistogramBins];
    std::uint64_t seen = 0;
    for (std::size_t v = 0; v < kHistogramBins; ++v) {
      seen += hist[v];
      if (seen > rank) return v;
    }
    // Quantile sits above the histogram range: select on a copy of the row.
    std::vector<std::uint64_t> row_copy(counters_.begin() + static_cast<std::ptrdiff_t>(row * width_),
                                        counters_.begin() + static_cast<std::ptrdiff_t>((row + 1) * width_));
    std::nth_element(row_copy.begin(), row_copy.begin() + static_cast<std::ptrdiff_t>(rank),
                     row_copy.end());
    return row_copy[rank];
  }

  std::uint64_t counter(std::size_t row, std::string_view item) const {
    return counters_[row * width_ + column(row, item)];
  }

  std::size_t column(std::size_t row, std::string_view item) const {
    return static_cast<std::size_t>(hash64(item, row_seeds_[row]) % width_);
  }

  std::size_t depth() const { return depth_; }
  std::size_t width() const { return width_; }
  std::uint64_t seed() const { return seed_; }
  UpdateRule rule() const { return rule_; }
  std::uint64_t stream_length() const { return stream_length_; }
  std::span<const std::uint64_t> counters() const { return counters_; }

  // version(u8) | rule(u8) | depth(u32) | width(u32) | seed(u64) | N(u64) |
  // counters(d*w x u64), row-major
  std::vector<std::uint8_t> serialize() const {
    binary::Writer w;
    w.u8(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(rule_));
    w.le(static_cast<std::uint32_t>(depth_));
    w.le(static_cast<std::uint32_t>(width_));
    w.le(seed_);
    w.le(stream_length_);
    for (const auto c : counters_) w.le(c);
    return std::move(w).take();
  }

  static CountMeanMinSketch deserialize(std::span<const std::uint8_t> blob) {
    binary::Reader r(blob);
    if (r.u8() != kFormatVersion) throw FormatError("unsupported CMM format version");
    const auto rule_byte = r.u8();
    if (rule_byte > 1) throw FormatError("unknown CMM update rule");
    const auto d = r.le<std::uint32_t>();
    const auto w = r.le<std::uint32_t>();
    const auto seed = r.le<std::uint64_t>();
    if (d < 1 || w < 2) throw FormatError("CMM dimensions out of range");
    if (static_cast<std::uint64_t>(d) * w * 8 > blob.size()) throw FormatError("truncated CMM blob");
    CountMeanMinSketch s(d, w, seed, static_cast<UpdateRule>(rule_byte));
    s.stream_length_ = r.le<std::uint64_t>();
    for (std::size_t row = 0; row < s.depth_; ++row) {
      for (std::size_t col = 0; col < s.width_; ++col) {
        const auto v = r.le<std::uint64_t>();
        s.set(row, s.counters_[row * s.width_ + col], v);
      }
    }
    r.expect_end();
    return s;
  }

  friend bool operator==(const CountMeanMinSketch& a, const CountMeanMinSketch& b) {
    return a.depth_ == b.depth_ && a.width_ == b.width_ && a.seed_ == b.seed_ &&
           a.rule_ == b.rule_ && a.stream_length_ == b.stream_length_ &&
           a.counters_ == b.counters_;
  }

 private:
  static constexpr std::size_t kHistogramBins = 256;
  static constexpr std::size_t kMaxStackDepth = 16;

  // 0-based order statistic used as the row noise floor.
  std::size_t noise_rank() const {
    const double q = 1.0 - std::pow(0.5, 1.0 / static_cast<double>(depth_));
    const auto rank = static_cast<std::size_t>(std::floor(q * static_cast<double>(width_ - 1)));
    return std::min(rank, width_ - 1);
  }

  static double median(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }

  std::span<std::uint64_t*> address(std::string_view item, std::uint64_t** stack_cells,
                                    std::vector<std::uint64_t*>& heap_cells) {
    std::uint64_t** cells = stack_cells;
    if (depth_ > kMaxStackDepth) {
      heap_cells.resize(depth_);
      cells = heap_cells.data();
    }
    for (std::size_t i = 0; i < depth_; ++i) cells[i] = &counters_[i * width_ + column(i, item)];
    return {cells, depth_};
  }

  // All counter writes go through here so the per-row histograms stay exact.
  void set(std::size_t row, std::uint64_t& cell, std::uint64_t value) {
    std::uint64_t* hist = &histograms_[row * kHistogramBins];
    if (cell < kHistogramBins) --hist[cell];
    if (value < kHistogramBins) ++hist[value];
    cell = value;
  }

  std::size_t depth_;
  std::size_t width_;
  std::uint64_t seed_;
  UpdateRule rule_;
  std::uint64_t stream_length_ = 0;
  std::vector<std::uint64_t> counters_;
  std::vector<std::uint64_t> row_seeds_;
  std::vector<std::uint64_t> histograms_;  // depth x kHistogramBins, counts of small values
};

}  // namespace ppal
