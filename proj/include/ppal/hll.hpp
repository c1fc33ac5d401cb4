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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppal/binary_io.hpp"
#include "ppal/error.hpp"
#include "ppal/hash.hpp"

namespace ppal {

inline constexpr std::uint64_t kDefaultHllSeed = 0x5eed'0001'4c4c'0000ULL;

// HyperLogLog distinct counter.
//
// The low `precision_bits` bits of the 64-bit item hash select a register;
// the register keeps the maximum of p(w), the position of the leftmost 1 in
// the remaining 64 - b bits (1-based, 64 - b + 1 when they are all zero).
// Estimation is the bias-corrected harmonic mean of 2^-register with linear
// counting below 2.5 m and the 2^64 large-range correction. The linear
// counting branch is capped at 2.5 m, so the estimate never steps down when
// the raw estimate crosses the switch point.
//
// Single writer. Const member functions may run concurrently.
class HllSketch {
 public:
  static constexpr int kMinPrecision = 4;
  static constexpr int kMaxPrecision = 18;
  static constexpr int kDefaultPrecision = 14;
  static constexpr std::uint8_t kFormatVersion = 1;

  explicit HllSketch(int precision_bits = kDefaultPrecision,
                     std::uint64_t hash_seed = kDefaultHllSeed)
      : precision_(precision_bits), seed_(hash_seed) {
    if (precision_bits < kMinPrecision || precision_bits > kMaxPrecision) {
      throw ConfigError("HLL precision must be in [" + std::to_string(kMinPrecision) + ", " +
                        std::to_string(kMaxPrecision) + "], got " +
                        std::to_string(precision_bits));
    }
    registers_.assign(std::size_t{1} << precision_bits, 0);
  }

  void insert(std::string_view item) { insert_hash(hash64(item, seed_)); }

  // Exposed so tests can drive exact register states.
  void insert_hash(std::uint64_t h) {
    const std::uint64_t index = h & (registers_.size() - 1);
    const std::uint64_t rest = h >> precision_;
    const int width = 64 - precision_;
    // countl_zero counts over 64 bits; the top `precision_` bits of `rest`
    // are always zero.
    const int run = rest == 0 ? width + 1 : std::countl_zero(rest) - precision_ + 1;
    auto& reg = registers_[index];
    reg = std::max(reg, static_cast<std::uint8_t>(run));
  }

  double estimate() const {
    const double m = static_cast<double>(registers_.size());
    double harmonic = 0.0;
    std::size_t zeros = 0;
    for (const std::uint8_t r : registers_) {
      harmonic += std::ldexp(1.0, -static_cast<int>(r));
      zeros += (r == 0);
    }
    double e = alpha() * m * m / harmonic;
    if (e <= 2.5 * m) {
      const double lc = zeros != 0 ? m * std::log(m / static_cast<double>(zeros)) : 2.5 * m;
      e = std::min(lc, 2.5 * m);
    } else {
      constexpr double kTwo64 = 18446744073709551616.0;
      if (e > kTwo64 / 30.0) e = -kTwo64 * std::log1p(-e / kTwo64);
    }
    return e;
  }

  int precision() const { return precision_; }
  std::size_t register_count() const { return registers_.size(); }
  std::uint64_t hash_seed() const { return seed_; }
  std::span<const std::uint8_t> registers() const { return registers_; }

  // version(u8) | precision(u8) | seed(u64) | registers(2^b x u8)
  std::vector<std::uint8_t> serialize() const {
    binary::Writer w;
    w.u8(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(precision_));
    w.le(seed_);
    w.bytes(registers_);
    return std::move(w).take();
  }

  static HllSketch deserialize(std::span<const std::uint8_t> blob) {
    binary::Reader r(blob);
    if (r.u8() != kFormatVersion) throw FormatError("unsupported HLL format version");
    const int b = r.u8();
    const auto seed = r.le<std::uint64_t>();
    if (b < kMinPrecision || b > kMaxPrecision) throw FormatError("HLL precision out of range");
    HllSketch s(b, seed);
    const auto regs = r.bytes(s.registers_.size());
    const int max_run = 64 - b + 1;
    for (std::size_t i = 0; i < regs.size(); ++i) {
      if (regs[i] > max_run) throw FormatError("HLL register out of range");
      s.registers_[i] = regs[i];
    }
    r.expect_end();
    return s;
  }

  friend bool operator==(const HllSketch&, const HllSketch&) = default;

 private:
  double alpha() const {
    switch (precision_) {
      case 4: return 0.673;
      case 5: return 0.697;
      case 6: return 0.709;
      default: return 0.7213 / (1.0 + 1.079 / static_cast<double>(registers_.size()));
    }
  }

  int precision_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> registers_;
};

}  // namespace ppal
