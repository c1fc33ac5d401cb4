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
#include <string_view>
#include <vector>

#include "ppal/error.hpp"
#include "ppal/hash.hpp"

namespace ppal {

struct FeatureEntry {
  std::uint32_t index;
  double value;
};

using SparseVector = std::vector<FeatureEntry>;

inline constexpr int kDefaultFeatureBits = 18;
inline constexpr std::uint64_t kFeatureHashSeed = 0x5eed'0003'b0b0'0000ULL;

// Signed hashed bag-of-words over whitespace tokens, L2-normalised. Indices
// are sorted and unique; colliding tokens add.
class FeatureHasher {
 public:
  explicit FeatureHasher(int bits = kDefaultFeatureBits, std::uint64_t seed = kFeatureHashSeed)
      : bits_(bits), seed_(seed) {
    if (bits < 1 || bits > 30) throw ConfigError("feature bits must be in [1, 30]");
  }

  std::uint32_t dim() const { return std::uint32_t{1} << bits_; }
  int bits() const { return bits_; }

  SparseVector transform(std::string_view text) const {
    SparseVector v;
    const std::uint32_t mask = dim() - 1;
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && text[pos] == ' ') ++pos;
      std::size_t end = pos;
      while (end < text.size() && text[end] != ' ') ++end;
      if (end > pos) {
        const std::uint64_t h = hash64(text.substr(pos, end - pos), seed_);
        const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
        v.push_back({static_cast<std::uint32_t>(h & mask), sign});
      }
      pos = end;
    }
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    SparseVector merged;
    for (const auto& e : v) {
      if (!merged.empty() && merged.back().index == e.index) {
        merged.back().value += e.value;
      } else {
        merged.push_back(e);
      }
    }
    std::erase_if(merged, [](const auto& e) { return e.value == 0.0; });
    double norm = 0.0;
    for (const auto& e : merged) norm += e.value * e.value;
    if (norm > 0.0) {
      const double inv = 1.0 / std::sqrt(norm);
      for (auto& e : merged) e.value *= inv;
    }
    return merged;
  }

 private:
  int bits_;
  std::uint64_t seed_;
};

}  // namespace ppal
