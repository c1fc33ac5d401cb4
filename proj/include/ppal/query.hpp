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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "ppal/error.hpp"
#include "ppal/hash.hpp"

namespace ppal {

enum class Label : std::uint8_t { kNegative = 0, kPositive = 1 };

inline Label flip(Label y) { return y == Label::kPositive ? Label::kNegative : Label::kPositive; }
inline const char* label_name(Label y) { return y == Label::kPositive ? "Positive" : "Negative"; }

inline constexpr std::uint64_t kQueryHashSeed = 0;

// A query utterance. The whole text is the quasi-identifier. The true label,
// when known, is reachable only through GroundTruth (ppal/truth.hpp), which
// learner and pipeline code never include.
class Query {
 public:
  explicit Query(std::string text) : text_(std::move(text)), hash_(hash64(text_, kQueryHashSeed)) {
    if (text_.empty()) throw ConfigError("query text must be non-empty");
  }

  const std::string& text() const { return text_; }
  std::uint64_t hash() const { return hash_; }

  friend bool operator==(const Query& a, const Query& b) { return a.text_ == b.text_; }

 private:
  friend class GroundTruth;

  std::string text_;
  std::uint64_t hash_;
  bool has_label_ = false;
  Label label_ = Label::kNegative;
};

}  // namespace ppal
