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

#include <string>
#include <utility>

#include "ppal/error.hpp"
#include "ppal/query.hpp"

namespace ppal {

// Privileged access to hidden labels: annotator, evaluator and generator only.
class GroundTruth {
 public:
  static Query make(std::string text, Label y) {
    Query q(std::move(text));
    q.has_label_ = true;
    q.label_ = y;
    return q;
  }

  static bool has_label(const Query& q) { return q.has_label_; }

  static Label label(const Query& q) {
    if (!q.has_label_) throw DomainError("query carries no hidden label: " + q.text_);
    return q.label_;
  }
};

}  // namespace ppal
