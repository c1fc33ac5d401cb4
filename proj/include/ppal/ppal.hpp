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

#include "ppal/annotator.hpp"
#include "ppal/binomial.hpp"
#include "ppal/cmm.hpp"
#include "ppal/config.hpp"
#include "ppal/error.hpp"
#include "ppal/features.hpp"
#include "ppal/harness.hpp"
#include "ppal/hash.hpp"
#include "ppal/hll.hpp"
#include "ppal/learner.hpp"
#include "ppal/pipeline.hpp"
#include "ppal/privacy.hpp"
#include "ppal/query.hpp"
#include "ppal/stats.hpp"
#include "ppal/workload.hpp"
