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

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ppal::binomial {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

namespace detail {

// log(n!) - log(sqrt(2 pi n) (n/e)^n)
inline double stirlerr(double n) {
  constexpr double S0 = 1.0 / 12.0;
  constexpr double S1 = 1.0 / 360.0;
  constexpr double S2 = 1.0 / 1260.0;
  constexpr double S3 = 1.0 / 1680.0;
  constexpr double S4 = 1.0 / 1188.0;
  if (n <= 0.0) return 0.0;
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double nn = n * n;
  if (n > 500) return (S0 - S1 / nn) / n;
  if (n > 80) return (S0 - (S1 - S2 / nn) / nn) / n;
  if (n > 35) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
  return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x without cancellation.
inline double bd0(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace detail

// log P(X = x) for X ~ Binomial(n, p), Loader's saddle-point form. Relative
// accuracy stays near machine precision for n up to ~1e15.
inline double log_pmf(std::int64_t x, std::int64_t n, double p) {
  using detail::bd0;
  using detail::stirlerr;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (x < 0 || x > n) return kNegInf;
  const double q = 1.0 - p;
  if (p == 0.0) return x == 0 ? 0.0 : kNegInf;
  if (q == 0.0) return x == n ? 0.0 : kNegInf;
  const double dn = static_cast<double>(n);
  const double dx = static_cast<double>(x);
  if (x == 0) {
    if (n == 0) return 0.0;
    return p < 0.1 ? -bd0(dn, dn * q) - dn * p : dn * std::log(q);
  }
  if (x == n) return q < 0.1 ? -bd0(dn, dn * p) - dn * q : dn * std::log(p);
  const double lc = stirlerr(dn) - stirlerr(dx) - stirlerr(dn - dx) - bd0(dx, dn * p) -
                    bd0(dn - dx, dn * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(dx) + std::log1p(-dx / dn);
  return lc - 0.5 * lf;
}

// log P(X > m) for X ~ Binomial(n, p), requiring m + 1 above the mode so the
// summands decrease. Terms are accumulated relative to the first one, so the
// result survives tails far below the smallest normal double.
inline double log_upper_tail_above_mode(std::int64_t n, std::int64_t m, double p) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (m >= n) return kNegInf;
  const std::int64_t first = m < 0 ? 0 : m + 1;
  const double head = log_pmf(first, n, p);
  if (head == kNegInf) return kNegInf;
  const double odds = p / (1.0 - p);
  CompensatedSum sum;
  double term = 1.0;
  sum.add(term);
  for (std::int64_t j = first; j < n; ++j) {
    term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * odds;
    sum.add(term);
    if (term < 1e-18 * sum.value()) break;
  }
  return head + std::log(sum.value());
}

}  // namespace ppal::binomial
