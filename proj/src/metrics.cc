// Copyright 2026 The Tablepop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tablepop/metrics.h"

#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "absl/strings/str_cat.h"

namespace tablepop {

double AveragePrecision(std::span<const std::string> ranked,
                        const RelevantSet& relevant, size_t depth) {
  if (relevant.empty()) return 0.0;
  absl::flat_hash_set<absl::string_view> seen;
  size_t hits = 0;
  double sum = 0.0;
  const size_t n = std::min(depth, ranked.size());
  for (size_t i = 0; i < n; ++i) {
    if (!seen.insert(ranked[i]).second) continue;
    if (relevant.contains(ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double ReciprocalRank(std::span<const std::string> ranked,
                      const RelevantSet& relevant, size_t depth) {
  const size_t n = std::min(depth, ranked.size());
  for (size_t i = 0; i < n; ++i) {
    if (relevant.contains(ranked[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

void StableSum::Add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    compensation_ += (sum_ - t) + v;
  } else {
    compensation_ += (v - t) + sum_;
  }
  sum_ = t;
}

double StableMean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  StableSum sum;
  for (double v : values) sum.Add(v);
  return sum.value() / static_cast<double>(values.size());
}

absl::StatusOr<TTestResult> PairedTTest(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("paired samples differ in size: ", a.size(), " vs ", b.size()));
  }
  if (a.size() < 2) {
    return absl::InvalidArgumentError("paired t-test needs at least 2 pairs");
  }
  TTestResult result;
  result.n = a.size();
  std::vector<double> diff(a.size());
  for (size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const double mean = StableMean(diff);
  StableSum ss;
  for (double d : diff) ss.Add((d - mean) * (d - mean));
  const double n = static_cast<double>(diff.size());
  const double sd = std::sqrt(ss.value() / (n - 1.0));
  if (sd == 0.0) {
    result.t = mean == 0.0 ? 0.0 : std::copysign(INFINITY, mean);
    result.p_value = mean == 0.0 ? 1.0 : 0.0;
    return result;
  }
  result.t = mean / (sd / std::sqrt(n));
  boost::math::students_t dist(n - 1.0);
  result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t)));
  return result;
}

}  // namespace tablepop
