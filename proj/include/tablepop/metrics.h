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

#ifndef TABLEPOP_METRICS_H_
#define TABLEPOP_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"

namespace tablepop {

using RelevantSet = absl::flat_hash_set<std::string>;

// Binary average precision over the first `depth` items; the denominator is
// |relevant|. Repeated items count once, at their first position.
double AveragePrecision(std::span<const std::string> ranked,
                        const RelevantSet& relevant, size_t depth = 1000);

// 1 / rank of the first relevant item within `depth`; 0 if none.
double ReciprocalRank(std::span<const std::string> ranked,
                      const RelevantSet& relevant, size_t depth = 1000);

// Compensated (Neumaier) summation.
class StableSum {
 public:
  void Add(double v);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double StableMean(std::span<const double> values);

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;
  size_t n = 0;
};

// Two-tailed paired t-test. Fails on size mismatch or fewer than 2 pairs.
// Identical samples give t = 0, p = 1.
absl::StatusOr<TTestResult> PairedTTest(std::span<const double> a,
                                        std::span<const double> b);

}  // namespace tablepop

#endif  // TABLEPOP_METRICS_H_
