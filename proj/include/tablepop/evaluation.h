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

#ifndef TABLEPOP_EVALUATION_H_
#define TABLEPOP_EVALUATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "tablepop/column_population.h"
#include "tablepop/row_population.h"
#include "tablepop/table.h"

namespace tablepop {

enum class Task { kRows, kColumns };

absl::string_view TaskName(Task task);
absl::StatusOr<Task> ParseTask(absl::string_view name);
// Largest simulated seed size: 5 seed entities or 3 seed labels.
int MaxSeedSize(Task task);

struct EvaluationSplit {
  Task task = Task::kRows;
  uint64_t rng_seed = 0;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Draws disjoint validation and test sets of `size` entity-focused tables
// each. The draw depends on both `rng_seed` and the task, so row and column
// splits differ for the same seed.
absl::StatusOr<EvaluationSplit> MakeSplit(std::span<const Table> corpus,
                                          Task task, uint64_t rng_seed,
                                          size_t size = 1000);
nlohmann::json SplitToJson(const EvaluationSplit& split);
absl::StatusOr<EvaluationSplit> SplitFromJson(const nlohmann::json& j);
// Validation and test ids, sorted; the input of index exclusion.
std::vector<std::string> ExclusionList(const EvaluationSplit& split);

struct SimulatedCase {
  SeedTable seed;
  // Entity ids (rows) or normalized labels (columns); sorted, unique, and
  // disjoint from the corresponding seed field.
  std::vector<std::string> ground_truth;
  int seed_size = 0;
};

// Rows: the first `size` entities seed the table (all labels kept) and the
// remaining entities are the truth. Columns: the first `size` labels seed
// the table (all entities kept) and the remaining labels, normalized, are
// the truth.
absl::StatusOr<SimulatedCase> SimulateCase(const Table& table, Task task,
                                           int size);

struct CaseOutcome {
  std::vector<std::string> candidates;
  std::vector<std::string> ranked;
};

using CaseRanker =
    std::function<absl::StatusOr<CaseOutcome>(const SimulatedCase&)>;

struct RowMethod {
  RowCandidateConfig candidates;
  RowRankingConfig ranking;
};

struct ColumnMethod {
  ColumnCandidateConfig candidates;
  ColumnRankingConfig ranking;
  bool acsdb_baseline = false;
};

CaseRanker MakeRowRanker(const RowPopulator& populator, RowMethod method);
CaseRanker MakeColumnRanker(const ColumnPopulator& populator,
                            ColumnMethod method);

struct TableResult {
  std::string table_id;
  double ap = 0.0;
  double rr = 0.0;
  double recall = 0.0;
  size_t candidates = 0;
  size_t truth_size = 0;
  // Only filled when RunOptions::keep_candidates is set; not serialized.
  std::vector<std::string> candidate_set;
  std::vector<std::string> truth;
};

struct SeedSizeReport {
  int seed_size = 0;
  double map = 0.0;
  double mrr = 0.0;
  double mean_recall = 0.0;
  double mean_candidates = 0.0;
  std::vector<TableResult> tables;
  std::vector<std::string> skipped;  // "id: reason"
  std::vector<std::string> failed;   // "id: error"
};

struct EvalReport {
  Task task = Task::kRows;
  size_t depth = 1000;
  nlohmann::json config;
  std::vector<SeedSizeReport> per_seed_size;
};

struct RunOptions {
  size_t depth = 1000;
  bool keep_candidates = false;
};

// Simulates every seed size on every table and aggregates MAP/MRR and
// candidate recall. Tables are processed in the given order.
EvalReport RunEvaluation(std::span<const Table> tables, Task task,
                         const CaseRanker& ranker, const RunOptions& options);

nlohmann::json ReportToJson(const EvalReport& report);

// Mean candidate recall by AP band (AP = 1, AP = 0, in between).
struct ApBandRecall {
  double ap_one = 0.0;
  double ap_zero = 0.0;
  double between = 0.0;
  size_t n_one = 0;
  size_t n_zero = 0;
  size_t n_between = 0;
};
ApBandRecall RecallByApBand(const SeedSizeReport& report);

}  // namespace tablepop

#endif  // TABLEPOP_EVALUATION_H_
