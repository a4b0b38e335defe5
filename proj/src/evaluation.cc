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

#include "tablepop/evaluation.h"

#include <algorithm>
#include <random>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "tablepop/metrics.h"
#include "tablepop/status_macros.h"

namespace tablepop {
namespace {

using nlohmann::json;

absl::StatusOr<std::vector<std::string>> IdList(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    return absl::InvalidArgumentError(absl::StrCat("split needs array '", key, "'"));
  }
  std::vector<std::string> out;
  for (const json& v : *it) {
    if (!v.is_string()) {
      return absl::InvalidArgumentError(absl::StrCat("'", key, "' must hold strings"));
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::string> SortedUnique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

absl::string_view TaskName(Task task) {
  return task == Task::kRows ? "rows" : "columns";
}

absl::StatusOr<Task> ParseTask(absl::string_view name) {
  if (name == "rows" || name == "row") return Task::kRows;
  if (name == "columns" || name == "column") return Task::kColumns;
  return absl::InvalidArgumentError(absl::StrCat("unknown task '", name, "'"));
}

int MaxSeedSize(Task task) { return task == Task::kRows ? 5 : 3; }

absl::StatusOr<EvaluationSplit> MakeSplit(std::span<const Table> corpus,
                                          Task task, uint64_t rng_seed,
                                          size_t size) {
  std::vector<std::string> qualifying;
  for (const Table& t : corpus) {
    if (IsEntityFocused(t)) qualifying.push_back(t.id);
  }
  if (qualifying.size() < 2 * size) {
    return absl::FailedPreconditionError(absl::StrCat(
        "split needs ", 2 * size, " entity-focused tables, corpus has ",
        qualifying.size()));
  }
  std::sort(qualifying.begin(), qualifying.end());
  std::seed_seq seq{static_cast<uint32_t>(rng_seed),
                    static_cast<uint32_t>(rng_seed >> 32),
                    static_cast<uint32_t>(task == Task::kRows ? 0x524f5753u
                                                              : 0x434f4c53u)};
  std::mt19937_64 rng(seq);
  std::shuffle(qualifying.begin(), qualifying.end(), rng);

  EvaluationSplit split;
  split.task = task;
  split.rng_seed = rng_seed;
  split.validation.assign(qualifying.begin(), qualifying.begin() + size);
  split.test.assign(qualifying.begin() + size, qualifying.begin() + 2 * size);
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

json SplitToJson(const EvaluationSplit& split) {
  return {{"task", TaskName(split.task)},
          {"rng_seed", split.rng_seed},
          {"validation", split.validation},
          {"test", split.test}};
}

absl::StatusOr<EvaluationSplit> SplitFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("split must be an object");
  EvaluationSplit split;
  auto task = j.find("task");
  if (task == j.end() || !task->is_string()) {
    return absl::InvalidArgumentError("split needs a 'task'");
  }
  TP_ASSIGN_OR_RETURN(split.task, ParseTask(task->get<std::string>()));
  if (auto s = j.find("rng_seed"); s != j.end() && s->is_number_unsigned()) {
    split.rng_seed = s->get<uint64_t>();
  }
  TP_ASSIGN_OR_RETURN(split.validation, IdList(j, "validation"));
  TP_ASSIGN_OR_RETURN(split.test, IdList(j, "test"));
  absl::flat_hash_set<std::string> validation(split.validation.begin(),
                                              split.validation.end());
  for (const auto& id : split.test) {
    if (validation.contains(id)) {
      return absl::InvalidArgumentError(
          absl::StrCat("table '", id, "' is in both validation and test"));
    }
  }
  return split;
}

std::vector<std::string> ExclusionList(const EvaluationSplit& split) {
  std::vector<std::string> ids(split.validation);
  ids.insert(ids.end(), split.test.begin(), split.test.end());
  return SortedUnique(std::move(ids));
}

absl::StatusOr<SimulatedCase> SimulateCase(const Table& table, Task task,
                                           int size) {
  if (!IsEntityFocused(table, /*min_rows=*/1, /*min_extra_cols=*/0)) {
    return absl::FailedPreconditionError(
        absl::StrCat("table '", table.id, "' is not entity-focused"));
  }
  if (size < 1) return absl::OutOfRangeError("seed size must be at least 1");
  SimulatedCase c;
  c.seed_size = size;
  c.seed.caption = table.caption;
  const std::vector<std::string> entities = table.LeftmostEntities();
  const size_t n = static_cast<size_t>(size);
  if (task == Task::kRows) {
    if (n >= entities.size()) {
      return absl::OutOfRangeError(absl::StrCat(
          "seed size ", size, " leaves no rows of ", entities.size()));
    }
    c.seed.entities.assign(entities.begin(), entities.begin() + n);
    c.seed.labels = table.headings;
    c.ground_truth = SortedUnique({entities.begin() + n, entities.end()});
  } else {
    if (n >= table.headings.size()) {
      return absl::OutOfRangeError(absl::StrCat(
          "seed size ", size, " leaves no columns of ", table.headings.size()));
    }
    c.seed.entities = entities;
    c.seed.labels.assign(table.headings.begin(), table.headings.begin() + n);
    absl::flat_hash_set<std::string> seed_labels;
    for (const auto& l : c.seed.labels) seed_labels.insert(NormalizeLabel(l));
    std::vector<std::string> truth;
    for (size_t j = n; j < table.headings.size(); ++j) {
      std::string l = NormalizeLabel(table.headings[j]);
      if (!l.empty() && !seed_labels.contains(l)) truth.push_back(std::move(l));
    }
    c.ground_truth = SortedUnique(std::move(truth));
  }
  return c;
}

CaseRanker MakeRowRanker(const RowPopulator& populator, RowMethod method) {
  return [&populator, method](const SimulatedCase& c) -> absl::StatusOr<CaseOutcome> {
    TP_RETURN_IF_ERROR(method.candidates.Validate());
    CaseOutcome out;
    for (auto& cand : populator.SelectCandidates(c.seed, method.candidates)) {
      out.candidates.push_back(std::move(cand.entity));
    }
    TP_ASSIGN_OR_RETURN(RankedSuggestions ranked,
                        populator.RankCandidates(c.seed, out.candidates,
                                                 method.ranking));
    for (auto& s : ranked.items) out.ranked.push_back(std::move(s.item));
    return out;
  };
}

CaseRanker MakeColumnRanker(const ColumnPopulator& populator,
                            ColumnMethod method) {
  return [&populator, method](const SimulatedCase& c) -> absl::StatusOr<CaseOutcome> {
    TP_RETURN_IF_ERROR(method.candidates.Validate());
    const ColumnCandidates candidates =
        populator.SelectCandidates(c.seed, method.candidates);
    const RankedSuggestions ranked =
        method.acsdb_baseline
            ? populator.RankBaselineCandidates(c.seed, candidates)
            : populator.RankCandidates(c.seed, candidates, method.ranking);
    CaseOutcome out;
    out.candidates = candidates.labels;
    for (const auto& s : ranked.items) out.ranked.push_back(s.item);
    return out;
  };
}

EvalReport RunEvaluation(std::span<const Table> tables, Task task,
                         const CaseRanker& ranker, const RunOptions& options) {
  EvalReport report;
  report.task = task;
  report.depth = options.depth;
  for (int size = 1; size <= MaxSeedSize(task); ++size) {
    SeedSizeReport sr;
    sr.seed_size = size;
    for (const Table& table : tables) {
      auto c = SimulateCase(table, task, size);
      if (!c.ok()) {
        sr.skipped.push_back(absl::StrCat(table.id, ": ", c.status().message()));
        continue;
      }
      if (c->ground_truth.empty()) {
        sr.skipped.push_back(absl::StrCat(table.id, ": empty ground truth"));
        continue;
      }
      auto outcome = ranker(*c);
      if (!outcome.ok()) {
        sr.failed.push_back(absl::StrCat(table.id, ": ", outcome.status().message()));
        continue;
      }
      const RelevantSet truth(c->ground_truth.begin(), c->ground_truth.end());
      const absl::flat_hash_set<absl::string_view> candidates(
          outcome->candidates.begin(), outcome->candidates.end());
      size_t found = 0;
      for (const auto& t : c->ground_truth) found += candidates.contains(t);

      TableResult r;
      r.table_id = table.id;
      r.ap = AveragePrecision(outcome->ranked, truth, options.depth);
      r.rr = ReciprocalRank(outcome->ranked, truth, options.depth);
      r.recall = static_cast<double>(found) / static_cast<double>(truth.size());
      r.candidates = candidates.size();
      r.truth_size = truth.size();
      if (options.keep_candidates) {
        r.candidate_set = std::move(outcome->candidates);
        r.truth = c->ground_truth;
      }
      sr.tables.push_back(std::move(r));
    }
    std::vector<double> ap, rr, recall, count;
    for (const TableResult& r : sr.tables) {
      ap.push_back(r.ap);
      rr.push_back(r.rr);
      recall.push_back(r.recall);
      count.push_back(static_cast<double>(r.candidates));
    }
    sr.map = StableMean(ap);
    sr.mrr = StableMean(rr);
    sr.mean_recall = StableMean(recall);
    sr.mean_candidates = StableMean(count);
    report.per_seed_size.push_back(std::move(sr));
  }
  return report;
}

json ReportToJson(const EvalReport& report) {
  json results = json::array();
  for (const SeedSizeReport& sr : report.per_seed_size) {
    json tables = json::array();
    for (const TableResult& r : sr.tables) {
      tables.push_back({{"id", r.table_id},
                        {"ap", r.ap},
                        {"rr", r.rr},
                        {"recall", r.recall},
                        {"candidates", r.candidates},
                        {"truth", r.truth_size}});
    }
    results.push_back({{"seed_size", sr.seed_size},
                       {"map", sr.map},
                       {"mrr", sr.mrr},
                       {"mean_recall", sr.mean_recall},
                       {"mean_candidates", sr.mean_candidates},
                       {"evaluated", sr.tables.size()},
                       {"skipped", sr.skipped},
                       {"failed", sr.failed},
                       {"tables", std::move(tables)}});
  }
  return {{"task", TaskName(report.task)},
          {"depth", report.depth},
          {"config", report.config},
          {"results", std::move(results)}};
}

ApBandRecall RecallByApBand(const SeedSizeReport& report) {
  ApBandRecall bands;
  StableSum one, zero, between;
  for (const TableResult& r : report.tables) {
    if (r.ap == 1.0) {
      one.Add(r.recall);
      ++bands.n_one;
    } else if (r.ap == 0.0) {
      zero.Add(r.recall);
      ++bands.n_zero;
    } else {
      between.Add(r.recall);
      ++bands.n_between;
    }
  }
  if (bands.n_one) bands.ap_one = one.value() / static_cast<double>(bands.n_one);
  if (bands.n_zero) bands.ap_zero = zero.value() / static_cast<double>(bands.n_zero);
  if (bands.n_between) {
    bands.between = between.value() / static_cast<double>(bands.n_between);
  }
  return bands;
}

}  // namespace tablepop
