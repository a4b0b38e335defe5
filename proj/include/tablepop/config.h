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

#ifndef TABLEPOP_CONFIG_H_
#define TABLEPOP_CONFIG_H_

#include "absl/strings/string_view.h"

#include "absl/status/statusor.h"
#include "json.hpp"
#include "tablepop/evaluation.h"

namespace tablepop {

struct EvalConfig {
  RowMethod rows;
  ColumnMethod columns;
  size_t depth = 1000;
};

// All keys are optional; unknown keys are rejected. Layout:
//   {"depth": 1000,
//    "rows": {"candidates": {"methods": [...], "k": {...},
//                            "include_without_abstract": false},
//             "ranking": {"components": [...], "kb_similarity": "jaccard",
//                         "lambda_e": 0.5, "lambda_l": 0.5, "lambda_c": 0.5,
//                         "mu_labels": null, "mu_captions": null,
//                         "soft_zeros": false, "renormalize_kb": false}},
//    "columns": {"candidates": {"methods": [...], "k": {...}},
//                "ranking": {"components": [...], "baseline": null,
//                            "raw_caption_scores": false,
//                            "normalized_label_likelihood": false}}}
// Out-of-range values and unknown names are OutOfRange; malformed JSON
// shapes are InvalidArgument.
absl::StatusOr<EvalConfig> ParseEvalConfig(const nlohmann::json& j);
nlohmann::json EvalConfigToJson(const EvalConfig& cfg);

absl::Status ParseRowCandidateJson(const nlohmann::json& j, RowCandidateConfig* cfg);
absl::Status ParseRowRankingJson(const nlohmann::json& j, RowRankingConfig* cfg);
absl::Status ParseColumnCandidateJson(const nlohmann::json& j,
                                      ColumnCandidateConfig* cfg);
absl::Status ParseColumnRankingJson(const nlohmann::json& j, ColumnMethod* method);

// Comma-separated component lists as used on the command line. Row names:
// esim|entity_similarity, label|label_likelihood, caption|caption_likelihood.
// Column names: caption, labels, entities.
absl::Status SetRowComponents(absl::string_view list, RowRankingConfig* cfg);
absl::Status SetColumnComponents(absl::string_view list, ColumnRankingConfig* cfg);
// Row methods: categories, types, caption, entities. Column methods:
// caption, labels, entities.
absl::Status SetRowMethods(absl::string_view list, RowCandidateConfig* cfg);
absl::Status SetColumnMethods(absl::string_view list, ColumnCandidateConfig* cfg);

}  // namespace tablepop

#endif  // TABLEPOP_CONFIG_H_
