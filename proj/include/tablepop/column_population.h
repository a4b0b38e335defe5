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

#ifndef TABLEPOP_COLUMN_POPULATION_H_
#define TABLEPOP_COLUMN_POPULATION_H_

#include <cstdint>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "tablepop/suggestion.h"
#include "tablepop/table.h"
#include "tablepop/table_index.h"

namespace tablepop {

enum ColumnCandidateSource : uint8_t {
  kColumnFromCaption = 1,   // A
  kColumnFromLabels = 2,    // B
  kColumnFromEntities = 4,  // C
};

struct ColumnCandidateConfig {
  bool caption = true;
  bool labels = true;
  bool entities = true;
  size_t k_caption = 256;
  size_t k_labels = 256;
  size_t k_entities = 64;

  absl::Status Validate() const;
};

struct ColumnRankingConfig {
  // Table relevance factors: P(T|c), P(T|L), P(T|E).
  bool use_caption = true;
  bool use_labels = true;
  bool use_entities = true;
  // Use raw BM25 caption scores instead of dividing by the best candidate.
  bool raw_caption_scores = false;
  // P(l|T) = 1/|T_L| instead of the indicator.
  bool normalized_label_likelihood = false;
};

struct CandidateTable {
  uint32_t doc = 0;
  uint8_t provenance = 0;  // ColumnCandidateSource bits
  double entity_coverage = 1.0;     // P(T|E)
  double caption_similarity = 1.0;  // P(T|c)
  double label_overlap = 1.0;       // P(T|L)
};

struct ColumnCandidates {
  // Normalized candidate labels, sorted.
  std::vector<std::string> labels;
  // Retrieved tables, ascending doc.
  std::vector<CandidateTable> tables;
};

// Seed-side evidence in the form every relevance factor consumes.
struct ColumnQuery {
  std::vector<std::string> entities;        // distinct seed entities
  std::vector<std::string> labels;          // distinct normalized labels
  std::vector<std::string> caption_terms;

  static ColumnQuery FromSeed(const SeedTable& seed);
};

// Ranks heading labels to add as new columns, using retrieved tables as a
// bridge between the seed table and candidate labels.
class ColumnPopulator {
 public:
  explicit ColumnPopulator(const TableIndex& index) : index_(index) {}

  ColumnCandidates SelectCandidates(const SeedTable& seed,
                                    const ColumnCandidateConfig& cfg) const;

  // Fills the relevance factors of `tables` in place. The caption factor is
  // the BM25 caption score divided by the largest such score among
  // `tables` (0 when no term matches).
  void ScoreTables(const ColumnQuery& query, const ColumnRankingConfig& cfg,
                   std::span<CandidateTable> tables) const;

  absl::StatusOr<RankedSuggestions> Rank(
      const SeedTable& seed, const ColumnCandidateConfig& cand_cfg,
      const ColumnRankingConfig& rank_cfg) const;
  // Bridge model over an explicit candidate set.
  RankedSuggestions RankCandidates(const SeedTable& seed,
                                   const ColumnCandidates& candidates,
                                   const ColumnRankingConfig& rank_cfg) const;

  // cs(l1, l2) = #(l1, l2) / #(l1) over normalized labels.
  double AcsConsistency(absl::string_view l1, absl::string_view l2) const;
  // Mean consistency of `label` with each seed label.
  double LabelBenefit(std::span<const std::string> seed_labels,
                      absl::string_view label) const;
  // Baseline ranking of the same candidate labels by label benefit.
  absl::StatusOr<RankedSuggestions> RankBaseline(
      const SeedTable& seed, const ColumnCandidateConfig& cand_cfg) const;
  RankedSuggestions RankBaselineCandidates(
      const SeedTable& seed, const ColumnCandidates& candidates) const;

  const TableIndex& index() const { return index_; }

 private:
  const TableIndex& index_;
};

}  // namespace tablepop

#endif  // TABLEPOP_COLUMN_POPULATION_H_
