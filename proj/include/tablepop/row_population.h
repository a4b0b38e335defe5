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

#ifndef TABLEPOP_ROW_POPULATION_H_
#define TABLEPOP_ROW_POPULATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "tablepop/kb.h"
#include "tablepop/suggestion.h"
#include "tablepop/table.h"
#include "tablepop/table_index.h"

namespace tablepop {

// Candidate sources for new rows. Bit values are used as provenance flags.
enum RowCandidateSource : uint8_t {
  kRowFromCategories = 1,  // A1
  kRowFromTypes = 2,       // A2
  kRowFromCaption = 4,     // B
  kRowFromEntities = 8,    // C
};

struct RowCandidateConfig {
  bool categories = true;
  bool types = false;
  bool caption = true;
  bool entities = true;
  size_t k_categories = 256;
  size_t k_types = 4096;
  size_t k_caption = 256;
  size_t k_entities = 256;
  // Entities without an abstract are left out of the pool by default.
  bool include_entities_without_abstract = false;

  absl::Status Validate() const;
};

struct RowCandidate {
  std::string entity;
  uint8_t provenance = 0;  // RowCandidateSource bits
};

enum class KbSimilarity { kRelations, kWlm, kJaccard };

struct RowRankingConfig {
  double lambda_e = 0.5;
  double lambda_l = 0.5;
  double lambda_c = 0.5;
  // Dirichlet pseudo-counts; unset means the mean representation length of
  // the respective field.
  std::optional<double> mu_labels;
  std::optional<double> mu_captions;
  KbSimilarity kb_similarity = KbSimilarity::kJaccard;
  bool use_entity_similarity = true;
  bool use_label_likelihood = true;
  bool use_caption_likelihood = true;
  // Floors every enabled factor at 1e-12.
  bool soft_zeros = false;
  // Rescales the KB estimator to sum to one over the candidate set before
  // mixing it with the table-corpus estimator.
  bool renormalize_kb = false;

  absl::Status Validate() const;
};

// (tf + mu * p_background) / (length + mu)
inline double DirichletSmoothed(double tf, double length, double mu,
                                double background) {
  return (tf + mu * background) / (length + mu);
}

// Both inputs sorted and unique.
double JaccardSimilarity(std::span<const std::string> a,
                         std::span<const std::string> b);
// Link-based relatedness of two outlink sets against a KB of
// `total_entities`. Zero overlap gives 0; the result is clamped to [0, 1].
double WlmSimilarity(std::span<const std::string> a,
                     std::span<const std::string> b, size_t total_entities);

absl::StatusOr<KbSimilarity> ParseKbSimilarity(absl::string_view name);
absl::string_view KbSimilarityName(KbSimilarity s);

// Ranks entities to append as new rows of a seed table. Holds references to
// immutable snapshots; all methods are const and thread-safe.
class RowPopulator {
 public:
  RowPopulator(const KbStore& kb, const TableIndex& index)
      : kb_(kb), index_(index) {}

  // Union of the enabled sources' top-k results minus the seeds, sorted by
  // entity id.
  std::vector<RowCandidate> SelectCandidates(
      const SeedTable& seed, const RowCandidateConfig& cfg) const;

  // Relation-pair model of the seed set. Returns 0 when the seeds have no
  // relations at all.
  absl::StatusOr<double> KbRelationSimilarity(
      absl::string_view entity, std::span<const std::string> seeds) const;
  absl::StatusOr<double> LinkSimilarity(absl::string_view a, absl::string_view b,
                                        KbSimilarity method) const;
  absl::StatusOr<double> AveragePairwiseSimilarity(
      absl::string_view entity, std::span<const std::string> seeds,
      KbSimilarity method) const;
  // Dispatches to the relation model or the averaged pairwise measure.
  absl::StatusOr<double> KbEntitySimilarity(absl::string_view entity,
                                            std::span<const std::string> seeds,
                                            KbSimilarity method) const;
  // #(e, E) / #(E), 0 when no table holds all seeds.
  double TableCooccurrence(absl::string_view entity,
                           std::span<const std::string> seeds) const;
  absl::StatusOr<double> EntitySimilarity(absl::string_view entity,
                                          std::span<const std::string> seeds,
                                          const RowRankingConfig& cfg) const;

  // P(L|e). Labels that normalize to nothing are dropped; with no labels
  // left the result is 1.
  double LabelLikelihood(std::span<const std::string> labels,
                         absl::string_view entity,
                         const RowRankingConfig& cfg) const;
  // P(c|e) over the caption's token sequence; 1 for a caption without terms.
  double CaptionLikelihood(absl::string_view caption, absl::string_view entity,
                           const RowRankingConfig& cfg) const;

  double LabelMu(const RowRankingConfig& cfg) const;
  double CaptionMu(const RowRankingConfig& cfg) const;

  absl::StatusOr<RankedSuggestions> Rank(const SeedTable& seed,
                                         const RowCandidateConfig& cand_cfg,
                                         const RowRankingConfig& rank_cfg) const;
  absl::StatusOr<RankedSuggestions> RankCandidates(
      const SeedTable& seed, std::span<const std::string> candidates,
      const RowRankingConfig& rank_cfg) const;

  const KbStore& kb() const { return kb_; }
  const TableIndex& index() const { return index_; }

 private:
  const KbStore& kb_;
  const TableIndex& index_;
};

}  // namespace tablepop

#endif  // TABLEPOP_ROW_POPULATION_H_
