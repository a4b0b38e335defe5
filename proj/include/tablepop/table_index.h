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

#ifndef TABLEPOP_TABLE_INDEX_H_
#define TABLEPOP_TABLE_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "tablepop/table.h"

namespace tablepop {

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

enum class SearchField { kCaption, kEntities, kLabels };

struct SearchHit {
  uint32_t doc = 0;
  double score = 0.0;
};

// What the index keeps of each corpus table.
struct IndexedTable {
  std::string id;
  std::string caption;
  std::vector<std::string> caption_terms;
  // Leftmost-column entities in row order (duplicates kept).
  std::vector<std::string> entities;
  // Normalized, non-empty heading labels in column order (duplicates kept).
  std::vector<std::string> labels;

  template <class Archive>
  void serialize(Archive& ar) {
    ar(id, caption, caption_terms, entities, labels);
  }
};

struct Posting {
  uint32_t doc = 0;
  uint32_t tf = 0;
};

// Recorded next to the persisted index for auditability.
struct IndexManifest {
  int format_version = 1;
  std::string corpus_sha256;
  std::string kb_sha256;
  std::string exclusion_sha256;
  Bm25Params bm25;
  uint64_t n_tables = 0;
  uint64_t n_holdout = 0;
};

// Inverted indexes and co-occurrence statistics over a table corpus. Built
// once; immutable and safe for concurrent readers afterwards.
class TableIndex {
 public:
  TableIndex() = default;

  // Tables whose id is in `excluded` do not contribute statistics; they are
  // kept verbatim as the holdout set (evaluation tables).
  static TableIndex Build(std::span<const Table> corpus,
                          const absl::flat_hash_set<std::string>& excluded,
                          Bm25Params params = {});

  absl::Status Save(const std::filesystem::path& dir,
                    const IndexManifest& manifest) const;
  static absl::StatusOr<TableIndex> Load(const std::filesystem::path& dir);
  static absl::StatusOr<IndexManifest> ReadManifest(
      const std::filesystem::path& dir);

  size_t num_tables() const { return tables_.size(); }
  const IndexedTable& table(uint32_t doc) const { return tables_[doc]; }
  std::optional<uint32_t> FindTable(absl::string_view id) const;
  const Bm25Params& bm25() const { return params_; }
  std::span<const Table> holdout() const { return holdout_; }

  // Top-k documents by BM25 for the field. Only documents matching at least
  // one query token are returned; ties go to the smaller table id.
  std::vector<SearchHit> Search(SearchField field,
                                std::span<const std::string> query,
                                size_t k) const;
  // BM25 score of a single document.
  double Score(SearchField field, std::span<const std::string> query,
               uint32_t doc) const;

  // Sorted document lists.
  std::span<const Posting> EntityPostings(absl::string_view entity) const;
  std::span<const Posting> LabelPostings(absl::string_view label) const;
  std::span<const Posting> CaptionPostings(absl::string_view term) const;

  // #(e)
  size_t CountTablesWithEntity(absl::string_view entity) const;
  // #(l), label already normalized.
  size_t CountTablesWithLabel(absl::string_view label) const;
  // #(E): tables containing every entity; num_tables() for an empty set.
  size_t CountTablesWithAll(std::span<const std::string> entities) const;
  // #(l, e)
  size_t CountTablesWithEntityAndLabel(absl::string_view entity,
                                       absl::string_view label) const;
  // #(l1, l2)
  size_t CountLabelPair(absl::string_view l1, absl::string_view l2) const;
  // #(t, e): tables with caption term t and entity e.
  size_t CountTablesWithEntityAndCaptionTerm(absl::string_view entity,
                                             absl::string_view term) const;

  // tf(t, e) over heading-label terms of tables containing e, and |e|.
  uint64_t HeadingTermFrequency(absl::string_view entity,
                                absl::string_view term) const;
  uint64_t HeadingLength(absl::string_view entity) const;
  // Background model over heading-label terms of all tables.
  double LabelBackground(absl::string_view term) const;
  size_t label_vocabulary_size() const { return label_term_counts_.size(); }
  // Mean |e| over entities that appear in at least one table; 0 if none.
  double mean_heading_length() const;
  size_t num_indexed_entities() const { return entities_.postings.size(); }

  // Heading-label terms of one table (tokens of the normalized labels).
  static std::vector<std::string> LabelTerms(const IndexedTable& table);

 private:
  struct FieldIndex {
    absl::flat_hash_map<std::string, std::vector<Posting>> postings;
    std::vector<uint32_t> lengths;
    double avg_length = 0.0;
  };
  struct EntityLabelStats {
    absl::flat_hash_map<std::string, uint64_t> tf;
    uint64_t length = 0;
  };

  void Finalize();
  const FieldIndex& field(SearchField f) const;
  double Idf(size_t df) const;

  Bm25Params params_;
  std::vector<IndexedTable> tables_;
  std::vector<Table> holdout_;
  absl::flat_hash_map<std::string, uint32_t> by_id_;
  FieldIndex captions_;
  FieldIndex entities_;
  FieldIndex labels_;
  absl::flat_hash_map<std::string, EntityLabelStats> heading_stats_;
  absl::flat_hash_map<std::string, uint64_t> label_term_counts_;
  uint64_t label_term_total_ = 0;
};

}  // namespace tablepop

#endif  // TABLEPOP_TABLE_INDEX_H_
