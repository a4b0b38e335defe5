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

#ifndef TABLEPOP_TABLE_H_
#define TABLEPOP_TABLE_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"

namespace tablepop {

struct Cell {
  std::string text;
  // Canonical entity id when the cell links to a knowledge-base entity.
  std::optional<std::string> entity;

  bool operator==(const Cell&) const = default;
};

// A corpus table: caption, heading row and a grid of content rows. Every row
// has exactly headings.size() cells.
struct Table {
  std::string id;
  std::string caption;
  std::vector<std::string> headings;
  std::vector<std::vector<Cell>> rows;

  size_t num_rows() const { return rows.size(); }
  size_t num_columns() const { return headings.size(); }

  // Entities linked from the leftmost column, in row order. Rows whose first
  // cell is plain text are skipped.
  std::vector<std::string> LeftmostEntities() const;

  bool operator==(const Table&) const = default;
};

// The table the user is editing.
struct SeedTable {
  std::string caption;
  std::vector<std::string> entities;
  std::vector<std::string> labels;

  bool operator==(const SeedTable&) const = default;
};

// Seed entities must be unique.
absl::Status ValidateSeedTable(const SeedTable& seed);

// Seed table wire format: {"caption": str, "entities": [str], "labels": [str]}.
absl::StatusOr<SeedTable> ParseSeedTable(absl::string_view json);
std::string SerializeSeedTable(const SeedTable& seed);

struct RecordError {
  size_t line = 0;  // 1-based
  std::string message;
};

struct CorpusParseResult {
  std::vector<Table> tables;
  std::vector<RecordError> errors;
};

// Parses one corpus record (a single-line JSON object).
absl::StatusOr<Table> ParseTableRecord(absl::string_view line);

// Reads newline-delimited corpus records. Malformed records are reported in
// `errors` and skipped; an unreadable stream is a fatal error. Blank lines are
// ignored.
absl::StatusOr<CorpusParseResult> ParseCorpus(std::istream& in);
absl::StatusOr<CorpusParseResult> ReadCorpusFile(const std::string& path);

std::string SerializeTable(const Table& table);

// True iff every leftmost cell is an entity, those entities are pairwise
// distinct, there are at least `min_rows` rows and at least
// `min_extra_cols` columns besides the entity column.
bool IsEntityFocused(const Table& table, size_t min_rows = 6,
                     size_t min_extra_cols = 3);

// Canonical form used for every label comparison: ASCII-lowercased, trimmed,
// trailing ':' '.' ',' ';' removed, internal whitespace collapsed, and a
// plural 's' dropped from a final token longer than three bytes (never from
// "ss"). Idempotent on arbitrary byte strings.
std::string NormalizeLabel(absl::string_view raw);

// Table counts by share of entity cells in the leftmost column. Each level
// includes the stricter ones below it.
struct EntityColumnLadder {
  size_t any_entity = 0;
  size_t at_least_60 = 0;
  size_t at_least_80 = 0;
  size_t all_entities = 0;
  size_t all_unique = 0;
};

// With `with_constraints`, only tables with more than 5 rows and more than
// 3 columns are counted.
EntityColumnLadder CountEntityColumnLadder(std::span<const Table> tables,
                                           bool with_constraints);

}  // namespace tablepop

#endif  // TABLEPOP_TABLE_H_
