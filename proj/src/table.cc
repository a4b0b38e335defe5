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

#include "tablepop/table.h"

#include <fstream>
#include <unordered_set>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "tablepop/status_macros.h"
#include "tablepop/text.h"

namespace tablepop {
namespace {

using nlohmann::json;

absl::Status TypeError(absl::string_view field, absl::string_view expected) {
  return absl::InvalidArgumentError(
      absl::StrCat("field '", field, "' must be ", expected));
}

absl::StatusOr<std::vector<std::string>> StringList(const json& obj,
                                                    const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing field '", field, "'"));
  }
  if (!it->is_array()) return TypeError(field, "an array of strings");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const json& v : *it) {
    if (!v.is_string()) return TypeError(field, "an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

absl::StatusOr<Cell> ParseCell(const json& j) {
  if (!j.is_object()) return TypeError("rows", "a list of lists of cells");
  Cell cell;
  if (auto t = j.find("text"); t != j.end()) {
    if (!t->is_string()) return TypeError("text", "a string");
    cell.text = t->get<std::string>();
  }
  if (auto e = j.find("entity"); e != j.end() && !e->is_null()) {
    if (!e->is_string()) return TypeError("entity", "a string or null");
    cell.entity = e->get<std::string>();
  }
  return cell;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsTrailingPunct(char c) {
  return c == ':' || c == '.' || c == ',' || c == ';';
}

// One pass of the normalization rules over an already lowercased,
// whitespace-collapsed string.
std::string NormalizeStep(std::string s) {
  while (!s.empty() && (IsSpace(s.back()) || IsTrailingPunct(s.back()))) {
    s.pop_back();
  }
  size_t token_start = s.rfind(' ');
  token_start = token_start == std::string::npos ? 0 : token_start + 1;
  const size_t token_len = s.size() - token_start;
  if (token_len > 3 && s.back() == 's' && s[s.size() - 2] != 's') {
    s.pop_back();
  }
  return s;
}

}  // namespace

std::vector<std::string> Table::LeftmostEntities() const {
  std::vector<std::string> out;
  for (const auto& row : rows) {
    if (!row.empty() && row.front().entity.has_value()) {
      out.push_back(*row.front().entity);
    }
  }
  return out;
}

absl::Status ValidateSeedTable(const SeedTable& seed) {
  absl::flat_hash_set<absl::string_view> seen;
  for (const auto& e : seed.entities) {
    if (!seen.insert(e).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate seed entity '", e, "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SeedTable> ParseSeedTable(absl::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("seed table is not a JSON object");
  }
  SeedTable seed;
  if (auto c = j.find("caption"); c != j.end()) {
    if (!c->is_string()) return TypeError("caption", "a string");
    seed.caption = c->get<std::string>();
  }
  if (j.contains("entities")) {
    TP_ASSIGN_OR_RETURN(seed.entities, StringList(j, "entities"));
  }
  if (j.contains("labels")) {
    TP_ASSIGN_OR_RETURN(seed.labels, StringList(j, "labels"));
  }
  TP_RETURN_IF_ERROR(ValidateSeedTable(seed));
  return seed;
}

std::string SerializeSeedTable(const SeedTable& seed) {
  json j = {{"caption", seed.caption},
            {"entities", seed.entities},
            {"labels", seed.labels}};
  return j.dump();
}

absl::StatusOr<Table> ParseTableRecord(absl::string_view line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("invalid JSON");
  if (!j.is_object()) return absl::InvalidArgumentError("record is not an object");

  Table table;
  auto id = j.find("id");
  if (id == j.end()) return absl::InvalidArgumentError("missing field 'id'");
  if (!id->is_string()) return TypeError("id", "a string");
  table.id = id->get<std::string>();
  if (table.id.empty()) return absl::InvalidArgumentError("empty table id");

  if (auto c = j.find("caption"); c != j.end()) {
    if (!c->is_string()) return TypeError("caption", "a string");
    table.caption = c->get<std::string>();
  }
  TP_ASSIGN_OR_RETURN(table.headings, StringList(j, "headings"));

  auto rows = j.find("rows");
  if (rows == j.end()) return absl::InvalidArgumentError("missing field 'rows'");
  if (!rows->is_array()) return TypeError("rows", "a list of lists of cells");
  table.rows.reserve(rows->size());
  for (size_t r = 0; r < rows->size(); ++r) {
    const json& row = (*rows)[r];
    if (!row.is_array()) return TypeError("rows", "a list of lists of cells");
    if (row.size() != table.headings.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", r, " has ", row.size(), " cells under ",
                       table.headings.size(), " headings"));
    }
    std::vector<Cell> cells;
    cells.reserve(row.size());
    for (const json& c : row) {
      TP_ASSIGN_OR_RETURN(Cell cell, ParseCell(c));
      cells.push_back(std::move(cell));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

absl::StatusOr<CorpusParseResult> ParseCorpus(std::istream& in) {
  if (!in.good()) return absl::UnavailableError("corpus stream is not readable");
  CorpusParseResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto table = ParseTableRecord(line);
    if (!table.ok()) {
      result.errors.push_back({line_no, std::string(table.status().message())});
      continue;
    }
    if (!ids.insert(table->id).second) {
      result.errors.push_back(
          {line_no, absl::StrCat("duplicate table id '", table->id, "'")});
      continue;
    }
    result.tables.push_back(*std::move(table));
  }
  if (in.bad()) return absl::DataLossError("read error in corpus stream");
  return result;
}

absl::StatusOr<CorpusParseResult> ReadCorpusFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseCorpus(in);
}

std::string SerializeTable(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json cells = json::array();
    for (const auto& cell : row) {
      cells.push_back({{"text", cell.text},
                       {"entity", cell.entity ? json(*cell.entity) : json()}});
    }
    rows.push_back(std::move(cells));
  }
  json j = {{"id", table.id},
            {"caption", table.caption},
            {"headings", table.headings},
            {"rows", std::move(rows)}};
  return j.dump();
}

bool IsEntityFocused(const Table& table, size_t min_rows,
                     size_t min_extra_cols) {
  if (table.num_rows() < min_rows) return false;
  if (table.num_columns() < min_extra_cols + 1) return false;
  absl::flat_hash_set<absl::string_view> seen;
  for (const auto& row : table.rows) {
    if (row.empty() || !row.front().entity) return false;
    if (!seen.insert(*row.front().entity).second) return false;
  }
  return true;
}

std::string NormalizeLabel(absl::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  bool pending_space = false;
  for (char c : AsciiLower(raw)) {
    if (IsSpace(c)) {
      pending_space = !s.empty();
      continue;
    }
    if (pending_space) s.push_back(' ');
    pending_space = false;
    s.push_back(c);
  }
  for (;;) {
    std::string next = NormalizeStep(s);
    if (next == s) return s;
    s = std::move(next);
  }
}

EntityColumnLadder CountEntityColumnLadder(std::span<const Table> tables,
                                           bool with_constraints) {
  EntityColumnLadder ladder;
  for (const Table& t : tables) {
    if (with_constraints && (t.num_rows() <= 5 || t.num_columns() <= 3)) {
      continue;
    }
    if (t.num_rows() == 0) continue;
    const std::vector<std::string> entities = t.LeftmostEntities();
    if (entities.empty()) continue;
    ++ladder.any_entity;
    // Integer comparisons avoid rounding at the 60% / 80% boundaries.
    const size_t n = t.num_rows();
    const size_t k = entities.size();
    if (k * 10 >= n * 6) ++ladder.at_least_60;
    if (k * 10 >= n * 8) ++ladder.at_least_80;
    if (k == n) {
      ++ladder.all_entities;
      absl::flat_hash_set<absl::string_view> unique(entities.begin(),
                                                  entities.end());
      if (unique.size() == n) ++ladder.all_unique;
    }
  }
  return ladder;
}

}  // namespace tablepop
