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

#include "tablepop/kb.h"

#include <algorithm>
#include <fstream>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "tablepop/status_macros.h"
#include "tablepop/text.h"

namespace tablepop {
namespace {

using nlohmann::json;

constexpr int kMaxRedirectHops = 16;

struct Triple {
  std::string s, p, o;
};

struct RawRecord {
  EntityRecord record;
  std::vector<Triple> triples;
};

template <typename T>
void SortUnique(std::vector<T>* v) {
  std::sort(v->begin(), v->end());
  v->erase(std::unique(v->begin(), v->end()), v->end());
}

absl::StatusOr<std::vector<std::string>> OptionalStrings(const json& j,
                                                         const char* field) {
  std::vector<std::string> out;
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("field '", field, "' must be an array of strings"));
  }
  for (const json& v : *it) {
    if (!v.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("field '", field, "' must be an array of strings"));
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

absl::StatusOr<RawRecord> ParseKbRecord(absl::string_view line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("invalid JSON");
  if (!j.is_object()) return absl::InvalidArgumentError("record is not an object");
  RawRecord raw;
  EntityRecord& rec = raw.record;
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    return absl::InvalidArgumentError("missing or invalid 'id'");
  }
  rec.id = id->get<std::string>();
  TP_ASSIGN_OR_RETURN(rec.categories, OptionalStrings(j, "categories"));
  TP_ASSIGN_OR_RETURN(rec.types, OptionalStrings(j, "types"));
  TP_ASSIGN_OR_RETURN(rec.outlinks, OptionalStrings(j, "outlinks"));
  if (auto a = j.find("abstract"); a != j.end() && !a->is_null()) {
    if (!a->is_string()) {
      return absl::InvalidArgumentError("field 'abstract' must be a string");
    }
    rec.abstract_terms = Tokenize(a->get<std::string>());
    rec.has_abstract = !rec.abstract_terms.empty();
  }
  if (auto t = j.find("triples"); t != j.end() && !t->is_null()) {
    if (!t->is_array()) {
      return absl::InvalidArgumentError("field 'triples' must be an array");
    }
    for (const json& triple : *t) {
      if (!triple.is_array() || triple.size() != 3 || !triple[0].is_string() ||
          !triple[1].is_string() || !triple[2].is_string()) {
        return absl::InvalidArgumentError(
            "each triple must be [subject, predicate, object]");
      }
      raw.triples.push_back({triple[0].get<std::string>(),
                             triple[1].get<std::string>(),
                             triple[2].get<std::string>()});
    }
  }
  return raw;
}

}  // namespace

absl::StatusOr<KbStore> KbStore::Load(std::istream& dump,
                                      std::istream* redirects,
                                      std::vector<RecordError>* errors) {
  if (!dump.good()) return absl::UnavailableError("KB stream is not readable");
  KbStore kb;
  std::string line;
  if (redirects != nullptr) {
    size_t line_no = 0;
    while (std::getline(*redirects, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::vector<std::string> parts = absl::StrSplit(line, '\t');
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
        if (errors) {
          errors->push_back(
              {line_no, "redirect line must be 'from<TAB>to'"});
        }
        continue;
      }
      kb.redirects_[parts[0]] = parts[1];
    }
  }

  std::vector<RawRecord> raws;
  size_t line_no = 0;
  while (std::getline(dump, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto raw = ParseKbRecord(line);
    if (!raw.ok()) {
      if (errors) errors->push_back({line_no, std::string(raw.status().message())});
      continue;
    }
    if (kb.by_id_.contains(raw->record.id)) {
      return absl::AlreadyExistsError(
          absl::StrCat("duplicate entity id '", raw->record.id, "' at line ",
                       line_no));
    }
    kb.by_id_.emplace(raw->record.id, static_cast<uint32_t>(raws.size()));
    raws.push_back(*std::move(raw));
  }
  if (dump.bad()) return absl::DataLossError("read error in KB stream");

  kb.records_.reserve(raws.size());
  for (RawRecord& raw : raws) {
    for (std::string& link : raw.record.outlinks) link = kb.Canonical(link);
    kb.records_.push_back(std::move(raw.record));
  }
  // Each triple contributes one pair to each endpoint present in the store.
  for (const RawRecord& raw : raws) {
    for (const Triple& t : raw.triples) {
      const std::string s = kb.Canonical(t.s);
      const std::string o = kb.Canonical(t.o);
      if (s == o) continue;
      if (auto it = kb.by_id_.find(s); it != kb.by_id_.end()) {
        kb.records_[it->second].relations.push_back({t.p, o});
      }
      if (auto it = kb.by_id_.find(o); it != kb.by_id_.end()) {
        kb.records_[it->second].relations.push_back({s, t.p});
      }
    }
  }

  for (uint32_t i = 0; i < kb.records_.size(); ++i) {
    EntityRecord& rec = kb.records_[i];
    SortUnique(&rec.categories);
    SortUnique(&rec.types);
    SortUnique(&rec.relations);
    SortUnique(&rec.outlinks);
    for (const auto& c : rec.categories) kb.by_category_[c].push_back(i);
    for (const auto& t : rec.types) kb.by_type_[t].push_back(i);
    if (rec.has_abstract) {
      ++kb.entities_with_abstract_;
      for (const auto& term : rec.abstract_terms) ++kb.abstract_counts_[term];
      kb.abstract_total_ += rec.abstract_terms.size();
    }
  }
  return kb;
}

absl::StatusOr<KbStore> KbStore::LoadFiles(const std::string& dump_path,
                                           const std::string& redirects_path,
                                           std::vector<RecordError>* errors) {
  std::ifstream dump(dump_path);
  if (!dump) return absl::NotFoundError(absl::StrCat("cannot open ", dump_path));
  if (redirects_path.empty()) return Load(dump, nullptr, errors);
  std::ifstream redirects(redirects_path);
  if (!redirects) {
    return absl::NotFoundError(absl::StrCat("cannot open ", redirects_path));
  }
  return Load(dump, &redirects, errors);
}

std::optional<uint32_t> KbStore::IndexOf(absl::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const EntityRecord* KbStore::Find(absl::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::string KbStore::Canonical(absl::string_view id) const {
  std::string current(id);
  for (int hop = 0; hop < kMaxRedirectHops; ++hop) {
    auto it = redirects_.find(current);
    if (it == redirects_.end()) break;
    current = it->second;
  }
  return current;
}

std::span<const uint32_t> KbStore::EntitiesWithProperty(
    EntityProperty property, absl::string_view value) const {
  const auto& index =
      property == EntityProperty::kCategories ? by_category_ : by_type_;
  auto it = index.find(value);
  if (it == index.end()) return {};
  return it->second;
}

double KbStore::AbstractBackground(absl::string_view term) const {
  if (abstract_total_ == 0) return 0.0;
  auto it = abstract_counts_.find(term);
  if (it == abstract_counts_.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(abstract_total_);
}

double KbStore::mean_abstract_length() const {
  if (entities_with_abstract_ == 0) return 0.0;
  return static_cast<double>(abstract_total_) /
         static_cast<double>(entities_with_abstract_);
}

void KbStore::CanonicalizeLinks(Table* table) const {
  for (auto& row : table->rows) {
    for (Cell& cell : row) {
      if (!cell.entity) continue;
      std::string canonical = Canonical(*cell.entity);
      if (by_id_.contains(canonical)) {
        cell.entity = std::move(canonical);
      } else {
        cell.entity.reset();
      }
    }
  }
}

absl::StatusOr<size_t> PropertyOverlapScore(const KbStore& kb,
                                            absl::string_view entity,
                                            std::span<const std::string> seeds,
                                            EntityProperty property) {
  auto values = [property](const EntityRecord& r) -> const std::vector<std::string>& {
    return property == EntityProperty::kCategories ? r.categories : r.types;
  };
  const EntityRecord* target = kb.Find(entity);
  if (target == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown entity '", entity, "'"));
  }
  absl::flat_hash_set<absl::string_view> seed_union;
  for (const auto& seed : seeds) {
    const EntityRecord* rec = kb.Find(seed);
    if (rec == nullptr) {
      return absl::NotFoundError(absl::StrCat("unknown entity '", seed, "'"));
    }
    for (const auto& v : values(*rec)) seed_union.insert(v);
  }
  size_t overlap = 0;
  for (const auto& v : values(*target)) overlap += seed_union.contains(v);
  return overlap;
}

}  // namespace tablepop
