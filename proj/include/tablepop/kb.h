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

#ifndef TABLEPOP_KB_H_
#define TABLEPOP_KB_H_

#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "tablepop/table.h"

namespace tablepop {

// A triple with the described entity's own position removed: (p, o) when the
// entity is the subject, (s, p) when it is the object.
struct RelationPair {
  std::string first;
  std::string second;

  auto operator<=>(const RelationPair&) const = default;
};

struct EntityRecord {
  std::string id;
  // Sorted, unique.
  std::vector<std::string> categories;
  std::vector<std::string> types;
  std::vector<RelationPair> relations;
  std::vector<std::string> outlinks;
  // Tokenized abstract; empty when the dump has none.
  std::vector<std::string> abstract_terms;
  bool has_abstract = false;
};

enum class EntityProperty { kCategories, kTypes };

// Immutable knowledge-base snapshot: entity records, redirects, property
// inverted indexes and the background language model over abstracts.
class KbStore {
 public:
  KbStore() = default;

  // Loads the newline-delimited KB dump. Malformed records are appended to
  // `errors` (when given) and skipped; a duplicate id fails the load.
  // `redirects` holds optional "from<TAB>to" lines.
  static absl::StatusOr<KbStore> Load(std::istream& dump,
                                      std::istream* redirects,
                                      std::vector<RecordError>* errors);
  static absl::StatusOr<KbStore> LoadFiles(const std::string& dump_path,
                                           const std::string& redirects_path,
                                           std::vector<RecordError>* errors);

  size_t size() const { return records_.size(); }
  // Entity count |E| used by link-based relatedness.
  size_t total_entities() const { return records_.size(); }

  const EntityRecord& record(uint32_t index) const { return records_[index]; }
  std::span<const EntityRecord> records() const { return records_; }
  std::optional<uint32_t> IndexOf(absl::string_view id) const;
  const EntityRecord* Find(absl::string_view id) const;

  // Follows redirect chains; cycles are cut.
  std::string Canonical(absl::string_view id) const;

  // Entity indexes carrying `value` for the given property, ascending.
  std::span<const uint32_t> EntitiesWithProperty(EntityProperty property,
                                                 absl::string_view value) const;

  // Maximum-likelihood term probability over the abstracts of all entities
  // that have one.
  double AbstractBackground(absl::string_view term) const;
  size_t abstract_vocabulary_size() const { return abstract_counts_.size(); }
  // Mean abstract length over entities with an abstract; 0 if none.
  double mean_abstract_length() const;

  // Canonicalizes entity links in a parsed table: redirects are followed and
  // links to entities absent from the store become plain text.
  void CanonicalizeLinks(Table* table) const;

 private:
  std::vector<EntityRecord> records_;
  absl::flat_hash_map<std::string, uint32_t> by_id_;
  absl::flat_hash_map<std::string, std::string> redirects_;
  absl::flat_hash_map<std::string, std::vector<uint32_t>> by_category_;
  absl::flat_hash_map<std::string, std::vector<uint32_t>> by_type_;
  absl::flat_hash_map<std::string, uint64_t> abstract_counts_;
  uint64_t abstract_total_ = 0;
  size_t entities_with_abstract_ = 0;
};

// |P_e ∩ (∪ P_seed)| for the chosen property. Unknown ids are NotFound.
absl::StatusOr<size_t> PropertyOverlapScore(const KbStore& kb,
                                            absl::string_view entity,
                                            std::span<const std::string> seeds,
                                            EntityProperty property);

}  // namespace tablepop

#endif  // TABLEPOP_KB_H_
