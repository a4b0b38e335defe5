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

#include "tablepop/table_index.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <cereal/archives/portable_binary.hpp>
#include <cereal/types/optional.hpp>
#include <cereal/types/string.hpp>
#include <cereal/types/vector.hpp>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "tablepop/text.h"

namespace tablepop {

template <class Archive>
void serialize(Archive& ar, Cell& cell) {
  ar(cell.text, cell.entity);
}

template <class Archive>
void serialize(Archive& ar, Table& table) {
  ar(table.id, table.caption, table.headings, table.rows);
}

namespace {

constexpr char kTablesFile[] = "tables.bin";
constexpr char kHoldoutFile[] = "holdout.bin";
constexpr char kManifestFile[] = "manifest.json";
constexpr char kMagic[] = "tablepop-index";
constexpr uint32_t kFormatVersion = 1;

size_t IntersectCount(std::span<const Posting> a, std::span<const Posting> b) {
  size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].doc < b[j].doc) {
      ++i;
    } else if (b[j].doc < a[i].doc) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

template <typename Map>
std::span<const Posting> Lookup(const Map& map, absl::string_view key) {
  auto it = map.find(key);
  if (it == map.end()) return {};
  return it->second;
}

}  // namespace

std::vector<std::string> TableIndex::LabelTerms(const IndexedTable& table) {
  std::vector<std::string> terms;
  for (const auto& label : table.labels) {
    for (auto& t : Tokenize(label)) terms.push_back(std::move(t));
  }
  return terms;
}

TableIndex TableIndex::Build(std::span<const Table> corpus,
                             const absl::flat_hash_set<std::string>& excluded,
                             Bm25Params params) {
  TableIndex index;
  index.params_ = params;
  for (const Table& table : corpus) {
    if (excluded.contains(table.id)) {
      index.holdout_.push_back(table);
      continue;
    }
    IndexedTable doc;
    doc.id = table.id;
    doc.caption = table.caption;
    doc.caption_terms = Tokenize(table.caption);
    doc.entities = table.LeftmostEntities();
    for (const auto& heading : table.headings) {
      std::string label = NormalizeLabel(heading);
      if (!label.empty()) doc.labels.push_back(std::move(label));
    }
    index.tables_.push_back(std::move(doc));
  }
  index.Finalize();
  return index;
}

void TableIndex::Finalize() {
  by_id_.clear();
  captions_ = {};
  entities_ = {};
  labels_ = {};
  heading_stats_.clear();
  label_term_counts_.clear();
  label_term_total_ = 0;

  auto add_field = [](FieldIndex* field, uint32_t doc,
                      const std::vector<std::string>& tokens) {
    absl::flat_hash_map<absl::string_view, uint32_t> tf;
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [term, count] : tf) {
      field->postings[std::string(term)].push_back({doc, count});
    }
    field->lengths.push_back(static_cast<uint32_t>(tokens.size()));
  };

  for (uint32_t doc = 0; doc < tables_.size(); ++doc) {
    const IndexedTable& t = tables_[doc];
    by_id_.emplace(t.id, doc);
    add_field(&captions_, doc, t.caption_terms);
    add_field(&entities_, doc, t.entities);
    add_field(&labels_, doc, t.labels);

    const std::vector<std::string> terms = LabelTerms(t);
    absl::flat_hash_map<absl::string_view, uint64_t> counts;
    for (const auto& term : terms) ++counts[term];
    for (const auto& [term, count] : counts) {
      label_term_counts_[std::string(term)] += count;
    }
    label_term_total_ += terms.size();

    absl::flat_hash_set<absl::string_view> distinct(t.entities.begin(),
                                                   t.entities.end());
    for (absl::string_view e : distinct) {
      EntityLabelStats& stats = heading_stats_[std::string(e)];
      for (const auto& [term, count] : counts) {
        stats.tf[std::string(term)] += count;
      }
      stats.length += terms.size();
    }
  }

  for (FieldIndex* f : {&captions_, &entities_, &labels_}) {
    uint64_t total = 0;
    for (uint32_t len : f->lengths) total += len;
    f->avg_length = tables_.empty()
                        ? 0.0
                        : static_cast<double>(total) /
                              static_cast<double>(tables_.size());
  }
}

const TableIndex::FieldIndex& TableIndex::field(SearchField f) const {
  switch (f) {
    case SearchField::kCaption:
      return captions_;
    case SearchField::kEntities:
      return entities_;
    case SearchField::kLabels:
      return labels_;
  }
  return captions_;
}

double TableIndex::Idf(size_t df) const {
  const double n = static_cast<double>(tables_.size());
  const double d = static_cast<double>(df);
  return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

std::optional<uint32_t> TableIndex::FindTable(absl::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<SearchHit> TableIndex::Search(SearchField f,
                                          std::span<const std::string> query,
                                          size_t k) const {
  std::vector<SearchHit> hits;
  if (query.empty() || k == 0) return hits;
  const FieldIndex& fi = field(f);
  const double avg = fi.avg_length > 0 ? fi.avg_length : 1.0;
  absl::flat_hash_map<uint32_t, double> acc;
  for (const auto& q : query) {
    auto postings = Lookup(fi.postings, q);
    if (postings.empty()) continue;
    const double idf = Idf(postings.size());
    for (const Posting& p : postings) {
      const double tf = p.tf;
      const double norm =
          params_.k1 * (1.0 - params_.b + params_.b * fi.lengths[p.doc] / avg);
      acc[p.doc] += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
  }
  hits.reserve(acc.size());
  for (const auto& [doc, score] : acc) hits.push_back({doc, score});
  auto better = [this](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return tables_[a.doc].id < tables_[b.doc].id;
  };
  if (hits.size() > k) {
    std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), better);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), better);
  }
  return hits;
}

double TableIndex::Score(SearchField f, std::span<const std::string> query,
                         uint32_t doc) const {
  const FieldIndex& fi = field(f);
  const double avg = fi.avg_length > 0 ? fi.avg_length : 1.0;
  double score = 0.0;
  for (const auto& q : query) {
    auto postings = Lookup(fi.postings, q);
    auto it = std::lower_bound(
        postings.begin(), postings.end(), doc,
        [](const Posting& p, uint32_t d) { return p.doc < d; });
    if (it == postings.end() || it->doc != doc) continue;
    const double tf = it->tf;
    const double norm =
        params_.k1 * (1.0 - params_.b + params_.b * fi.lengths[doc] / avg);
    score += Idf(postings.size()) * tf * (params_.k1 + 1.0) / (tf + norm);
  }
  return score;
}

std::span<const Posting> TableIndex::EntityPostings(absl::string_view e) const {
  return Lookup(entities_.postings, e);
}

std::span<const Posting> TableIndex::LabelPostings(absl::string_view l) const {
  return Lookup(labels_.postings, l);
}

std::span<const Posting> TableIndex::CaptionPostings(absl::string_view t) const {
  return Lookup(captions_.postings, t);
}

size_t TableIndex::CountTablesWithEntity(absl::string_view entity) const {
  return EntityPostings(entity).size();
}

size_t TableIndex::CountTablesWithLabel(absl::string_view label) const {
  return LabelPostings(label).size();
}

size_t TableIndex::CountTablesWithAll(
    std::span<const std::string> entities) const {
  if (entities.empty()) return tables_.size();
  std::vector<std::span<const Posting>> lists;
  absl::flat_hash_set<absl::string_view> seen;
  for (const auto& e : entities) {
    if (!seen.insert(e).second) continue;
    auto postings = EntityPostings(e);
    if (postings.empty()) return 0;
    lists.push_back(postings);
  }
  std::sort(lists.begin(), lists.end(),
            [](auto a, auto b) { return a.size() < b.size(); });
  std::vector<uint32_t> current;
  for (const Posting& p : lists.front()) current.push_back(p.doc);
  for (size_t i = 1; i < lists.size() && !current.empty(); ++i) {
    std::vector<uint32_t> next;
    size_t a = 0, b = 0;
    const auto& other = lists[i];
    while (a < current.size() && b < other.size()) {
      if (current[a] < other[b].doc) {
        ++a;
      } else if (other[b].doc < current[a]) {
        ++b;
      } else {
        next.push_back(current[a]);
        ++a;
        ++b;
      }
    }
    current = std::move(next);
  }
  return current.size();
}

size_t TableIndex::CountTablesWithEntityAndLabel(absl::string_view entity,
                                                 absl::string_view label) const {
  return IntersectCount(EntityPostings(entity), LabelPostings(label));
}

size_t TableIndex::CountLabelPair(absl::string_view l1,
                                  absl::string_view l2) const {
  return IntersectCount(LabelPostings(l1), LabelPostings(l2));
}

size_t TableIndex::CountTablesWithEntityAndCaptionTerm(
    absl::string_view entity, absl::string_view term) const {
  return IntersectCount(EntityPostings(entity), CaptionPostings(term));
}

uint64_t TableIndex::HeadingTermFrequency(absl::string_view entity,
                                          absl::string_view term) const {
  auto it = heading_stats_.find(entity);
  if (it == heading_stats_.end()) return 0;
  auto t = it->second.tf.find(term);
  return t == it->second.tf.end() ? 0 : t->second;
}

uint64_t TableIndex::HeadingLength(absl::string_view entity) const {
  auto it = heading_stats_.find(entity);
  return it == heading_stats_.end() ? 0 : it->second.length;
}

double TableIndex::LabelBackground(absl::string_view term) const {
  if (label_term_total_ == 0) return 0.0;
  auto it = label_term_counts_.find(term);
  if (it == label_term_counts_.end()) return 0.0;
  return static_cast<double>(it->second) /
         static_cast<double>(label_term_total_);
}

double TableIndex::mean_heading_length() const {
  if (heading_stats_.empty()) return 0.0;
  // Sum in sorted key order so the mean does not depend on hash order.
  std::vector<std::pair<absl::string_view, uint64_t>> lengths;
  lengths.reserve(heading_stats_.size());
  for (const auto& [e, stats] : heading_stats_) lengths.emplace_back(e, stats.length);
  std::sort(lengths.begin(), lengths.end());
  uint64_t total = 0;
  for (const auto& [e, len] : lengths) total += len;
  return static_cast<double>(total) / static_cast<double>(lengths.size());
}

absl::Status TableIndex::Save(const std::filesystem::path& dir,
                              const IndexManifest& manifest) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  {
    std::ofstream out(dir / kTablesFile, std::ios::binary);
    if (!out) return absl::PermissionDeniedError("cannot write tables.bin");
    cereal::PortableBinaryOutputArchive ar(out);
    ar(std::string(kMagic), kFormatVersion, params_.k1, params_.b, tables_);
  }
  {
    std::ofstream out(dir / kHoldoutFile, std::ios::binary);
    if (!out) return absl::PermissionDeniedError("cannot write holdout.bin");
    cereal::PortableBinaryOutputArchive ar(out);
    ar(std::string(kMagic), kFormatVersion, holdout_);
  }
  nlohmann::json j = {
      {"format_version", manifest.format_version},
      {"corpus_sha256", manifest.corpus_sha256},
      {"kb_sha256", manifest.kb_sha256},
      {"exclusion_sha256", manifest.exclusion_sha256},
      {"bm25", {{"k1", params_.k1}, {"b", params_.b}}},
      {"n_tables", tables_.size()},
      {"n_holdout", holdout_.size()},
  };
  std::ofstream out(dir / kManifestFile);
  if (!out) return absl::PermissionDeniedError("cannot write manifest.json");
  out << j.dump(2) << "\n";
  return absl::OkStatus();
}

absl::StatusOr<IndexManifest> TableIndex::ReadManifest(
    const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestFile);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("no manifest in ", dir.string()));
  }
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::DataLossError("manifest.json is not valid JSON");
  }
  IndexManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    m.corpus_sha256 = j.at("corpus_sha256").get<std::string>();
    m.kb_sha256 = j.at("kb_sha256").get<std::string>();
    m.exclusion_sha256 = j.at("exclusion_sha256").get<std::string>();
    m.bm25.k1 = j.at("bm25").at("k1").get<double>();
    m.bm25.b = j.at("bm25").at("b").get<double>();
    m.n_tables = j.at("n_tables").get<uint64_t>();
    m.n_holdout = j.at("n_holdout").get<uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    return absl::DataLossError(absl::StrCat("bad manifest: ", e.what()));
  }
  return m;
}

absl::StatusOr<TableIndex> TableIndex::Load(const std::filesystem::path& dir) {
  auto manifest = ReadManifest(dir);
  if (!manifest.ok()) return manifest.status();
  if (manifest->format_version != static_cast<int>(kFormatVersion)) {
    return absl::FailedPreconditionError(
        absl::StrCat("unsupported index format version ",
                     manifest->format_version));
  }
  TableIndex index;
  try {
    std::string magic;
    uint32_t version = 0;
    {
      std::ifstream in(dir / kTablesFile, std::ios::binary);
      if (!in) return absl::NotFoundError("missing tables.bin");
      cereal::PortableBinaryInputArchive ar(in);
      ar(magic, version);
      if (magic != kMagic || version != kFormatVersion) {
        return absl::DataLossError("tables.bin has an unexpected header");
      }
      ar(index.params_.k1, index.params_.b, index.tables_);
    }
    {
      std::ifstream in(dir / kHoldoutFile, std::ios::binary);
      if (!in) return absl::NotFoundError("missing holdout.bin");
      cereal::PortableBinaryInputArchive ar(in);
      ar(magic, version);
      if (magic != kMagic || version != kFormatVersion) {
        return absl::DataLossError("holdout.bin has an unexpected header");
      }
      ar(index.holdout_);
    }
  } catch (const cereal::Exception& e) {
    return absl::DataLossError(absl::StrCat("corrupt index: ", e.what()));
  }
  if (index.tables_.size() != manifest->n_tables ||
      index.holdout_.size() != manifest->n_holdout) {
    return absl::DataLossError("index files disagree with manifest counts");
  }
  index.Finalize();
  return index;
}

}  // namespace tablepop
