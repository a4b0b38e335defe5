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

#include "tablepop/column_population.h"

#include <algorithm>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "tablepop/status_macros.h"
#include "tablepop/text.h"

namespace tablepop {
namespace {

std::vector<std::string> DistinctLabels(const std::vector<std::string>& labels) {
  std::vector<std::string> out(labels);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

size_t CountMembers(const std::vector<std::string>& items,
                    const absl::flat_hash_set<absl::string_view>& set) {
  absl::flat_hash_set<absl::string_view> distinct(items.begin(), items.end());
  size_t n = 0;
  for (absl::string_view v : distinct) n += set.contains(v);
  return n;
}

double Relevance(const CandidateTable& t, const ColumnRankingConfig& cfg) {
  double r = 1.0;
  if (cfg.use_entities) r *= t.entity_coverage;
  if (cfg.use_caption) r *= t.caption_similarity;
  if (cfg.use_labels) r *= t.label_overlap;
  return r;
}

}  // namespace

absl::Status ColumnCandidateConfig::Validate() const {
  if (!caption && !labels && !entities) {
    return absl::OutOfRangeError("at least one candidate method is required");
  }
  if ((caption && k_caption == 0) || (labels && k_labels == 0) ||
      (entities && k_entities == 0)) {
    return absl::OutOfRangeError("candidate k must be at least 1");
  }
  return absl::OkStatus();
}

ColumnQuery ColumnQuery::FromSeed(const SeedTable& seed) {
  ColumnQuery q;
  absl::flat_hash_set<absl::string_view> seen;
  for (const auto& e : seed.entities) {
    if (seen.insert(e).second) q.entities.push_back(e);
  }
  absl::flat_hash_set<std::string> labels;
  for (const auto& raw : seed.labels) {
    std::string n = NormalizeLabel(raw);
    if (!n.empty() && labels.insert(n).second) q.labels.push_back(std::move(n));
  }
  q.caption_terms = Tokenize(seed.caption);
  return q;
}

ColumnCandidates ColumnPopulator::SelectCandidates(
    const SeedTable& seed, const ColumnCandidateConfig& cfg) const {
  const ColumnQuery query = ColumnQuery::FromSeed(seed);
  absl::flat_hash_map<uint32_t, uint8_t> found;
  auto add = [&found](const std::vector<SearchHit>& hits, uint8_t flag) {
    for (const SearchHit& h : hits) found[h.doc] |= flag;
  };
  if (cfg.caption) {
    add(index_.Search(SearchField::kCaption, query.caption_terms, cfg.k_caption),
        kColumnFromCaption);
  }
  if (cfg.labels) {
    add(index_.Search(SearchField::kLabels, query.labels, cfg.k_labels),
        kColumnFromLabels);
  }
  if (cfg.entities) {
    add(index_.Search(SearchField::kEntities, query.entities, cfg.k_entities),
        kColumnFromEntities);
  }

  ColumnCandidates out;
  for (const auto& [doc, flags] : found) {
    CandidateTable t;
    t.doc = doc;
    t.provenance = flags;
    out.tables.push_back(t);
  }
  std::sort(out.tables.begin(), out.tables.end(),
            [](const CandidateTable& a, const CandidateTable& b) {
              return a.doc < b.doc;
            });
  absl::flat_hash_set<absl::string_view> seed_labels(query.labels.begin(),
                                                    query.labels.end());
  for (const CandidateTable& t : out.tables) {
    for (const auto& l : index_.table(t.doc).labels) {
      if (!seed_labels.contains(l)) out.labels.push_back(l);
    }
  }
  out.labels = DistinctLabels(out.labels);
  return out;
}

void ColumnPopulator::ScoreTables(const ColumnQuery& query,
                                  const ColumnRankingConfig& cfg,
                                  std::span<CandidateTable> tables) const {
  const absl::flat_hash_set<absl::string_view> entities(query.entities.begin(),
                                                       query.entities.end());
  const absl::flat_hash_set<absl::string_view> labels(query.labels.begin(),
                                                     query.labels.end());
  double best_caption = 0.0;
  for (CandidateTable& t : tables) {
    const IndexedTable& doc = index_.table(t.doc);
    t.entity_coverage =
        entities.empty() ? 1.0
                         : static_cast<double>(CountMembers(doc.entities, entities)) /
                               static_cast<double>(entities.size());
    t.label_overlap =
        labels.empty() ? 1.0
                       : static_cast<double>(CountMembers(doc.labels, labels)) /
                             static_cast<double>(labels.size());
    if (query.caption_terms.empty()) {
      t.caption_similarity = 1.0;
    } else {
      t.caption_similarity =
          index_.Score(SearchField::kCaption, query.caption_terms, t.doc);
      best_caption = std::max(best_caption, t.caption_similarity);
    }
  }
  if (query.caption_terms.empty() || cfg.raw_caption_scores) return;
  for (CandidateTable& t : tables) {
    t.caption_similarity =
        best_caption > 0.0 ? t.caption_similarity / best_caption : 0.0;
  }
}

absl::StatusOr<RankedSuggestions> ColumnPopulator::Rank(
    const SeedTable& seed, const ColumnCandidateConfig& cand_cfg,
    const ColumnRankingConfig& rank_cfg) const {
  TP_RETURN_IF_ERROR(cand_cfg.Validate());
  TP_RETURN_IF_ERROR(ValidateSeedTable(seed));
  return RankCandidates(seed, SelectCandidates(seed, cand_cfg), rank_cfg);
}

RankedSuggestions ColumnPopulator::RankCandidates(
    const SeedTable& seed, const ColumnCandidates& candidates,
    const ColumnRankingConfig& cfg) const {
  RankedSuggestions out;
  const ColumnQuery query = ColumnQuery::FromSeed(seed);
  auto state = [](bool enabled, bool has_evidence) {
    if (!enabled) return ComponentState::kDisabled;
    return has_evidence ? ComponentState::kActive : ComponentState::kNeutral;
  };
  const ComponentState entity_state = state(cfg.use_entities, !query.entities.empty());
  const ComponentState caption_state =
      state(cfg.use_caption, !query.caption_terms.empty());
  const ComponentState label_state = state(cfg.use_labels, !query.labels.empty());
  if (entity_state == ComponentState::kNeutral) {
    out.diagnostics.push_back("no seed entities; entity coverage is neutral");
  }
  if (caption_state == ComponentState::kNeutral) {
    out.diagnostics.push_back("caption has no terms; caption similarity is neutral");
  }
  if (label_state == ComponentState::kNeutral) {
    out.diagnostics.push_back("no seed labels; label overlap is neutral");
  }

  std::vector<CandidateTable> tables = candidates.tables;
  ScoreTables(query, cfg, tables);

  struct Accumulator {
    double score = 0.0;
    const CandidateTable* best = nullptr;
    double best_relevance = -1.0;
  };
  absl::flat_hash_map<absl::string_view, Accumulator> acc;
  for (const auto& l : candidates.labels) acc[l];
  for (const CandidateTable& t : tables) {
    const IndexedTable& doc = index_.table(t.doc);
    const std::vector<std::string> labels = DistinctLabels(doc.labels);
    const double relevance = Relevance(t, cfg);
    const double likelihood =
        cfg.normalized_label_likelihood ? 1.0 / static_cast<double>(labels.size())
                                        : 1.0;
    for (const auto& l : labels) {
      auto it = acc.find(l);
      if (it == acc.end()) continue;
      it->second.score += likelihood * relevance;
      if (relevance > it->second.best_relevance) {
        it->second.best_relevance = relevance;
        it->second.best = &t;
      }
    }
  }

  for (const auto& l : candidates.labels) {
    const Accumulator& a = acc[l];
    if (a.best == nullptr) continue;  // label of no candidate table
    Suggestion s;
    s.item = l;
    s.score = a.score;
    s.components = {
        {"entity_coverage", a.best->entity_coverage, entity_state},
        {"caption_similarity", a.best->caption_similarity, caption_state},
        {"label_overlap", a.best->label_overlap, label_state},
    };
    for (ComponentScore& c : s.components) {
      if (c.state != ComponentState::kActive) c.value = 1.0;
    }
    out.items.push_back(std::move(s));
  }
  SortSuggestions(&out.items);
  return out;
}

double ColumnPopulator::AcsConsistency(absl::string_view l1,
                                       absl::string_view l2) const {
  const size_t base = index_.CountTablesWithLabel(l1);
  if (base == 0) return 0.0;
  return static_cast<double>(index_.CountLabelPair(l1, l2)) /
         static_cast<double>(base);
}

double ColumnPopulator::LabelBenefit(std::span<const std::string> seed_labels,
                                     absl::string_view label) const {
  if (seed_labels.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& l1 : seed_labels) sum += AcsConsistency(l1, label);
  return sum / static_cast<double>(seed_labels.size());
}

absl::StatusOr<RankedSuggestions> ColumnPopulator::RankBaseline(
    const SeedTable& seed, const ColumnCandidateConfig& cand_cfg) const {
  TP_RETURN_IF_ERROR(cand_cfg.Validate());
  TP_RETURN_IF_ERROR(ValidateSeedTable(seed));
  return RankBaselineCandidates(seed, SelectCandidates(seed, cand_cfg));
}

RankedSuggestions ColumnPopulator::RankBaselineCandidates(
    const SeedTable& seed, const ColumnCandidates& candidates) const {
  RankedSuggestions out;
  const ColumnQuery query = ColumnQuery::FromSeed(seed);
  if (query.labels.empty()) {
    out.diagnostics.push_back("no seed labels; label benefit is 0");
  }
  for (const auto& l : candidates.labels) {
    Suggestion s;
    s.item = l;
    s.score = LabelBenefit(query.labels, l);
    s.components = {{"label_benefit", s.score, ComponentState::kActive}};
    out.items.push_back(std::move(s));
  }
  SortSuggestions(&out.items);
  return out;
}

}  // namespace tablepop
