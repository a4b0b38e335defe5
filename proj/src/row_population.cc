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

#include "tablepop/row_population.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "absl/container/flat_hash_map.h"
#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "tablepop/status_macros.h"
#include "tablepop/text.h"

namespace tablepop {
namespace {

constexpr double kSoftFloor = 1e-12;

using RelationKey = std::pair<absl::string_view, absl::string_view>;

// Multinomial over the relation pairs of the seed entities (with
// multiplicity across seeds).
struct SeedRelationModel {
  absl::flat_hash_map<RelationKey, uint64_t> counts;
  uint64_t total = 0;

  double Probability(const EntityRecord& candidate) const {
    if (total == 0) return 0.0;
    uint64_t mass = 0;
    for (const RelationPair& r : candidate.relations) {
      auto it = counts.find(RelationKey(r.first, r.second));
      if (it != counts.end()) mass += it->second;
    }
    return static_cast<double>(mass) / static_cast<double>(total);
  }
};

SeedRelationModel BuildRelationModel(
    std::span<const EntityRecord* const> seeds) {
  SeedRelationModel model;
  for (const EntityRecord* seed : seeds) {
    for (const RelationPair& r : seed->relations) {
      ++model.counts[RelationKey(r.first, r.second)];
    }
    model.total += seed->relations.size();
  }
  return model;
}

size_t SortedOverlap(std::span<const std::string> a,
                     std::span<const std::string> b) {
  size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    const int c = a[i].compare(b[j]);
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

absl::Status CheckLambda(double v, absl::string_view name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    return absl::OutOfRangeError(absl::StrCat(name, " must lie in [0, 1]"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<const EntityRecord*>> ResolveSeeds(
    const KbStore& kb, std::span<const std::string> seeds) {
  std::vector<const EntityRecord*> out;
  out.reserve(seeds.size());
  for (const auto& s : seeds) {
    const EntityRecord* rec = kb.Find(s);
    if (rec == nullptr) {
      return absl::NotFoundError(absl::StrCat("unknown entity '", s, "'"));
    }
    out.push_back(rec);
  }
  return out;
}

double PairwiseSimilarity(const EntityRecord& a, const EntityRecord& b,
                          KbSimilarity method, size_t total_entities) {
  if (method == KbSimilarity::kWlm) {
    return WlmSimilarity(a.outlinks, b.outlinks, total_entities);
  }
  return JaccardSimilarity(a.outlinks, b.outlinks);
}

double AveragePairwise(const EntityRecord& candidate,
                       std::span<const EntityRecord* const> seeds,
                       KbSimilarity method, size_t total_entities) {
  if (seeds.empty()) return 0.0;
  double sum = 0.0;
  for (const EntityRecord* s : seeds) {
    sum += PairwiseSimilarity(candidate, *s, method, total_entities);
  }
  return sum / static_cast<double>(seeds.size());
}

// Seed labels reduced to what the label model consumes.
struct PreparedLabel {
  std::string normalized;
  std::vector<std::string> terms;
};

std::vector<PreparedLabel> PrepareLabels(std::span<const std::string> labels) {
  std::vector<PreparedLabel> out;
  for (const auto& raw : labels) {
    std::string n = NormalizeLabel(raw);
    if (n.empty()) continue;
    std::vector<std::string> terms = Tokenize(n);
    out.push_back({std::move(n), std::move(terms)});
  }
  return out;
}

double LabelLikelihoodImpl(const TableIndex& index,
                           std::span<const PreparedLabel> labels,
                           absl::string_view entity, double lambda, double mu) {
  if (labels.empty()) return 1.0;
  const double length = static_cast<double>(index.HeadingLength(entity));
  const size_t tables_with_e = index.CountTablesWithEntity(entity);
  const double n = static_cast<double>(labels.size());
  double sum = 0.0;
  for (const PreparedLabel& l : labels) {
    double lm = 1.0;
    for (const auto& t : l.terms) {
      lm *= DirichletSmoothed(
          static_cast<double>(index.HeadingTermFrequency(entity, t)), length,
          mu, index.LabelBackground(t));
    }
    double em = 0.0;
    if (tables_with_e > 0) {
      em = static_cast<double>(
               index.CountTablesWithEntityAndLabel(entity, l.normalized)) /
           static_cast<double>(tables_with_e);
    }
    sum += lambda * lm + (1.0 - lambda) / n * em;
  }
  return sum;
}

double CaptionLikelihoodImpl(const KbStore& kb, const TableIndex& index,
                             std::span<const std::string> terms,
                             absl::string_view entity, double lambda,
                             double mu) {
  if (terms.empty()) return 1.0;
  const EntityRecord* rec = kb.Find(entity);
  absl::flat_hash_map<absl::string_view, uint64_t> tf;
  double length = 0.0;
  if (rec != nullptr && rec->has_abstract) {
    for (const auto& t : rec->abstract_terms) ++tf[t];
    length = static_cast<double>(rec->abstract_terms.size());
  }
  const size_t tables_with_e = index.CountTablesWithEntity(entity);
  double product = 1.0;
  for (const auto& t : terms) {
    auto it = tf.find(t);
    const double term_tf = it == tf.end() ? 0.0 : static_cast<double>(it->second);
    const double p_kb =
        DirichletSmoothed(term_tf, length, mu, kb.AbstractBackground(t));
    double p_tc = 0.0;
    if (tables_with_e > 0) {
      p_tc = static_cast<double>(
                 index.CountTablesWithEntityAndCaptionTerm(entity, t)) /
             static_cast<double>(tables_with_e);
    }
    product *= lambda * p_kb + (1.0 - lambda) * p_tc;
  }
  return product;
}

double TableCooccurrenceImpl(const TableIndex& index, absl::string_view entity,
                             std::span<const std::string> seeds,
                             size_t seed_tables) {
  if (seed_tables == 0) return 0.0;
  std::vector<std::string> with_e(seeds.begin(), seeds.end());
  with_e.emplace_back(entity);
  return static_cast<double>(index.CountTablesWithAll(with_e)) /
         static_cast<double>(seed_tables);
}

void AddTopByOverlap(const KbStore& kb, std::span<const std::string> seeds,
                     EntityProperty property, size_t k, uint8_t flag,
                     const std::function<bool(uint32_t)>& admissible,
                     absl::flat_hash_map<std::string, uint8_t>* out) {
  absl::flat_hash_set<absl::string_view> seed_values;
  for (const auto& s : seeds) {
    const EntityRecord* rec = kb.Find(s);
    if (rec == nullptr) continue;
    const auto& values = property == EntityProperty::kCategories
                             ? rec->categories
                             : rec->types;
    for (const auto& v : values) seed_values.insert(v);
  }
  absl::flat_hash_map<uint32_t, size_t> overlap;
  for (absl::string_view v : seed_values) {
    for (uint32_t e : kb.EntitiesWithProperty(property, v)) ++overlap[e];
  }
  std::vector<std::pair<uint32_t, size_t>> ranked;
  for (const auto& [e, score] : overlap) {
    if (admissible(e)) ranked.emplace_back(e, score);
  }
  auto better = [&kb](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return kb.record(a.first).id < kb.record(b.first).id;
  };
  const size_t n = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + n, ranked.end(), better);
  for (size_t i = 0; i < n; ++i) (*out)[kb.record(ranked[i].first).id] |= flag;
}

}  // namespace

absl::Status RowCandidateConfig::Validate() const {
  if (!categories && !types && !caption && !entities) {
    return absl::OutOfRangeError("at least one candidate method is required");
  }
  if ((categories && k_categories == 0) || (types && k_types == 0) ||
      (caption && k_caption == 0) || (entities && k_entities == 0)) {
    return absl::OutOfRangeError("candidate k must be at least 1");
  }
  return absl::OkStatus();
}

absl::Status RowRankingConfig::Validate() const {
  TP_RETURN_IF_ERROR(CheckLambda(lambda_e, "lambda_e"));
  TP_RETURN_IF_ERROR(CheckLambda(lambda_l, "lambda_l"));
  TP_RETURN_IF_ERROR(CheckLambda(lambda_c, "lambda_c"));
  if (mu_labels && !(*mu_labels > 0.0)) {
    return absl::OutOfRangeError("mu_labels must be positive");
  }
  if (mu_captions && !(*mu_captions > 0.0)) {
    return absl::OutOfRangeError("mu_captions must be positive");
  }
  return absl::OkStatus();
}

double JaccardSimilarity(std::span<const std::string> a,
                         std::span<const std::string> b) {
  const size_t overlap = SortedOverlap(a, b);
  const size_t uni = a.size() + b.size() - overlap;
  if (uni == 0) return 0.0;
  return static_cast<double>(overlap) / static_cast<double>(uni);
}

double WlmSimilarity(std::span<const std::string> a,
                     std::span<const std::string> b, size_t total_entities) {
  const size_t overlap = SortedOverlap(a, b);
  if (overlap == 0) return 0.0;
  const double larger = static_cast<double>(std::max(a.size(), b.size()));
  const double smaller = static_cast<double>(std::min(a.size(), b.size()));
  const double distance = std::log(larger) - std::log(static_cast<double>(overlap));
  if (distance <= 0.0) return 1.0;
  const double range = std::log(static_cast<double>(total_entities)) - std::log(smaller);
  if (range <= 0.0) return 0.0;
  return std::clamp(1.0 - distance / range, 0.0, 1.0);
}

absl::StatusOr<KbSimilarity> ParseKbSimilarity(absl::string_view name) {
  if (name == "relations") return KbSimilarity::kRelations;
  if (name == "wlm") return KbSimilarity::kWlm;
  if (name == "jaccard") return KbSimilarity::kJaccard;
  return absl::OutOfRangeError(
      absl::StrCat("unknown KB similarity '", name, "'"));
}

absl::string_view KbSimilarityName(KbSimilarity s) {
  switch (s) {
    case KbSimilarity::kRelations:
      return "relations";
    case KbSimilarity::kWlm:
      return "wlm";
    case KbSimilarity::kJaccard:
      return "jaccard";
  }
  return "jaccard";
}

std::vector<RowCandidate> RowPopulator::SelectCandidates(
    const SeedTable& seed, const RowCandidateConfig& cfg) const {
  absl::flat_hash_set<absl::string_view> seeds(seed.entities.begin(),
                                              seed.entities.end());
  auto admissible_record = [&](const EntityRecord& rec) {
    if (seeds.contains(rec.id)) return false;
    return rec.has_abstract || cfg.include_entities_without_abstract;
  };
  auto admissible = [&](uint32_t e) { return admissible_record(kb_.record(e)); };

  absl::flat_hash_map<std::string, uint8_t> found;
  if (cfg.categories) {
    AddTopByOverlap(kb_, seed.entities, EntityProperty::kCategories,
                    cfg.k_categories, kRowFromCategories, admissible, &found);
  }
  if (cfg.types) {
    AddTopByOverlap(kb_, seed.entities, EntityProperty::kTypes, cfg.k_types,
                    kRowFromTypes, admissible, &found);
  }
  auto add_from_tables = [&](const std::vector<SearchHit>& hits, uint8_t flag) {
    for (const SearchHit& hit : hits) {
      for (const auto& e : index_.table(hit.doc).entities) {
        const EntityRecord* rec = kb_.Find(e);
        if (rec != nullptr && admissible_record(*rec)) found[e] |= flag;
      }
    }
  };
  if (cfg.caption) {
    const std::vector<std::string> query = Tokenize(seed.caption);
    add_from_tables(index_.Search(SearchField::kCaption, query, cfg.k_caption),
                    kRowFromCaption);
  }
  if (cfg.entities) {
    add_from_tables(
        index_.Search(SearchField::kEntities, seed.entities, cfg.k_entities),
        kRowFromEntities);
  }

  std::vector<RowCandidate> out;
  out.reserve(found.size());
  for (auto& [entity, flags] : found) out.push_back({entity, flags});
  std::sort(out.begin(), out.end(),
            [](const RowCandidate& a, const RowCandidate& b) {
              return a.entity < b.entity;
            });
  return out;
}

absl::StatusOr<double> RowPopulator::KbRelationSimilarity(
    absl::string_view entity, std::span<const std::string> seeds) const {
  const EntityRecord* rec = kb_.Find(entity);
  if (rec == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown entity '", entity, "'"));
  }
  TP_ASSIGN_OR_RETURN(auto seed_records, ResolveSeeds(kb_, seeds));
  return BuildRelationModel(seed_records).Probability(*rec);
}

absl::StatusOr<double> RowPopulator::LinkSimilarity(absl::string_view a,
                                                    absl::string_view b,
                                                    KbSimilarity method) const {
  const EntityRecord* ra = kb_.Find(a);
  const EntityRecord* rb = kb_.Find(b);
  if (ra == nullptr || rb == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("unknown entity '", ra == nullptr ? a : b, "'"));
  }
  if (method == KbSimilarity::kRelations) {
    return absl::InvalidArgumentError(
        "relations is a set-level model, not a pairwise measure");
  }
  return PairwiseSimilarity(*ra, *rb, method, kb_.total_entities());
}

absl::StatusOr<double> RowPopulator::AveragePairwiseSimilarity(
    absl::string_view entity, std::span<const std::string> seeds,
    KbSimilarity method) const {
  if (method == KbSimilarity::kRelations) {
    return absl::InvalidArgumentError(
        "relations is a set-level model, not a pairwise measure");
  }
  const EntityRecord* rec = kb_.Find(entity);
  if (rec == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown entity '", entity, "'"));
  }
  TP_ASSIGN_OR_RETURN(auto seed_records, ResolveSeeds(kb_, seeds));
  return AveragePairwise(*rec, seed_records, method, kb_.total_entities());
}

absl::StatusOr<double> RowPopulator::KbEntitySimilarity(
    absl::string_view entity, std::span<const std::string> seeds,
    KbSimilarity method) const {
  if (method == KbSimilarity::kRelations) {
    return KbRelationSimilarity(entity, seeds);
  }
  return AveragePairwiseSimilarity(entity, seeds, method);
}

double RowPopulator::TableCooccurrence(
    absl::string_view entity, std::span<const std::string> seeds) const {
  return TableCooccurrenceImpl(index_, entity, seeds,
                               index_.CountTablesWithAll(seeds));
}

absl::StatusOr<double> RowPopulator::EntitySimilarity(
    absl::string_view entity, std::span<const std::string> seeds,
    const RowRankingConfig& cfg) const {
  TP_ASSIGN_OR_RETURN(double kb,
                      KbEntitySimilarity(entity, seeds, cfg.kb_similarity));
  const double tc = TableCooccurrence(entity, seeds);
  return cfg.lambda_e * kb + (1.0 - cfg.lambda_e) * tc;
}

double RowPopulator::LabelMu(const RowRankingConfig& cfg) const {
  if (cfg.mu_labels) return *cfg.mu_labels;
  const double mean = index_.mean_heading_length();
  return mean > 0.0 ? mean : 1.0;
}

double RowPopulator::CaptionMu(const RowRankingConfig& cfg) const {
  if (cfg.mu_captions) return *cfg.mu_captions;
  const double mean = kb_.mean_abstract_length();
  return mean > 0.0 ? mean : 1.0;
}

double RowPopulator::LabelLikelihood(std::span<const std::string> labels,
                                     absl::string_view entity,
                                     const RowRankingConfig& cfg) const {
  const std::vector<PreparedLabel> prepared = PrepareLabels(labels);
  return LabelLikelihoodImpl(index_, prepared, entity, cfg.lambda_l,
                             LabelMu(cfg));
}

double RowPopulator::CaptionLikelihood(absl::string_view caption,
                                       absl::string_view entity,
                                       const RowRankingConfig& cfg) const {
  const std::vector<std::string> terms = Tokenize(caption);
  return CaptionLikelihoodImpl(kb_, index_, terms, entity, cfg.lambda_c,
                               CaptionMu(cfg));
}

absl::StatusOr<RankedSuggestions> RowPopulator::Rank(
    const SeedTable& seed, const RowCandidateConfig& cand_cfg,
    const RowRankingConfig& rank_cfg) const {
  TP_RETURN_IF_ERROR(cand_cfg.Validate());
  TP_RETURN_IF_ERROR(rank_cfg.Validate());
  TP_RETURN_IF_ERROR(ValidateSeedTable(seed));
  TP_RETURN_IF_ERROR(ResolveSeeds(kb_, seed.entities).status());
  std::vector<std::string> ids;
  for (auto& c : SelectCandidates(seed, cand_cfg)) ids.push_back(std::move(c.entity));
  return RankCandidates(seed, ids, rank_cfg);
}

absl::StatusOr<RankedSuggestions> RowPopulator::RankCandidates(
    const SeedTable& seed, std::span<const std::string> candidates,
    const RowRankingConfig& cfg) const {
  TP_RETURN_IF_ERROR(cfg.Validate());
  TP_RETURN_IF_ERROR(ValidateSeedTable(seed));
  TP_ASSIGN_OR_RETURN(auto seed_records, ResolveSeeds(kb_, seed.entities));
  TP_ASSIGN_OR_RETURN(auto candidate_records, ResolveSeeds(kb_, candidates));

  RankedSuggestions out;
  const std::vector<PreparedLabel> labels = PrepareLabels(seed.labels);
  const std::vector<std::string> caption_terms = Tokenize(seed.caption);
  const double label_mu = LabelMu(cfg);
  const double caption_mu = CaptionMu(cfg);
  const size_t seed_tables = index_.CountTablesWithAll(seed.entities);

  const bool relations = cfg.kb_similarity == KbSimilarity::kRelations;
  SeedRelationModel relation_model;
  if (cfg.use_entity_similarity) {
    if (relations) {
      relation_model = BuildRelationModel(seed_records);
      if (relation_model.total == 0) {
        out.diagnostics.push_back(
            "seed entities have no relations; relation similarity is 0");
      }
    } else if (seed_records.empty()) {
      out.diagnostics.push_back("no seed entities; KB similarity is 0");
    }
  }
  ComponentState label_state = ComponentState::kActive;
  if (!cfg.use_label_likelihood) {
    label_state = ComponentState::kDisabled;
  } else if (labels.empty()) {
    label_state = ComponentState::kNeutral;
    out.diagnostics.push_back("no seed labels; label likelihood is neutral");
  }
  ComponentState caption_state = ComponentState::kActive;
  if (!cfg.use_caption_likelihood) {
    caption_state = ComponentState::kDisabled;
  } else if (caption_terms.empty()) {
    caption_state = ComponentState::kNeutral;
    out.diagnostics.push_back("caption has no terms; caption likelihood is neutral");
  }

  std::vector<double> kb_scores(candidates.size(), 0.0);
  if (cfg.use_entity_similarity) {
    for (size_t i = 0; i < candidates.size(); ++i) {
      kb_scores[i] = relations ? relation_model.Probability(*candidate_records[i])
                               : AveragePairwise(*candidate_records[i],
                                                 seed_records, cfg.kb_similarity,
                                                 kb_.total_entities());
    }
    if (cfg.renormalize_kb) {
      double total = 0.0;
      for (double s : kb_scores) total += s;
      if (total > 0.0) {
        for (double& s : kb_scores) s /= total;
      }
    }
  }

  auto factor = [&cfg](double v) {
    return cfg.soft_zeros ? std::max(v, kSoftFloor) : v;
  };
  out.items.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    const std::string& e = candidates[i];
    Suggestion s;
    s.item = e;
    s.score = 1.0;
    ComponentScore esim{"entity_similarity", 1.0, ComponentState::kDisabled};
    if (cfg.use_entity_similarity) {
      const double tc = TableCooccurrenceImpl(index_, e, seed.entities, seed_tables);
      esim.value = cfg.lambda_e * kb_scores[i] + (1.0 - cfg.lambda_e) * tc;
      esim.state = ComponentState::kActive;
      s.score *= factor(esim.value);
    }
    ComponentScore label{"label_likelihood", 1.0, label_state};
    if (label_state == ComponentState::kActive) {
      label.value = LabelLikelihoodImpl(index_, labels, e, cfg.lambda_l, label_mu);
      s.score *= factor(label.value);
    }
    ComponentScore caption{"caption_likelihood", 1.0, caption_state};
    if (caption_state == ComponentState::kActive) {
      caption.value = CaptionLikelihoodImpl(kb_, index_, caption_terms, e,
                                            cfg.lambda_c, caption_mu);
      s.score *= factor(caption.value);
    }
    s.components = {std::move(esim), std::move(label), std::move(caption)};
    out.items.push_back(std::move(s));
  }
  SortSuggestions(&out.items);
  return out;
}

}  // namespace tablepop
