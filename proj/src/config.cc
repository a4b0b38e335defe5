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

#include "tablepop/config.h"

#include <initializer_list>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "tablepop/status_macros.h"

namespace tablepop {
namespace {

using nlohmann::json;

absl::Status CheckKeys(const json& j, absl::string_view where,
                       std::initializer_list<absl::string_view> allowed) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError(absl::StrCat(where, " must be an object"));
  }
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (absl::string_view a : allowed) ok = ok || key == a;
    if (!ok) {
      return absl::OutOfRangeError(
          absl::StrCat("unknown key '", key, "' in ", where));
    }
  }
  return absl::OkStatus();
}

absl::Status ReadBool(const json& j, const char* key, bool* out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  if (!it->is_boolean()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a boolean"));
  }
  *out = it->get<bool>();
  return absl::OkStatus();
}

absl::Status ReadDouble(const json& j, const char* key, double* out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  if (!it->is_number()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a number"));
  }
  *out = it->get<double>();
  return absl::OkStatus();
}

absl::Status ReadOptionalDouble(const json& j, const char* key,
                                std::optional<double>* out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  if (it->is_null()) {
    out->reset();
    return absl::OkStatus();
  }
  if (!it->is_number()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a number"));
  }
  *out = it->get<double>();
  return absl::OkStatus();
}

absl::Status ReadCount(const json& j, const char* key, size_t* out) {
  auto it = j.find(key);
  if (it == j.end()) return absl::OkStatus();
  if (!it->is_number_integer()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be an integer"));
  }
  if (it->get<int64_t>() < 1) {
    return absl::OutOfRangeError(absl::StrCat("'", key, "' must be at least 1"));
  }
  *out = it->get<size_t>();
  return absl::OkStatus();
}

// Accepts ["a", "b"] or "a,b".
absl::StatusOr<std::string> NameList(const json& j, const char* key) {
  if (j.is_string()) return j.get<std::string>();
  if (!j.is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", key, "' must be a list of names"));
  }
  std::vector<std::string> names;
  for (const json& v : j) {
    if (!v.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("'", key, "' must be a list of names"));
    }
    names.push_back(v.get<std::string>());
  }
  return absl::StrJoin(names, ",");
}

std::vector<absl::string_view> SplitNames(absl::string_view list) {
  std::vector<absl::string_view> out;
  for (absl::string_view name : absl::StrSplit(list, ',', absl::SkipWhitespace())) {
    while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
    while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
    out.push_back(name);
  }
  return out;
}

std::vector<std::string> RowComponentNames(const RowRankingConfig& c) {
  std::vector<std::string> out;
  if (c.use_entity_similarity) out.push_back("entity_similarity");
  if (c.use_label_likelihood) out.push_back("label_likelihood");
  if (c.use_caption_likelihood) out.push_back("caption_likelihood");
  return out;
}

std::vector<std::string> ColumnComponentNames(const ColumnRankingConfig& c) {
  std::vector<std::string> out;
  if (c.use_caption) out.push_back("caption");
  if (c.use_labels) out.push_back("labels");
  if (c.use_entities) out.push_back("entities");
  return out;
}

}  // namespace

absl::Status SetRowComponents(absl::string_view list, RowRankingConfig* cfg) {
  cfg->use_entity_similarity = false;
  cfg->use_label_likelihood = false;
  cfg->use_caption_likelihood = false;
  for (absl::string_view name : SplitNames(list)) {
    if (name == "esim" || name == "entity_similarity") {
      cfg->use_entity_similarity = true;
    } else if (name == "label" || name == "labels" || name == "label_likelihood") {
      cfg->use_label_likelihood = true;
    } else if (name == "caption" || name == "caption_likelihood") {
      cfg->use_caption_likelihood = true;
    } else {
      return absl::OutOfRangeError(absl::StrCat("unknown row component '", name, "'"));
    }
  }
  return absl::OkStatus();
}

absl::Status SetColumnComponents(absl::string_view list, ColumnRankingConfig* cfg) {
  cfg->use_caption = false;
  cfg->use_labels = false;
  cfg->use_entities = false;
  for (absl::string_view name : SplitNames(list)) {
    if (name == "caption") {
      cfg->use_caption = true;
    } else if (name == "labels") {
      cfg->use_labels = true;
    } else if (name == "entities") {
      cfg->use_entities = true;
    } else {
      return absl::OutOfRangeError(
          absl::StrCat("unknown column component '", name, "'"));
    }
  }
  return absl::OkStatus();
}

absl::Status SetRowMethods(absl::string_view list, RowCandidateConfig* cfg) {
  cfg->categories = cfg->types = cfg->caption = cfg->entities = false;
  for (absl::string_view name : SplitNames(list)) {
    if (name == "categories") {
      cfg->categories = true;
    } else if (name == "types") {
      cfg->types = true;
    } else if (name == "caption") {
      cfg->caption = true;
    } else if (name == "entities") {
      cfg->entities = true;
    } else {
      return absl::OutOfRangeError(
          absl::StrCat("unknown row candidate method '", name, "'"));
    }
  }
  return cfg->Validate();
}

absl::Status SetColumnMethods(absl::string_view list, ColumnCandidateConfig* cfg) {
  cfg->caption = cfg->labels = cfg->entities = false;
  for (absl::string_view name : SplitNames(list)) {
    if (name == "caption") {
      cfg->caption = true;
    } else if (name == "labels") {
      cfg->labels = true;
    } else if (name == "entities") {
      cfg->entities = true;
    } else {
      return absl::OutOfRangeError(
          absl::StrCat("unknown column candidate method '", name, "'"));
    }
  }
  return cfg->Validate();
}

absl::Status ParseRowCandidateJson(const json& j, RowCandidateConfig* cfg) {
  TP_RETURN_IF_ERROR(CheckKeys(j, "rows.candidates",
                               {"methods", "k", "include_without_abstract"}));
  if (auto m = j.find("methods"); m != j.end()) {
    TP_ASSIGN_OR_RETURN(std::string list, NameList(*m, "methods"));
    TP_RETURN_IF_ERROR(SetRowMethods(list, cfg));
  }
  if (auto k = j.find("k"); k != j.end()) {
    TP_RETURN_IF_ERROR(CheckKeys(*k, "rows.candidates.k",
                                 {"categories", "types", "caption", "entities"}));
    TP_RETURN_IF_ERROR(ReadCount(*k, "categories", &cfg->k_categories));
    TP_RETURN_IF_ERROR(ReadCount(*k, "types", &cfg->k_types));
    TP_RETURN_IF_ERROR(ReadCount(*k, "caption", &cfg->k_caption));
    TP_RETURN_IF_ERROR(ReadCount(*k, "entities", &cfg->k_entities));
  }
  TP_RETURN_IF_ERROR(ReadBool(j, "include_without_abstract",
                              &cfg->include_entities_without_abstract));
  return cfg->Validate();
}

absl::Status ParseRowRankingJson(const json& j, RowRankingConfig* cfg) {
  TP_RETURN_IF_ERROR(CheckKeys(
      j, "rows.ranking",
      {"components", "kb_similarity", "lambda_e", "lambda_l", "lambda_c",
       "mu_labels", "mu_captions", "soft_zeros", "renormalize_kb"}));
  if (auto c = j.find("components"); c != j.end()) {
    TP_ASSIGN_OR_RETURN(std::string list, NameList(*c, "components"));
    TP_RETURN_IF_ERROR(SetRowComponents(list, cfg));
  }
  if (auto s = j.find("kb_similarity"); s != j.end()) {
    if (!s->is_string()) {
      return absl::InvalidArgumentError("'kb_similarity' must be a string");
    }
    TP_ASSIGN_OR_RETURN(cfg->kb_similarity, ParseKbSimilarity(s->get<std::string>()));
  }
  TP_RETURN_IF_ERROR(ReadDouble(j, "lambda_e", &cfg->lambda_e));
  TP_RETURN_IF_ERROR(ReadDouble(j, "lambda_l", &cfg->lambda_l));
  TP_RETURN_IF_ERROR(ReadDouble(j, "lambda_c", &cfg->lambda_c));
  TP_RETURN_IF_ERROR(ReadOptionalDouble(j, "mu_labels", &cfg->mu_labels));
  TP_RETURN_IF_ERROR(ReadOptionalDouble(j, "mu_captions", &cfg->mu_captions));
  TP_RETURN_IF_ERROR(ReadBool(j, "soft_zeros", &cfg->soft_zeros));
  TP_RETURN_IF_ERROR(ReadBool(j, "renormalize_kb", &cfg->renormalize_kb));
  return cfg->Validate();
}

absl::Status ParseColumnCandidateJson(const json& j, ColumnCandidateConfig* cfg) {
  TP_RETURN_IF_ERROR(CheckKeys(j, "columns.candidates", {"methods", "k"}));
  if (auto m = j.find("methods"); m != j.end()) {
    TP_ASSIGN_OR_RETURN(std::string list, NameList(*m, "methods"));
    TP_RETURN_IF_ERROR(SetColumnMethods(list, cfg));
  }
  if (auto k = j.find("k"); k != j.end()) {
    TP_RETURN_IF_ERROR(
        CheckKeys(*k, "columns.candidates.k", {"caption", "labels", "entities"}));
    TP_RETURN_IF_ERROR(ReadCount(*k, "caption", &cfg->k_caption));
    TP_RETURN_IF_ERROR(ReadCount(*k, "labels", &cfg->k_labels));
    TP_RETURN_IF_ERROR(ReadCount(*k, "entities", &cfg->k_entities));
  }
  return cfg->Validate();
}

absl::Status ParseColumnRankingJson(const json& j, ColumnMethod* method) {
  TP_RETURN_IF_ERROR(CheckKeys(j, "columns.ranking",
                               {"components", "baseline", "raw_caption_scores",
                                "normalized_label_likelihood"}));
  if (auto c = j.find("components"); c != j.end()) {
    TP_ASSIGN_OR_RETURN(std::string list, NameList(*c, "components"));
    TP_RETURN_IF_ERROR(SetColumnComponents(list, &method->ranking));
  }
  if (auto b = j.find("baseline"); b != j.end() && !b->is_null()) {
    if (!b->is_string() || b->get<std::string>() != "acsdb") {
      return absl::OutOfRangeError("the only column baseline is \"acsdb\"");
    }
    method->acsdb_baseline = true;
  }
  TP_RETURN_IF_ERROR(ReadBool(j, "raw_caption_scores",
                              &method->ranking.raw_caption_scores));
  TP_RETURN_IF_ERROR(ReadBool(j, "normalized_label_likelihood",
                              &method->ranking.normalized_label_likelihood));
  return absl::OkStatus();
}

absl::StatusOr<EvalConfig> ParseEvalConfig(const json& j) {
  EvalConfig cfg;
  TP_RETURN_IF_ERROR(CheckKeys(j, "config", {"depth", "rows", "columns"}));
  TP_RETURN_IF_ERROR(ReadCount(j, "depth", &cfg.depth));
  if (auto rows = j.find("rows"); rows != j.end()) {
    TP_RETURN_IF_ERROR(CheckKeys(*rows, "rows", {"candidates", "ranking"}));
    if (auto c = rows->find("candidates"); c != rows->end()) {
      TP_RETURN_IF_ERROR(ParseRowCandidateJson(*c, &cfg.rows.candidates));
    }
    if (auto r = rows->find("ranking"); r != rows->end()) {
      TP_RETURN_IF_ERROR(ParseRowRankingJson(*r, &cfg.rows.ranking));
    }
  }
  if (auto cols = j.find("columns"); cols != j.end()) {
    TP_RETURN_IF_ERROR(CheckKeys(*cols, "columns", {"candidates", "ranking"}));
    if (auto c = cols->find("candidates"); c != cols->end()) {
      TP_RETURN_IF_ERROR(ParseColumnCandidateJson(*c, &cfg.columns.candidates));
    }
    if (auto r = cols->find("ranking"); r != cols->end()) {
      TP_RETURN_IF_ERROR(ParseColumnRankingJson(*r, &cfg.columns));
    }
  }
  return cfg;
}

json EvalConfigToJson(const EvalConfig& cfg) {
  const RowCandidateConfig& rc = cfg.rows.candidates;
  const RowRankingConfig& rr = cfg.rows.ranking;
  std::vector<std::string> row_methods;
  if (rc.categories) row_methods.push_back("categories");
  if (rc.types) row_methods.push_back("types");
  if (rc.caption) row_methods.push_back("caption");
  if (rc.entities) row_methods.push_back("entities");
  const ColumnCandidateConfig& cc = cfg.columns.candidates;
  std::vector<std::string> col_methods;
  if (cc.caption) col_methods.push_back("caption");
  if (cc.labels) col_methods.push_back("labels");
  if (cc.entities) col_methods.push_back("entities");
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
  return {
      {"depth", cfg.depth},
      {"rows",
       {{"candidates",
         {{"methods", row_methods},
          {"k",
           {{"categories", rc.k_categories},
            {"types", rc.k_types},
            {"caption", rc.k_caption},
            {"entities", rc.k_entities}}},
          {"include_without_abstract", rc.include_entities_without_abstract}}},
        {"ranking",
         {{"components", RowComponentNames(rr)},
          {"kb_similarity", KbSimilarityName(rr.kb_similarity)},
          {"lambda_e", rr.lambda_e},
          {"lambda_l", rr.lambda_l},
          {"lambda_c", rr.lambda_c},
          {"mu_labels", opt(rr.mu_labels)},
          {"mu_captions", opt(rr.mu_captions)},
          {"soft_zeros", rr.soft_zeros},
          {"renormalize_kb", rr.renormalize_kb}}}}},
      {"columns",
       {{"candidates",
         {{"methods", col_methods},
          {"k",
           {{"caption", cc.k_caption},
            {"labels", cc.k_labels},
            {"entities", cc.k_entities}}}}},
        {"ranking",
         {{"components", ColumnComponentNames(cfg.columns.ranking)},
          {"baseline", cfg.columns.acsdb_baseline ? json("acsdb") : json()},
          {"raw_caption_scores", cfg.columns.ranking.raw_caption_scores},
          {"normalized_label_likelihood",
           cfg.columns.ranking.normalized_label_likelihood}}}}},
  };
}

}  // namespace tablepop
