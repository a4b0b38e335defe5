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

#include "gtest/gtest.h"

namespace tablepop {
namespace {

using nlohmann::json;

TEST(EvalConfigTest, DefaultsFromEmptyObject) {
  auto cfg = ParseEvalConfig(json::object());
  ASSERT_TRUE(cfg.ok());
  EXPECT_EQ(cfg->depth, 1000);
  EXPECT_EQ(cfg->rows.ranking.lambda_e, 0.5);
  EXPECT_EQ(cfg->rows.ranking.lambda_l, 0.5);
  EXPECT_EQ(cfg->rows.ranking.lambda_c, 0.5);
  EXPECT_EQ(cfg->rows.candidates.k_categories, 256);
  EXPECT_EQ(cfg->rows.candidates.k_caption, 256);
  EXPECT_EQ(cfg->rows.candidates.k_entities, 256);
  EXPECT_EQ(cfg->rows.candidates.k_types, 4096);
  EXPECT_FALSE(cfg->rows.candidates.types);
  EXPECT_FALSE(cfg->columns.acsdb_baseline);
}

TEST(EvalConfigTest, RoundTrip) {
  json j = {
      {"depth", 50},
      {"rows",
       {{"candidates", {{"methods", {"types", "caption"}}, {"k", {{"types", 10}}}}},
        {"ranking",
         {{"components", "esim,caption"},
          {"kb_similarity", "wlm"},
          {"lambda_e", 0.25},
          {"mu_labels", 3.5},
          {"soft_zeros", true}}}}},
      {"columns",
       {{"candidates", {{"methods", {"labels"}}, {"k", {{"labels", 9}}}}},
        {"ranking", {{"components", {"entities"}}, {"baseline", "acsdb"}}}}},
  };
  auto cfg = ParseEvalConfig(j);
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  EXPECT_EQ(cfg->depth, 50);
  EXPECT_TRUE(cfg->rows.candidates.types);
  EXPECT_FALSE(cfg->rows.candidates.categories);
  EXPECT_EQ(cfg->rows.candidates.k_types, 10);
  EXPECT_FALSE(cfg->rows.ranking.use_label_likelihood);
  EXPECT_TRUE(cfg->rows.ranking.use_caption_likelihood);
  EXPECT_EQ(cfg->rows.ranking.kb_similarity, KbSimilarity::kWlm);
  EXPECT_EQ(cfg->rows.ranking.mu_labels, 3.5);
  EXPECT_TRUE(cfg->columns.acsdb_baseline);
  EXPECT_FALSE(cfg->columns.ranking.use_caption);
  EXPECT_TRUE(cfg->columns.ranking.use_entities);

  const json dumped = EvalConfigToJson(*cfg);
  auto again = ParseEvalConfig(dumped);
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(EvalConfigToJson(*again), dumped);
}

TEST(EvalConfigTest, Errors) {
  EXPECT_EQ(ParseEvalConfig(json{{"bogus", 1}}).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(ParseEvalConfig(json::array()).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ParseEvalConfig(json{{"depth", 0}}).status().code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(ParseEvalConfig(json{{"depth", "10"}}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ParseEvalConfig(json{{"rows", {{"ranking", {{"lambda_e", 1.5}}}}}})
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(
      ParseEvalConfig(json{{"rows", {{"ranking", {{"components", {"magic"}}}}}}})
          .status()
          .code(),
      absl::StatusCode::kOutOfRange);
  EXPECT_EQ(
      ParseEvalConfig(json{{"rows", {{"candidates", {{"methods", json::array()}}}}}})
          .status()
          .code(),
      absl::StatusCode::kOutOfRange);
  EXPECT_EQ(
      ParseEvalConfig(json{{"columns", {{"ranking", {{"baseline", "other"}}}}}})
          .status()
          .code(),
      absl::StatusCode::kOutOfRange);
  EXPECT_EQ(ParseEvalConfig(json{{"rows", {{"ranking", {{"mu_labels", -1}}}}}})
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
}

TEST(ComponentListTest, Names) {
  RowRankingConfig row;
  ASSERT_TRUE(SetRowComponents("label, caption", &row).ok());
  EXPECT_FALSE(row.use_entity_similarity);
  EXPECT_TRUE(row.use_label_likelihood);
  EXPECT_TRUE(row.use_caption_likelihood);
  ColumnRankingConfig col;
  ASSERT_TRUE(SetColumnComponents("caption", &col).ok());
  EXPECT_TRUE(col.use_caption);
  EXPECT_FALSE(col.use_labels);
  EXPECT_FALSE(SetColumnComponents("caption,zzz", &col).ok());
  RowCandidateConfig methods;
  ASSERT_TRUE(SetRowMethods("categories", &methods).ok());
  EXPECT_FALSE(methods.caption);
  EXPECT_FALSE(SetRowMethods("", &methods).ok());
  ColumnCandidateConfig cmethods;
  ASSERT_TRUE(SetColumnMethods("entities,labels", &cmethods).ok());
  EXPECT_FALSE(cmethods.caption);
}

}  // namespace
}  // namespace tablepop
