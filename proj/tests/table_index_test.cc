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

#include <filesystem>
#include <fstream>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracle/brute_force.h"
#include "test_util.h"

namespace tablepop {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

Table MakeTable(std::string id, std::string caption,
                std::vector<std::string> headings,
                std::vector<std::string> entities) {
  Table t;
  t.id = std::move(id);
  t.caption = std::move(caption);
  t.headings = std::move(headings);
  for (const auto& e : entities) {
    std::vector<Cell> row;
    row.push_back({e, e});
    for (size_t c = 1; c < t.headings.size(); ++c) row.push_back({"v", {}});
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<uint32_t> Docs(std::span<const Posting> postings) {
  std::vector<uint32_t> out;
  for (const auto& p : postings) out.push_back(p.doc);
  return out;
}

TEST(TableIndexTest, SingleTablePostings) {
  std::vector<Table> corpus = {MakeTable("t1", "", {"Name", "X"}, {"a", "b"})};
  TableIndex index = TableIndex::Build(corpus, {});
  EXPECT_THAT(Docs(index.EntityPostings("a")), ElementsAre(0));
  EXPECT_EQ(index.CountTablesWithEntity("a"), 1);
  EXPECT_EQ(index.CountTablesWithEntity("c"), 0);
}

TEST(TableIndexTest, SharedLabelAndHeadingStatistics) {
  std::vector<Table> corpus = {
      MakeTable("t1", "", {"Year", "Team"}, {"e"}),
      MakeTable("t2", "", {"Year"}, {"e", "f"}),
      MakeTable("t3", "", {"Team:"}, {"f"}),
  };
  TableIndex index = TableIndex::Build(corpus, {});
  EXPECT_EQ(index.CountTablesWithLabel("year"), 2);
  EXPECT_EQ(index.CountTablesWithLabel("team"), 2);
  EXPECT_EQ(index.HeadingTermFrequency("e", "year"), 2);
  EXPECT_EQ(index.HeadingLength("e"), 3);
  EXPECT_EQ(index.HeadingTermFrequency("e", "missing"), 0);
  EXPECT_EQ(index.CountTablesWithEntityAndLabel("e", "team"), 1);
  EXPECT_EQ(index.CountTablesWithEntityAndLabel("e", "absent"), 0);
  EXPECT_EQ(index.CountLabelPair("year", "team"), 1);
  EXPECT_EQ(index.CountLabelPair("year", "year"), 2);
  EXPECT_EQ(index.CountLabelPair("team", "absent"), 0);
  // (2 + 1 + 1) label terms; mean |e| over e and f is (3 + 2) / 2.
  EXPECT_DOUBLE_EQ(index.LabelBackground("year"), 0.5);
  EXPECT_DOUBLE_EQ(index.mean_heading_length(), 2.5);
}

TEST(TableIndexTest, CountWithAllExamples) {
  std::vector<Table> corpus = {
      MakeTable("t1", "", {"A"}, {"a", "b"}),
      MakeTable("t2", "", {"A"}, {"a"}),
      MakeTable("t3", "", {"A"}, {"c"}),
  };
  TableIndex index = TableIndex::Build(corpus, {});
  EXPECT_EQ(index.CountTablesWithAll({}), 3);
  const std::vector<std::string> a = {"a"};
  EXPECT_EQ(index.CountTablesWithAll(a), 2);
  const std::vector<std::string> ab = {"a", "b"};
  EXPECT_EQ(index.CountTablesWithAll(ab), 1);
  const std::vector<std::string> ac = {"a", "c"};
  EXPECT_EQ(index.CountTablesWithAll(ac), 0);
}

TEST(TableIndexTest, ExcludedTablesAreHeldOut) {
  std::vector<Table> corpus = {
      MakeTable("t1", "", {"A"}, {"a"}),
      MakeTable("t2", "", {"A"}, {"a"}),
  };
  TableIndex index = TableIndex::Build(corpus, {"t2"});
  EXPECT_EQ(index.num_tables(), 1);
  EXPECT_EQ(index.CountTablesWithEntity("a"), 1);
  ASSERT_EQ(index.holdout().size(), 1);
  EXPECT_EQ(index.holdout()[0].id, "t2");
  EXPECT_FALSE(index.FindTable("t2").has_value());
}

TEST(SearchTest, BothEntitiesOutrankOne) {
  std::vector<Table> corpus = {
      MakeTable("t1", "", {"A"}, {"e1", "x"}),
      MakeTable("t2", "", {"A"}, {"e1", "e2"}),
      MakeTable("t3", "", {"A"}, {"y", "z"}),
  };
  TableIndex index = TableIndex::Build(corpus, {});
  const std::vector<std::string> q = {"e1", "e2"};
  auto hits = index.Search(SearchField::kEntities, q, 10);
  ASSERT_EQ(hits.size(), 2);
  EXPECT_EQ(index.table(hits[0].doc).id, "t2");
  EXPECT_EQ(index.table(hits[1].doc).id, "t1");
  EXPECT_GT(hits[0].score, hits[1].score);
  // From-scratch BM25: N = 3, every length 2, avg 2.
  const double idf1 = std::log(1.0 + (3 - 2 + 0.5) / (2 + 0.5));
  const double idf2 = std::log(1.0 + (3 - 1 + 0.5) / (1 + 0.5));
  const double tf_part = 1.0 * 2.2 / (1.0 + 1.2);
  EXPECT_NEAR(hits[0].score, (idf1 + idf2) * tf_part, 1e-12);
  EXPECT_NEAR(hits[1].score, idf1 * tf_part, 1e-12);
}

TEST(SearchTest, EmptyQueryAndNoMatch) {
  std::vector<Table> corpus = {MakeTable("t1", "cap", {"A"}, {"a"})};
  TableIndex index = TableIndex::Build(corpus, {});
  EXPECT_THAT(index.Search(SearchField::kCaption, {}, 5), IsEmpty());
  const std::vector<std::string> q = {"nothing"};
  EXPECT_THAT(index.Search(SearchField::kCaption, q, 5), IsEmpty());
}

TEST(SearchTest, SelfRetrievalOnTaggedCaptions) {
  std::mt19937 rng(9);
  const std::vector<std::string> words = {"river", "city", "list", "of",
                                          "largest", "team", "season"};
  std::vector<Table> corpus;
  for (int i = 0; i < 40; ++i) {
    std::string caption = "tag" + std::to_string(i);
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int w = 0; w < n; ++w) caption += " " + words[rng() % words.size()];
    corpus.push_back(MakeTable("t" + std::to_string(100 + i), caption, {"A"}, {"a"}));
  }
  TableIndex index = TableIndex::Build(corpus, {});
  for (uint32_t d = 0; d < index.num_tables(); ++d) {
    auto hits = index.Search(SearchField::kCaption, index.table(d).caption_terms, 1);
    ASSERT_EQ(hits.size(), 1);
    EXPECT_EQ(hits[0].doc, d);
  }
}

TEST(SearchTest, TiesBreakById) {
  std::vector<Table> corpus = {
      MakeTable("t3", "river", {"A"}, {"a"}),
      MakeTable("t1", "river", {"A"}, {"b"}),
      MakeTable("t2", "river", {"A"}, {"c"}),
  };
  TableIndex index = TableIndex::Build(corpus, {});
  const std::vector<std::string> q = {"river"};
  auto hits = index.Search(SearchField::kCaption, q, 2);
  ASSERT_EQ(hits.size(), 2);
  EXPECT_EQ(index.table(hits[0].doc).id, "t1");
  EXPECT_EQ(index.table(hits[1].doc).id, "t2");
}

class SyntheticIndexTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fixture_ = testing::LoadFixture("synthetic").release();
    ASSERT_NE(fixture_, nullptr);
    oracle_ = new oracle::BruteForce(oracle::BruteForce::Build(
        fixture_->kb_path(), fixture_->redirects_path(), fixture_->raw_corpus,
        {}));
  }
  static void TearDownTestSuite() {
    delete oracle_;
    delete fixture_;
  }
  static testing::Fixture* fixture_;
  static oracle::BruteForce* oracle_;
};

testing::Fixture* SyntheticIndexTest::fixture_ = nullptr;
oracle::BruteForce* SyntheticIndexTest::oracle_ = nullptr;

TEST_F(SyntheticIndexTest, SelfRetrievalByDistinctiveCaption) {
  const TableIndex& index = fixture_->index;
  int checked = 0;
  for (uint32_t d = 0; d < index.num_tables(); ++d) {
    const IndexedTable& t = index.table(d);
    bool distinctive = false;
    for (const auto& term : t.caption_terms) {
      distinctive |= index.CaptionPostings(term).size() == 1;
    }
    if (!distinctive) continue;
    auto hits = index.Search(SearchField::kCaption, t.caption_terms, 1);
    ASSERT_EQ(hits.size(), 1);
    EXPECT_EQ(hits[0].doc, d) << t.id;
    ++checked;
  }
  EXPECT_GE(checked, 1);
}

TEST_F(SyntheticIndexTest, LargeKReturnsAllMatches) {
  const TableIndex& index = fixture_->index;
  for (const auto& [id, e] : oracle_->entities()) {
    const std::vector<std::string> q = {id};
    auto hits = index.Search(SearchField::kEntities, q, 100000);
    EXPECT_EQ(hits.size(), oracle_->CountWithEntity(id)) << id;
  }
}

TEST_F(SyntheticIndexTest, CountsMatchScan) {
  const TableIndex& index = fixture_->index;
  ASSERT_EQ(index.num_tables(), oracle_->docs().size());
  std::set<std::string> labels, terms;
  for (const auto& d : oracle_->docs()) {
    labels.insert(d.labels.begin(), d.labels.end());
    terms.insert(d.caption.begin(), d.caption.end());
  }
  labels.insert("never seen");
  for (const auto& [e, rec] : oracle_->entities()) {
    EXPECT_EQ(index.CountTablesWithEntity(e), oracle_->CountWithEntity(e));
    EXPECT_EQ(index.HeadingLength(e), oracle_->HeadingLength(e));
    for (const auto& l : labels) {
      EXPECT_EQ(index.CountTablesWithEntityAndLabel(e, l),
                oracle_->CountEntityLabel(e, l));
    }
    for (const auto& t : terms) {
      EXPECT_EQ(index.CountTablesWithEntityAndCaptionTerm(e, t),
                oracle_->CountEntityCaptionTerm(e, t));
    }
    for (const auto& l : labels) {
      for (const auto& t : oracle::BruteForce::Tokens(l)) {
        EXPECT_EQ(index.HeadingTermFrequency(e, t), oracle_->HeadingTf(e, t));
      }
    }
  }
  for (const auto& a : labels) {
    EXPECT_EQ(index.CountTablesWithLabel(a), oracle_->CountWithLabel(a));
    for (const auto& b : labels) {
      EXPECT_EQ(index.CountLabelPair(a, b), oracle_->CountLabelPair(a, b));
      EXPECT_EQ(index.CountLabelPair(a, b), index.CountLabelPair(b, a));
    }
    for (const auto& t : oracle::BruteForce::Tokens(a)) {
      EXPECT_NEAR(index.LabelBackground(t), oracle_->LabelBackground(t), 1e-15);
    }
  }
  EXPECT_NEAR(index.mean_heading_length(), oracle_->LabelMu(), 1e-12);
}

TEST_F(SyntheticIndexTest, LabelBackgroundSumsToOne) {
  const TableIndex& index = fixture_->index;
  std::set<std::string> terms;
  for (uint32_t d = 0; d < index.num_tables(); ++d) {
    for (const auto& t : TableIndex::LabelTerms(index.table(d))) terms.insert(t);
  }
  double sum = 0.0;
  for (const auto& t : terms) sum += index.LabelBackground(t);
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_EQ(terms.size(), index.label_vocabulary_size());
}

TEST_F(SyntheticIndexTest, CountWithAllIsAntitoneAndMatchesScan) {
  const TableIndex& index = fixture_->index;
  std::vector<std::string> ids;
  for (const auto& [e, rec] : oracle_->entities()) ids.push_back(e);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> set;
    // Start from a table so intersections are usually non-empty.
    const auto& doc = oracle_->docs()[rng() % oracle_->docs().size()];
    size_t previous = index.num_tables();
    for (int k = 0; k < 5; ++k) {
      if (rng() % 3 != 0 && !doc.entities.empty()) {
        set.push_back(doc.entities[rng() % doc.entities.size()]);
      } else {
        set.push_back(ids[rng() % ids.size()]);
      }
      const size_t count = index.CountTablesWithAll(set);
      EXPECT_EQ(count, oracle_->CountWithAll(set));
      EXPECT_LE(count, previous);
      previous = count;
    }
  }
}

TEST_F(SyntheticIndexTest, Bm25MatchesScan) {
  const TableIndex& index = fixture_->index;
  std::mt19937 rng(5);
  struct FieldCase {
    SearchField field;
    const char* name;
  };
  for (FieldCase fc : {FieldCase{SearchField::kCaption, "caption"},
                       FieldCase{SearchField::kEntities, "entities"},
                       FieldCase{SearchField::kLabels, "labels"}}) {
    for (int trial = 0; trial < 60; ++trial) {
      const auto& src = oracle_->docs()[rng() % oracle_->docs().size()];
      const auto& pool = fc.field == SearchField::kCaption    ? src.caption
                         : fc.field == SearchField::kEntities ? src.entities
                                                              : src.labels;
      if (pool.empty()) continue;
      std::vector<std::string> q;
      for (int i = 0; i < 3; ++i) q.push_back(pool[rng() % pool.size()]);
      auto hits = index.Search(fc.field, q, 1000);
      auto expected = oracle_->Search(fc.name, q, 1000);
      ASSERT_EQ(hits.size(), expected.size());
      for (size_t i = 0; i < hits.size(); ++i) {
        EXPECT_NEAR(hits[i].score, oracle_->Bm25(fc.name, q, *expected[i]),
                    1e-9);
        EXPECT_NEAR(index.Score(fc.field, q, hits[i].doc), hits[i].score, 1e-12);
      }
      // Identical queries give identical lists.
      auto again = index.Search(fc.field, q, 1000);
      ASSERT_EQ(again.size(), hits.size());
      for (size_t i = 0; i < hits.size(); ++i) {
        EXPECT_EQ(again[i].doc, hits[i].doc);
        EXPECT_EQ(again[i].score, hits[i].score);
      }
    }
  }
}

TEST_F(SyntheticIndexTest, PersistenceRoundTrip) {
  const TableIndex& index = fixture_->index;
  testing::TempDir tmp;
  IndexManifest manifest;
  manifest.corpus_sha256 = "c";
  manifest.kb_sha256 = "k";
  manifest.exclusion_sha256 = "x";
  ASSERT_TRUE(index.Save(tmp.path(), manifest).ok());
  auto loaded = TableIndex::Load(tmp.path());
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  auto m = TableIndex::ReadManifest(tmp.path());
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->corpus_sha256, "c");
  EXPECT_EQ(m->n_tables, index.num_tables());
  EXPECT_EQ(m->n_holdout, index.holdout().size());
  ASSERT_EQ(loaded->num_tables(), index.num_tables());
  for (uint32_t d = 0; d < index.num_tables(); ++d) {
    EXPECT_EQ(loaded->table(d).id, index.table(d).id);
    EXPECT_EQ(loaded->table(d).labels, index.table(d).labels);
  }
  EXPECT_TRUE(std::equal(loaded->holdout().begin(), loaded->holdout().end(),
                         index.holdout().begin(), index.holdout().end()));
  EXPECT_EQ(loaded->mean_heading_length(), index.mean_heading_length());
  for (const auto& [e, rec] : oracle_->entities()) {
    EXPECT_EQ(loaded->CountTablesWithEntity(e), index.CountTablesWithEntity(e));
    EXPECT_EQ(loaded->HeadingLength(e), index.HeadingLength(e));
    const std::vector<std::string> q = {e};
    auto a = loaded->Search(SearchField::kEntities, q, 50);
    auto b = index.Search(SearchField::kEntities, q, 50);
    ASSERT_EQ(a.size(), b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].doc, b[i].doc);
      EXPECT_EQ(a[i].score, b[i].score);
    }
  }
}

TEST(TableIndexPersistenceTest, ManifestErrors) {
  testing::TempDir tmp;
  EXPECT_EQ(TableIndex::Load(tmp.path()).status().code(),
            absl::StatusCode::kNotFound);
  testing::WriteFileOrDie(tmp.path() + "/manifest.json", "{oops");
  EXPECT_EQ(TableIndex::Load(tmp.path()).status().code(),
            absl::StatusCode::kDataLoss);

  std::vector<Table> corpus = {MakeTable("t1", "", {"A"}, {"a"})};
  TableIndex index = TableIndex::Build(corpus, {});
  ASSERT_TRUE(index.Save(tmp.path(), IndexManifest{}).ok());
  std::filesystem::resize_file(tmp.path() + "/tables.bin", 10);
  EXPECT_EQ(TableIndex::Load(tmp.path()).status().code(),
            absl::StatusCode::kDataLoss);

  ASSERT_TRUE(index.Save(tmp.path(), IndexManifest{}).ok());
  std::string manifest = testing::ReadFileOrDie(tmp.path() + "/manifest.json");
  manifest.replace(manifest.find("\"format_version\": 1"),
                   std::string("\"format_version\": 1").size(),
                   "\"format_version\": 99");
  testing::WriteFileOrDie(tmp.path() + "/manifest.json", manifest);
  EXPECT_EQ(TableIndex::Load(tmp.path()).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

}  // namespace
}  // namespace tablepop
