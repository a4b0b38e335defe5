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

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace tablepop {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;

constexpr char kSmallKb[] =
    R"({"id":"Japan","categories":["Countries in Asia","Island countries"],"types":["Country","Place"],"outlinks":["Tokyo","Nippon"],"triples":[["Japan","capital","Tokyo"]],"abstract":"Japan is an island country."})"
    "\n"
    R"({"id":"Tokyo","categories":["Capitals in Asia"],"types":["City","Place"],"outlinks":["Japan"],"abstract":"Tokyo is the capital of Japan."})"
    "\n"
    R"({"id":"Kyoto","categories":["Former capitals"],"types":["City","Place"],"triples":[["Kyoto","country","Nippon"]]})"
    "\n";

KbStore LoadSmall() {
  std::stringstream dump(kSmallKb);
  std::stringstream redirects("Nippon\tJapan\n");
  auto kb = KbStore::Load(dump, &redirects, nullptr);
  EXPECT_TRUE(kb.ok()) << kb.status();
  return *std::move(kb);
}

TEST(KbStoreTest, LoadsRecordsAndRelations) {
  KbStore kb = LoadSmall();
  ASSERT_EQ(kb.size(), 3);
  const EntityRecord* japan = kb.Find("Japan");
  ASSERT_NE(japan, nullptr);
  EXPECT_THAT(japan->types, ElementsAre("Country", "Place"));
  // Outlinks are canonicalized and deduplicated.
  EXPECT_THAT(japan->outlinks, ElementsAre("Japan", "Tokyo"));
  EXPECT_THAT(japan->relations,
              ElementsAre(RelationPair{"Kyoto", "country"},
                          RelationPair{"capital", "Tokyo"}));
  EXPECT_THAT(kb.Find("Tokyo")->relations,
              ElementsAre(RelationPair{"Japan", "capital"}));
  EXPECT_THAT(kb.Find("Kyoto")->relations,
              ElementsAre(RelationPair{"country", "Japan"}));
  EXPECT_EQ(kb.Find("Nippon"), nullptr);
  EXPECT_EQ(kb.Canonical("Nippon"), "Japan");
  EXPECT_EQ(kb.Canonical("Osaka"), "Osaka");
}

TEST(KbStoreTest, PropertyPostingsAreSorted) {
  KbStore kb = LoadSmall();
  auto places = kb.EntitiesWithProperty(EntityProperty::kTypes, "Place");
  EXPECT_EQ(places.size(), 3);
  EXPECT_TRUE(std::is_sorted(places.begin(), places.end()));
  EXPECT_THAT(kb.EntitiesWithProperty(EntityProperty::kCategories, "None"),
              IsEmpty());
}

TEST(KbStoreTest, AbstractStatistics) {
  KbStore kb = LoadSmall();
  // 5 + 6 terms over two entities with abstracts.
  EXPECT_DOUBLE_EQ(kb.mean_abstract_length(), 5.5);
  EXPECT_DOUBLE_EQ(kb.AbstractBackground("japan"), 2.0 / 11.0);
  EXPECT_DOUBLE_EQ(kb.AbstractBackground("missing"), 0.0);
  EXPECT_FALSE(kb.Find("Kyoto")->has_abstract);
}

TEST(KbStoreTest, DuplicateIdFailsTheLoad) {
  std::stringstream dump(R"({"id":"a"})" "\n" R"({"id":"a"})" "\n");
  auto kb = KbStore::Load(dump, nullptr, nullptr);
  EXPECT_EQ(kb.status().code(), absl::StatusCode::kAlreadyExists);
}

TEST(KbStoreTest, MalformedRecordsAreSkippedWithLineNumbers) {
  std::stringstream dump(R"({"id":"a"})" "\n" "not json\n"
                         R"({"id":"b","triples":[["b","p"]]})" "\n"
                         R"({"id":"c","categories":"x"})" "\n");
  std::vector<RecordError> errors;
  auto kb = KbStore::Load(dump, nullptr, &errors);
  ASSERT_TRUE(kb.ok());
  EXPECT_EQ(kb->size(), 1);
  ASSERT_EQ(errors.size(), 3);
  EXPECT_EQ(errors[0].line, 2);
  EXPECT_EQ(errors[1].line, 3);
  EXPECT_EQ(errors[2].line, 4);
}

TEST(KbStoreTest, MissingFileIsNotFound) {
  EXPECT_EQ(KbStore::LoadFiles("/nonexistent/kb.jsonl", "", nullptr).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(KbStoreTest, CanonicalizeLinksDropsUnknownEntities) {
  KbStore kb = LoadSmall();
  Table t;
  t.id = "t";
  t.headings = {"A", "B"};
  t.rows = {{{"Nippon", "Nippon"}, {"Osaka", "Osaka"}}};
  kb.CanonicalizeLinks(&t);
  EXPECT_EQ(t.rows[0][0].entity, "Japan");
  EXPECT_FALSE(t.rows[0][1].entity.has_value());
}

KbStore LoadOverlapKb() {
  std::stringstream dump(
      R"({"id":"e1","categories":["A","B"]})" "\n"
      R"({"id":"e2","categories":["B","C"]})" "\n"
      R"({"id":"e3","categories":["D"]})" "\n"
      R"({"id":"e4","categories":["A","B","C"]})" "\n"
      R"({"id":"e5","categories":["A","B"]})" "\n");
  return *KbStore::Load(dump, nullptr, nullptr);
}

TEST(PropertyOverlapTest, Examples) {
  KbStore kb = LoadOverlapKb();
  const std::vector<std::string> s2 = {"e2"};
  EXPECT_EQ(*PropertyOverlapScore(kb, "e1", s2, EntityProperty::kCategories), 1);
  const std::vector<std::string> s3 = {"e3"};
  EXPECT_EQ(*PropertyOverlapScore(kb, "e1", s3, EntityProperty::kCategories), 0);
  const std::vector<std::string> s15 = {"e5", "e2"};
  EXPECT_EQ(*PropertyOverlapScore(kb, "e4", s15, EntityProperty::kCategories), 3);
}

TEST(PropertyOverlapTest, UnknownEntityIsNotFound) {
  KbStore kb = LoadOverlapKb();
  const std::vector<std::string> seeds = {"zzz"};
  EXPECT_EQ(PropertyOverlapScore(kb, "e1", seeds, EntityProperty::kTypes)
                .status()
                .code(),
            absl::StatusCode::kNotFound);
}

TEST(PropertyOverlapTest, BoundedAndMonotoneOnSynthetic) {
  auto f = testing::LoadFixture("synthetic");
  ASSERT_NE(f, nullptr);
  std::mt19937 rng(11);
  const auto records = f->kb.records();
  for (int trial = 0; trial < 300; ++trial) {
    const EntityRecord& target = records[rng() % records.size()];
    std::vector<std::string> seeds;
    for (int k = 0; k < 5; ++k) {
      const size_t before_size = seeds.size();
      for (EntityProperty p :
           {EntityProperty::kCategories, EntityProperty::kTypes}) {
        auto before = PropertyOverlapScore(f->kb, target.id, seeds, p);
        ASSERT_TRUE(before.ok());
        const auto& own = p == EntityProperty::kCategories ? target.categories
                                                           : target.types;
        EXPECT_LE(*before, own.size());
        std::vector<std::string> more = seeds;
        more.push_back(records[rng() % records.size()].id);
        auto after = PropertyOverlapScore(f->kb, target.id, more, p);
        ASSERT_TRUE(after.ok());
        EXPECT_GE(*after, *before);
      }
      ASSERT_EQ(seeds.size(), before_size);
      seeds.push_back(records[rng() % records.size()].id);
    }
  }
}

// Every stored triple with both endpoints canonical and at least one endpoint
// in the store must be recoverable from the relation pairs, and every pair
// must come from some triple.
TEST(KbStoreTest, RelationPairsReconstructTriples) {
  auto f = testing::LoadFixture("synthetic");
  ASSERT_NE(f, nullptr);
  using Triple = std::tuple<std::string, std::string, std::string>;
  std::set<Triple> triples;
  std::ifstream in(f->kb_path());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (!j.contains("triples")) continue;
    for (const auto& t : j["triples"]) {
      const std::string s = f->kb.Canonical(t[0].get<std::string>());
      const std::string o = f->kb.Canonical(t[2].get<std::string>());
      if (s == o) continue;
      triples.insert({s, t[1].get<std::string>(), o});
    }
  }
  ASSERT_FALSE(triples.empty());
  std::set<Triple> as_subject, as_object;
  for (const EntityRecord& r : f->kb.records()) {
    for (const RelationPair& pair : r.relations) {
      as_subject.insert({r.id, pair.first, pair.second});
      as_object.insert({pair.first, pair.second, r.id});
    }
  }
  for (const Triple& t : triples) {
    if (f->kb.Find(std::get<0>(t)) != nullptr) {
      EXPECT_TRUE(as_subject.contains(t));
    }
    if (f->kb.Find(std::get<2>(t)) != nullptr) {
      EXPECT_TRUE(as_object.contains(t));
    }
  }
  for (const EntityRecord& r : f->kb.records()) {
    for (const RelationPair& pair : r.relations) {
      EXPECT_TRUE(triples.contains({r.id, pair.first, pair.second}) ||
                  triples.contains({pair.first, pair.second, r.id}))
          << r.id << " " << pair.first << " " << pair.second;
    }
  }
}

}  // namespace
}  // namespace tablepop
