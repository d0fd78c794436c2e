#include "patcls/taxonomy.h"

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "patcls/error.h"
#include "test_util.h"

namespace patcls {
namespace {

using testing::Bits;

const std::vector<std::string> kDefaultOrder = {
    "Y02G",      "Y02G10/00", "Y02G10/10", "Y02G10/20", "Y02G10/22",
    "Y02G10/24", "Y02G20/00", "Y02G20/10", "Y02G20/20"};

TEST(TaxonomyTest, DefaultSchemeHasNineClassesInCanonicalOrder) {
  const Taxonomy& t = DefaultTaxonomy();
  EXPECT_EQ(t.codes(), kDefaultOrder);
  EXPECT_EQ(t.node(0).code, "Y02G");
  EXPECT_FALSE(t.node(0).parent.has_value());
  std::map<int, size_t> per_level;
  for (const ClassNode& n : t.nodes()) ++per_level[n.level];
  EXPECT_EQ(per_level, (std::map<int, size_t>{{1, 1}, {2, 2}, {3, 4}, {4, 2}}));
  EXPECT_EQ(t.max_level(), 4);
}

TEST(TaxonomyTest, DefaultSchemeCarriesTheClassQueries) {
  const Taxonomy& t = DefaultTaxonomy();
  EXPECT_EQ(t.node(0).query_source, "green+ 4d plastic+");
  EXPECT_EQ(t.node(t.IndexOf("Y02G20/10")).query_source,
            "bioplastic+ or ((biolog+ or biodegrad+ or biobased+ or compostable+) 4d plastic+)");
  for (const ClassNode& n : t.nodes()) EXPECT_FALSE(n.query_source.empty()) << n.code;
}

TEST(TaxonomyTest, LevelsFollowParents) {
  const Taxonomy& t = DefaultTaxonomy();
  for (size_t i = 0; i < t.size(); ++i) {
    const int p = t.parent_index(i);
    if (p < 0) {
      EXPECT_EQ(t.node(i).level, 1);
    } else {
      EXPECT_LT(static_cast<size_t>(p), i);
      EXPECT_EQ(t.node(i).level, t.node(p).level + 1);
    }
  }
}

TEST(TaxonomyTest, SingleNodeConfig) {
  const Taxonomy t = LoadTaxonomy(R"({"classes": [{"code": "Y02G", "query": "green+"}]})");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.max_level(), 1);
}

TEST(TaxonomyTest, UndefinedParentIsRejected) {
  try {
    LoadTaxonomy(R"({"classes": [{"code": "Y02G"}, {"code": "X", "parent": "Y02Z"}]})");
    FAIL() << "expected ConfigError";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kConfig);
    EXPECT_NE(std::string(e.what()).find("Y02Z"), std::string::npos);
  }
}

TEST(TaxonomyTest, StructuralErrors) {
  EXPECT_THROW(LoadTaxonomy(R"({"classes": []})"), Error);
  EXPECT_THROW(LoadTaxonomy(R"({"classes": [{"code": "A"}, {"code": "A"}]})"), Error);
  EXPECT_THROW(LoadTaxonomy(R"({"classes": [{"code": "A", "parent": "B"},
                                            {"code": "B", "parent": "A"}]})"),
               Error);
  EXPECT_THROW(LoadTaxonomy(R"({"classes": [{"code": "A", "parent": "A"}]})"), Error);
  // Parent declared after its child.
  EXPECT_THROW(LoadTaxonomy(R"({"classes": [{"code": "B", "parent": "A"}, {"code": "A"}]})"),
               Error);
  EXPECT_THROW(LoadTaxonomy("not json"), Error);
}

TEST(TaxonomyTest, PropagateExamples) {
  const Taxonomy& t = DefaultTaxonomy();
  EXPECT_EQ(t.Propagate({"Y02G10/22"}), Bits({1, 1, 0, 1, 1, 0, 0, 0, 0}));
  EXPECT_EQ(t.Propagate({"Y02G"}), Bits({1, 0, 0, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(t.Propagate({"Y02G20/10", "Y02G10/24"}), Bits({1, 1, 0, 1, 0, 1, 1, 1, 0}));
  EXPECT_EQ(t.Propagate({}), LabelVector(9));
  EXPECT_THROW(t.Propagate({"Y02Q"}), Error);
}

TEST(TaxonomyTest, AncestorsNearestFirst) {
  const Taxonomy& t = DefaultTaxonomy();
  EXPECT_EQ(t.Ancestors("Y02G10/22"),
            (std::vector<std::string>{"Y02G10/20", "Y02G10/00", "Y02G"}));
  EXPECT_TRUE(t.Ancestors("Y02G").empty());
  EXPECT_EQ(t.Ancestors("Y02G20/20"), (std::vector<std::string>{"Y02G20/00", "Y02G"}));
  EXPECT_THROW(t.Ancestors("nope"), Error);
}

TEST(TaxonomyTest, SingletonPopcountEqualsLevel) {
  const Taxonomy& t = DefaultTaxonomy();
  for (const ClassNode& n : t.nodes()) {
    EXPECT_EQ(t.Propagate({n.code}).popcount(), static_cast<size_t>(n.level)) << n.code;
  }
}

TEST(TaxonomyTest, PropagateIsIdempotentAndConsistent) {
  const Taxonomy& t = DefaultTaxonomy();
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::string> direct;
    for (const std::string& code : t.codes()) {
      if (gen() % 4 == 0) direct.push_back(code);
    }
    const LabelVector once = t.Propagate(direct);
    EXPECT_TRUE(t.IsConsistent(once));
    EXPECT_EQ(t.Propagate(t.CodesOf(once)), once);
    EXPECT_EQ(t.Close(once), once);
  }
}

TEST(TaxonomyTest, IsConsistentDetectsOrphans) {
  const Taxonomy& t = DefaultTaxonomy();
  EXPECT_FALSE(t.IsConsistent(Bits({0, 0, 0, 0, 1, 0, 0, 0, 0})));
  EXPECT_TRUE(t.IsConsistent(LabelVector(9)));
}

TEST(TaxonomyTest, ChildrenAndLevels) {
  const Taxonomy& t = DefaultTaxonomy();
  EXPECT_EQ(t.children(0), (std::vector<size_t>{1, 6}));
  EXPECT_EQ(t.IndicesAtLevel(3), (std::vector<size_t>{2, 3, 7, 8}));
  EXPECT_EQ(t.IndicesAtLevel(4), (std::vector<size_t>{4, 5}));
}

TEST(TaxonomyTest, BundledFileMatchesEmbeddedCopy) {
  const Taxonomy from_file = LoadTaxonomyFile(testing::kDataDir / "green_plastics_taxonomy.json");
  EXPECT_EQ(from_file.codes(), DefaultTaxonomy().codes());
}

}  // namespace
}  // namespace patcls
