#include "patcls/weaklabel.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "patcls/error.h"
#include "patcls/io.h"
#include "test_util.h"

namespace patcls {
namespace {

using testing::Bits;

Document DescriptionOnly(std::vector<std::string> tokens) {
  Document d;
  d.id = "d";
  d.description_tokens = std::move(tokens);
  return d;
}

TEST(LabelerTest, WorkedExamples) {
  const Labeler labeler(DefaultTaxonomy(), LabelingConfig{});
  EXPECT_EQ(labeler.Label(DescriptionOnly({"recycling", "plastic", "waste"})),
            Bits({1, 1, 1, 0, 0, 0, 0, 0, 0}));
  EXPECT_EQ(labeler.DirectClasses(DescriptionOnly({"recycling", "plastic", "waste"})),
            (std::vector<size_t>{1, 2}));
  EXPECT_EQ(labeler.Label(DescriptionOnly({})), LabelVector(9));
  EXPECT_EQ(labeler.Label(DescriptionOnly({"bioplastic"})), Bits({1, 0, 0, 0, 0, 0, 1, 1, 0}));
}

TEST(LabelerTest, ScansOnlyConfiguredFields) {
  Document d;
  d.title_tokens = {"bioplastic"};
  d.description_tokens = {"battery"};
  EXPECT_FALSE(Labeler(DefaultTaxonomy(), LabelingConfig{}).Label(d).any());
  LabelingConfig cfg;
  cfg.fields_to_scan = {TextField::kTitle, TextField::kDescription};
  EXPECT_EQ(Labeler(DefaultTaxonomy(), cfg).Label(d), Bits({1, 0, 0, 0, 0, 0, 1, 1, 0}));
}

TEST(LabelerTest, PerClassThreshold) {
  LabelingConfig cfg;
  cfg.k_per_class["Y02G20/10"] = 2;
  const Labeler labeler(DefaultTaxonomy(), cfg);
  EXPECT_FALSE(labeler.Label(DescriptionOnly({"bioplastic"})).any());
  EXPECT_TRUE(labeler.Label(DescriptionOnly({"bioplastic", "x", "bioplastics"})).any());
  EXPECT_EQ(cfg.ThresholdFor("Y02G20/10"), 2u);
  EXPECT_EQ(cfg.ThresholdFor("Y02G"), 1u);
}

TEST(LabelerTest, BadQueryFailsAtConstruction) {
  const Taxonomy t =
      LoadTaxonomy(R"({"classes": [{"code": "A", "query": "(broken 3d"}]})");
  try {
    Labeler labeler(t, LabelingConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kConfig);
    EXPECT_NE(std::string(e.what()).find("'A'"), std::string::npos);
  }
}

TEST(LabelingConfigTest, ValidateRejectsBadValues) {
  const Taxonomy& t = DefaultTaxonomy();
  auto invalid = [&](auto mutate) {
    LabelingConfig c;
    mutate(c);
    EXPECT_THROW(c.Validate(t), Error);
  };
  invalid([](LabelingConfig& c) { c.k = 0; });
  invalid([](LabelingConfig& c) { c.negative_ratio = 0.0; });
  invalid([](LabelingConfig& c) { c.split_fractions = {0.8, 0.2, 0.0}; });
  invalid([](LabelingConfig& c) { c.split_fractions = {0.8, 0.1, 0.2}; });
  invalid([](LabelingConfig& c) { c.k_per_class["Y99"] = 1; });
  invalid([](LabelingConfig& c) { c.fields_to_scan.clear(); });
  invalid([](LabelingConfig& c) { c.negative_boost_fraction = 1.5; });
  EXPECT_NO_THROW(LabelingConfig{}.Validate(t));
}

// With k = 1, a class bit is set iff the class's own query or the query of
// one of its descendants fires.
TEST(LabelerTest, ClosureIsDisjunctionOverDescendants) {
  const Taxonomy& t = DefaultTaxonomy();
  const Labeler labeler(t, LabelingConfig{});
  const std::vector<std::string> words = {
      "green",     "plastic",   "recycled",    "recycling", "waste",  "sorting",
      "compost",   "melt",      "pellets",     "feedstock", "bioplastic", "vitrimer",
      "biodegradable", "alternative", "depolymerized", "battery", "incinerated"};
  std::mt19937_64 gen(8);
  std::vector<QueryPtr> queries;
  for (const ClassNode& n : t.nodes()) queries.push_back(ParseQuery(n.query_source));
  for (int trial = 0; trial < 1500; ++trial) {
    std::vector<std::string> toks(gen() % 25);
    for (auto& w : toks) w = words[gen() % words.size()];
    const Document d = DescriptionOnly(toks);
    const LabelVector label = labeler.Label(d);
    EXPECT_TRUE(t.IsConsistent(label));
    for (size_t c = 0; c < t.size(); ++c) {
      bool expected = false;
      for (size_t x = 0; x < t.size(); ++x) {
        bool descendant_or_self = x == c;
        for (size_t a : t.AncestorIndices(x)) descendant_or_self |= a == c;
        if (descendant_or_self && Evaluate(*queries[x], toks).count >= 1) expected = true;
      }
      EXPECT_EQ(label.test(c), expected) << t.node(c).code;
    }
  }
}

RawPatent Patent(const std::string& id, const std::string& title, const std::string& description) {
  return RawPatent{id, "en", title, "An abstract about " + title, description};
}

// `positives` documents with a bioplastic description, `negatives` without,
// every third negative mentioning plastic.
std::vector<RawPatent> SyntheticCorpus(size_t positives, size_t negatives) {
  const size_t total = positives + negatives;
  const size_t stride = total / positives;
  std::vector<RawPatent> out;
  for (size_t i = 0; i < total; ++i) {
    const std::string id = "P" + std::to_string(i);
    const std::string n = std::to_string(i);
    if (i % stride == 0 && i / stride < positives) {
      out.push_back(Patent(id, "Starch film " + n, "A bioplastic film."));
    } else if (i % 3 == 0) {
      out.push_back(Patent(id, "Housing " + n, "A plastic housing."));
    } else {
      out.push_back(Patent(id, "Battery " + n, "A battery electrode."));
    }
  }
  return out;
}

size_t CountPositives(const std::vector<LabeledExample>& rows) {
  size_t n = 0;
  for (const auto& r : rows) n += r.label.any();
  return n;
}

TEST(BuildDatasetTest, SizesFollowRatioAndFractions) {
  const std::vector<RawPatent> corpus = SyntheticCorpus(20, 80);
  const BuildResult r = BuildDataset(DefaultTaxonomy(), LabelingConfig{}, corpus);
  EXPECT_EQ(r.report.positives, 20u);
  EXPECT_EQ(r.report.negatives_target, 40u);
  EXPECT_EQ(r.report.negatives_sampled, 40u);
  EXPECT_EQ(r.split.train.size(), 48u);
  EXPECT_EQ(r.split.validation.size(), 6u);
  EXPECT_EQ(r.split.test.size(), 6u);
  EXPECT_EQ(CountPositives(r.split.train) + CountPositives(r.split.validation) +
                CountPositives(r.split.test),
            20u);
  std::set<std::string> ids;
  for (const auto* part : {&r.split.train, &r.split.validation, &r.split.test}) {
    for (const auto& ex : *part) {
      EXPECT_TRUE(ids.insert(ex.id).second) << ex.id;
      EXPECT_FALSE(ex.text_tokens.empty());
      EXPECT_TRUE(DefaultTaxonomy().IsConsistent(ex.label));
    }
  }
}

TEST(BuildDatasetTest, BoostShareIsGuaranteed) {
  const std::vector<RawPatent> corpus = SyntheticCorpus(20, 80);
  LabelingConfig cfg;
  cfg.negative_boost_fraction = 0.5;
  const BuildResult r = BuildDataset(DefaultTaxonomy(), cfg, corpus);
  EXPECT_GE(r.report.boost_negatives_sampled, 20u);
  EXPECT_GT(r.report.boost_negatives_available, 20u);
  cfg.negative_boost_query = "";
  const BuildResult none = BuildDataset(DefaultTaxonomy(), cfg, corpus);
  EXPECT_EQ(none.report.boost_negatives_available, 0u);
}

TEST(BuildDatasetTest, FewerNegativesThanTargetKeepsAll) {
  const std::vector<RawPatent> corpus = SyntheticCorpus(20, 30);
  const BuildResult r = BuildDataset(DefaultTaxonomy(), LabelingConfig{}, corpus);
  EXPECT_EQ(r.report.negatives_target, 40u);
  EXPECT_EQ(r.report.negatives_sampled, 30u);
}

TEST(BuildDatasetTest, NoPositivesIsDataError) {
  std::vector<RawPatent> corpus = {Patent("1", "Battery", "A battery."),
                                   Patent("2", "Engine", "An engine.")};
  try {
    BuildDataset(DefaultTaxonomy(), LabelingConfig{}, corpus);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kData);
  }
}

TEST(BuildDatasetTest, TinyPoolIsInfeasible) {
  std::vector<RawPatent> corpus = {Patent("1", "Film", "A bioplastic film."),
                                   Patent("2", "Engine", "An engine.")};
  EXPECT_THROW(BuildDataset(DefaultTaxonomy(), LabelingConfig{}, corpus), Error);
}

TEST(BuildDatasetTest, FiltersAndCountsRecords) {
  std::vector<RawPatent> corpus = SyntheticCorpus(20, 80);
  corpus.push_back(RawPatent{"de", "de", "Titel", "Abstrakt", "Kunststoff"});
  corpus.push_back(RawPatent{"nodesc", "en", "Title", "Abstract", std::nullopt});
  corpus.push_back(RawPatent{"stop", "en", "The", "of and", "A bioplastic."});
  const BuildResult r = BuildDataset(DefaultTaxonomy(), LabelingConfig{}, corpus);
  EXPECT_EQ(r.report.records_read, 103u);
  EXPECT_EQ(r.report.filtered_out, 2u);
  EXPECT_EQ(r.report.empty_input, 1u);
}

TEST(BuildDatasetTest, DeterministicAndSeedOnlyMovesNegatives) {
  const std::vector<RawPatent> corpus = SyntheticCorpus(20, 80);
  LabelingConfig cfg;
  const BuildResult a = BuildDataset(DefaultTaxonomy(), cfg, corpus);
  const BuildResult b = BuildDataset(DefaultTaxonomy(), cfg, corpus);
  EXPECT_EQ(a.split, b.split);
  cfg.seed = 8;
  const BuildResult c = BuildDataset(DefaultTaxonomy(), cfg, corpus);
  EXPECT_NE(a.split, c.split);
  auto positive_labels = [](const BuildResult& r) {
    std::map<std::string, LabelVector> out;
    for (const auto* part : {&r.split.train, &r.split.validation, &r.split.test}) {
      for (const auto& ex : *part) {
        if (ex.label.any()) out[ex.id] = ex.label;
      }
    }
    return out;
  };
  EXPECT_EQ(positive_labels(a), positive_labels(c));
}

TEST(LabelingReportTest, CountsAreMonotoneUpTheTree) {
  const std::vector<RawPatent> corpus = ReadCorpus(testing::kDataDir / "sample_corpus.jsonl");
  const Taxonomy& t = DefaultTaxonomy();
  const BuildResult r = BuildDataset(t, LabelingConfig{}, corpus);
  for (size_t s = 0; s < 3; ++s) {
    ASSERT_EQ(r.report.per_split[s].size(), t.size());
    for (size_t c = 1; c < t.size(); ++c) {
      const size_t p = static_cast<size_t>(t.parent_index(c));
      EXPECT_LE(r.report.per_split[s][c].positive, r.report.per_split[s][p].positive);
      EXPECT_EQ(r.report.per_split[s][c].positive + r.report.per_split[s][c].negative,
                r.report.split_sizes[s]);
    }
  }
  const std::string text = r.report.ToText();
  for (const std::string& code : t.codes()) EXPECT_NE(text.find(code), std::string::npos);
  EXPECT_NE(text.find("Total"), std::string::npos);
}

TEST(DatasetCsvTest, RoundTrip) {
  const Taxonomy& t = DefaultTaxonomy();
  const BuildResult r =
      BuildDataset(t, LabelingConfig{}, ReadCorpus(testing::kDataDir / "sample_corpus.jsonl"));
  for (const auto* part : {&r.split.train, &r.split.validation, &r.split.test}) {
    const std::string csv = SplitToCsv(t, *part);
    EXPECT_EQ(SplitFromCsv(t, csv), *part);
  }
  testing::TempDir dir;
  WriteDataset(t, r.split, dir.path());
  EXPECT_EQ(ReadDataset(t, dir.path()), r.split);
  const std::string header = ReadTextFile(dir / "train.csv").substr(0, 100);
  EXPECT_EQ(header.rfind("ID,TITLE_ABSTR,Y02G,Y02G10/00,Y02G10/10,Y02G10/20,Y02G10/22,"
                         "Y02G10/24,Y02G20/00,Y02G20/10,Y02G20/20\n",
                         0),
            0u);
}

TEST(DatasetCsvTest, QuotingSurvivesAwkwardIds) {
  const Taxonomy t = testing::ChainTaxonomy(2);
  std::vector<LabeledExample> rows = {
      {"id,with \"quotes\"", {"a", "b"}, Bits({1, 1})},
      {"plain", {"c"}, Bits({0, 0})},
  };
  EXPECT_EQ(SplitFromCsv(t, SplitToCsv(t, rows)), rows);
}

std::string ErrorText(const Taxonomy& t, const std::string& csv) {
  try {
    SplitFromCsv(t, csv);
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kData);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << csv;
  return "";
}

TEST(DatasetCsvTest, RejectsBadInput) {
  const Taxonomy t = testing::ChainTaxonomy(2);
  EXPECT_NE(ErrorText(t, "ID,TITLE_ABSTR,A,A1\nx,\"a b\",2,0\n").find("'2'"), std::string::npos);
  EXPECT_NE(ErrorText(t, "ID,TITLE_ABSTR,A1,A\nx,\"a b\",1,0\n").find("A1"), std::string::npos);
  ErrorText(t, "ID,TITLE_ABSTR,A\nx,\"a\",1\n");
  ErrorText(t, "ID,TITLE_ABSTR,A,A1\nx,\"a\",1\n");
  ErrorText(t, "ID,TITLE_ABSTR,A,A1\n,\"a\",1,1\n");
  ErrorText(t, "ID,TITLE_ABSTR,A,A1\nx,\"a,1,1\n");
}

}  // namespace
}  // namespace patcls
