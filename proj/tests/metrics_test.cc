#include "patcls/metrics.h"

#include <gtest/gtest.h>

#include "json.hpp"
#include <random>
#include <set>

#include "patcls/error.h"
#include "test_util.h"

namespace patcls {
namespace {

using testing::Bits;

const Taxonomy& T() { return DefaultTaxonomy(); }

LabelVector Labels(std::initializer_list<const char*> codes) {
  std::vector<std::string> v(codes.begin(), codes.end());
  return T().Propagate(v);
}

// Direct bits only, without ancestors.
LabelVector Raw(std::initializer_list<const char*> codes) {
  LabelVector l(T().size());
  for (const char* c : codes) l.set(T().IndexOf(c));
  return l;
}

std::vector<size_t> Idx(std::initializer_list<const char*> codes) {
  std::vector<size_t> v;
  for (const char* c : codes) v.push_back(T().IndexOf(c));
  std::sort(v.begin(), v.end());
  return v;
}

TEST(InstanceSetsTest, WorkedExample) {
  const InstanceSets s =
      MakeInstanceSets(T(), EvalScope::Whole(T()), Raw({"Y02G10/20"}), Raw({"Y02G10/22"}));
  EXPECT_EQ(s.predicted, Idx({"Y02G", "Y02G10/00", "Y02G10/20"}));
  EXPECT_EQ(s.truth, Idx({"Y02G", "Y02G10/00", "Y02G10/20", "Y02G10/22"}));
  EXPECT_TRUE(MakeInstanceSets(T(), EvalScope::Whole(T()), Raw({}), Raw({"Y02G"})).predicted.empty());
  const LabelVector same = Raw({"Y02G20/10", "Y02G10/24"});
  const InstanceSets id = MakeInstanceSets(T(), EvalScope::Whole(T()), same, same);
  EXPECT_EQ(id.predicted, id.truth);
}

TEST(InstanceSetsTest, AncestorsOutsideScopeAreIncluded) {
  const EvalScope leaf = EvalScope::Single(T(), "Y02G10/22");
  const InstanceSets s = MakeInstanceSets(T(), leaf, Raw({"Y02G10/22", "Y02G20/00"}), Raw({}));
  EXPECT_EQ(s.predicted, Idx({"Y02G", "Y02G10/00", "Y02G10/20", "Y02G10/22"}));
  EXPECT_TRUE(s.truth.empty());
}

TEST(HierarchicalScoresTest, WorkedExample) {
  const std::vector<LabelVector> p = {Raw({"Y02G10/20"})};
  const std::vector<LabelVector> l = {Raw({"Y02G10/22"})};
  const HierScores s = HierarchicalScores(T(), EvalScope::Whole(T()), p, l, Averaging::kMicro);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.recall, 0.75);
  EXPECT_NEAR(s.f1, 6.0 / 7.0, 1e-12);
  EXPECT_NEAR(s.f1, 0.857143, 1e-6);
}

TEST(HierarchicalScoresTest, Conventions) {
  const std::vector<LabelVector> truth = {Labels({"Y02G10/22"}), Labels({"Y02G20/20"})};
  for (Averaging a : {Averaging::kMicro, Averaging::kMacro}) {
    // Under macro averaging the three classes without positives score 0.
    const HierScores perfect = HierarchicalScores(T(), EvalScope::Whole(T()), truth, truth, a);
    EXPECT_DOUBLE_EQ(perfect.recall, a == Averaging::kMicro ? 1.0 : 6.0 / 9.0);
    const std::vector<LabelVector> none(2, LabelVector(9));
    const HierScores empty = HierarchicalScores(T(), EvalScope::Whole(T()), none, truth, a);
    EXPECT_EQ(empty.precision, 0.0);
    EXPECT_EQ(empty.recall, 0.0);
    EXPECT_EQ(empty.f1, 0.0);
  }
  const HierScores perfect =
      HierarchicalScores(T(), EvalScope::Whole(T()), truth, truth, Averaging::kMicro);
  EXPECT_DOUBLE_EQ(perfect.precision, 1.0);
  EXPECT_DOUBLE_EQ(perfect.f1, 1.0);
  const std::vector<LabelVector> none;
  EXPECT_THROW(HierarchicalScores(T(), EvalScope::Whole(T()), none, none, Averaging::kMicro),
               Error);
  const std::vector<LabelVector> one = {LabelVector(9)};
  EXPECT_THROW(HierarchicalScores(T(), EvalScope::Whole(T()), one, truth, Averaging::kMicro),
               Error);
}

// Micro scores recomputed from explicitly materialised sets.
HierScores OracleMicro(const std::vector<size_t>& scope, const std::vector<LabelVector>& p,
                       const std::vector<LabelVector>& l) {
  auto expand = [&](const LabelVector& bits) {
    std::set<std::string> out;
    for (size_t c : scope) {
      if (!bits.test(c)) continue;
      out.insert(T().node(c).code);
      for (const std::string& a : T().Ancestors(T().node(c).code)) out.insert(a);
    }
    return out;
  };
  double inter = 0, np = 0, nl = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const auto y = expand(p[i]);
    const auto t = expand(l[i]);
    np += y.size();
    nl += t.size();
    for (const auto& c : y) inter += t.count(c);
  }
  HierScores s;
  s.precision = np > 0 ? inter / np : 0.0;
  s.recall = nl > 0 ? inter / nl : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

LabelVector RandomBits(std::mt19937_64& gen, bool close) {
  LabelVector l(9);
  for (size_t c = 0; c < 9; ++c) {
    if (gen() % 4 == 0) l.set(c);
  }
  return close ? T().Close(l) : l;
}

TEST(HierarchicalScoresTest, MicroMatchesBruteForceOracle) {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 400; ++trial) {
    const size_t n = 1 + gen() % 20;
    std::vector<LabelVector> p, l;
    for (size_t i = 0; i < n; ++i) {
      p.push_back(RandomBits(gen, false));
      l.push_back(RandomBits(gen, true));
    }
    for (const EvalScope& scope : StandardScopes(T())) {
      const HierScores got = HierarchicalScores(T(), scope, p, l, Averaging::kMicro);
      const HierScores want = OracleMicro(scope.classes, p, l);
      EXPECT_NEAR(got.precision, want.precision, 1e-12) << scope.name;
      EXPECT_NEAR(got.recall, want.recall, 1e-12) << scope.name;
      EXPECT_NEAR(got.f1, want.f1, 1e-12) << scope.name;
      EXPECT_GE(got.f1, std::min(got.precision, got.recall) - 1e-15);
      EXPECT_LE(got.f1, std::max(got.precision, got.recall) + 1e-15);
      const HierScores macro = HierarchicalScores(T(), scope, p, l, Averaging::kMacro);
      double mp = 0, mr = 0, mf = 0;
      for (size_t c : scope.classes) {
        const HierScores one = OracleMicro({c}, p, l);
        mp += one.precision;
        mr += one.recall;
        mf += one.f1;
      }
      const double k = static_cast<double>(scope.classes.size());
      EXPECT_NEAR(macro.precision, mp / k, 1e-12) << scope.name;
      EXPECT_NEAR(macro.recall, mr / k, 1e-12) << scope.name;
      EXPECT_NEAR(macro.f1, mf / k, 1e-12) << scope.name;
    }
  }
}

TEST(HierarchicalScoresTest, RootScopeEqualsFlatBinaryScores) {
  std::mt19937_64 gen(5);
  std::vector<LabelVector> p, l;
  double tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < 50; ++i) {
    p.push_back(RandomBits(gen, true));
    l.push_back(RandomBits(gen, true));
    tp += p.back().test(0) && l.back().test(0);
    fp += p.back().test(0) && !l.back().test(0);
    fn += !p.back().test(0) && l.back().test(0);
  }
  const HierScores s =
      HierarchicalScores(T(), EvalScope::Single(T(), "Y02G"), p, l, Averaging::kMicro);
  EXPECT_NEAR(s.precision, tp / (tp + fp), 1e-12);
  EXPECT_NEAR(s.recall, tp / (tp + fn), 1e-12);
}

TEST(ScopeTest, LevelsAreCumulative) {
  EXPECT_EQ(EvalScope::Level(T(), 1).classes, Idx({"Y02G"}));
  EXPECT_EQ(EvalScope::Level(T(), 2).classes, Idx({"Y02G", "Y02G10/00", "Y02G20/00"}));
  EXPECT_EQ(EvalScope::Level(T(), 4).classes, EvalScope::Whole(T()).classes);
  EXPECT_EQ(EvalScope::Level(T(), 2).name, "level 2");
  EXPECT_THROW(EvalScope::Level(T(), 5), Error);
  EXPECT_THROW(EvalScope::Single(T(), "Y02X"), Error);
  const std::vector<EvalScope> scopes = StandardScopes(T());
  ASSERT_EQ(scopes.size(), 1u + 4u + 9u);
  EXPECT_EQ(scopes[0].name, "whole");
  EXPECT_EQ(scopes[13].name, "Y02G20/20");
}

TEST(ScopeTest, DeepestLevelEqualsWhole) {
  std::mt19937_64 gen(8);
  std::vector<std::vector<double>> probs;
  std::vector<LabelVector> truth;
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < 30; ++i) {
    probs.emplace_back(9);
    for (double& v : probs.back()) v = unit(gen);
    truth.push_back(RandomBits(gen, true));
  }
  const EvalReport r = EvaluateScopes(
      T(), {EvalScope::Whole(T()), EvalScope::Level(T(), 4)}, probs, truth, 0.5);
  EXPECT_EQ(r.rows[0].micro.f1, r.rows[1].micro.f1);
  EXPECT_EQ(r.rows[0].macro.f1, r.rows[1].macro.f1);
  EXPECT_EQ(r.rows[0].auprc, r.rows[1].auprc);
  EXPECT_EQ(r.rows[0].accuracy, r.rows[1].accuracy);
}

TEST(AccuracyTest, Examples) {
  const std::vector<LabelVector> truth = {Labels({"Y02G10/22"}), Labels({"Y02G20/20"})};
  EXPECT_EQ(Accuracy(EvalScope::Whole(T()), truth, truth), 1.0);
  std::vector<LabelVector> half = truth;
  half[1].set(0, false);
  EXPECT_EQ(Accuracy(EvalScope::Single(T(), "Y02G"), half, truth), 0.5);
  // One wrong bit out of nine on every instance.
  std::vector<LabelVector> off = truth;
  off[0].set(8);
  off[1].set(8, false);
  EXPECT_EQ(Accuracy(EvalScope::Whole(T()), off, truth), 0.0);
  // Bits outside the scope are ignored.
  EXPECT_EQ(Accuracy(EvalScope::Single(T(), "Y02G"), off, truth), 1.0);
}

TEST(AveragePrecisionTest, Staircase) {
  const std::vector<double> scores = {0.9, 0.8, 0.7, 0.6};
  const std::vector<uint8_t> labels = {1, 0, 1, 0};
  EXPECT_NEAR(*AveragePrecision(scores, labels), (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
  EXPECT_NEAR(*AveragePrecision(scores, labels), 0.8333, 1e-4);
  EXPECT_EQ(*AveragePrecision(scores, std::vector<uint8_t>{1, 1, 0, 0}), 1.0);
  const std::vector<double> binary = {1, 0, 1, 0};
  EXPECT_EQ(*AveragePrecision(binary, labels), 1.0);
  EXPECT_FALSE(AveragePrecision(scores, std::vector<uint8_t>{0, 0, 0, 0}).has_value());
}

TEST(AveragePrecisionTest, TiesFormOneStep) {
  // One tie group holding one positive and one negative: precision 1/2 at
  // full recall, independent of the order within the group.
  EXPECT_DOUBLE_EQ(*AveragePrecision(std::vector<double>{0.5, 0.5}, std::vector<uint8_t>{1, 0}),
                   0.5);
  EXPECT_DOUBLE_EQ(*AveragePrecision(std::vector<double>{0.5, 0.5}, std::vector<uint8_t>{0, 1}),
                   0.5);
  // [0.9:1] then tie {0.4:1, 0.4:0, 0.4:0}: 1/2 * 1 + 1/2 * 2/4.
  EXPECT_DOUBLE_EQ(*AveragePrecision(std::vector<double>{0.4, 0.9, 0.4, 0.4},
                                     std::vector<uint8_t>{0, 1, 1, 0}),
                   0.75);
}

// AP from scratch: distinct thresholds, precision and recall of the
// prediction set {score >= t}.
double OracleAp(const std::vector<double>& s, const std::vector<uint8_t>& y) {
  std::set<double, std::greater<>> distinct(s.begin(), s.end());
  double positives = 0;
  for (uint8_t v : y) positives += v;
  double ap = 0, previous_recall = 0;
  for (double t : distinct) {
    double tp = 0, n = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) {
        ++n;
        tp += y[i];
      }
    }
    const double r = tp / positives;
    ap += (r - previous_recall) * (tp / n);
    previous_recall = r;
  }
  return ap;
}

TEST(AveragePrecisionTest, MatchesThresholdOracle) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + gen() % 25;
    std::vector<double> s(n);
    std::vector<uint8_t> y(n);
    bool any = false;
    for (size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % 6) / 5.0;  // frequent ties
      y[i] = gen() % 2;
      any |= y[i] != 0;
    }
    const auto ap = AveragePrecision(s, y);
    ASSERT_EQ(ap.has_value(), any);
    if (any) {
      EXPECT_NEAR(*ap, OracleAp(s, y), 1e-12);
    }
  }
}

TEST(AuprcTest, FlattensScopePairs) {
  const std::vector<std::vector<double>> probs = {
      {0.9, 0.1, 0, 0, 0, 0, 0.8, 0, 0}, {0.7, 0.6, 0, 0, 0, 0, 0.2, 0, 0}};
  const std::vector<LabelVector> truth = {Labels({"Y02G20/00"}), Labels({"Y02G"})};
  const EvalScope level2 = EvalScope::Level(T(), 2);
  // Pairs (score, label): .9:1 .1:0 .8:1 .7:1 .6:0 .2:0 -> perfect ranking.
  EXPECT_DOUBLE_EQ(*Auprc(level2, probs, truth), 1.0);
  EXPECT_FALSE(Auprc(EvalScope::Single(T(), "Y02G10/22"), probs, truth).has_value());
}

TEST(PrSweepTest, RecallNonIncreasingAndEmptyAboveMax) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> unit(0.0, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> probs;
    std::vector<LabelVector> truth;
    for (int i = 0; i < 15; ++i) {
      probs.emplace_back(9);
      for (double& v : probs.back()) v = unit(gen);
      truth.push_back(RandomBits(gen, true));
    }
    truth[0] = Labels({"Y02G10/24"});
    const std::vector<double> th = DefaultSweepThresholds();
    ASSERT_EQ(th.size(), 101u);
    EXPECT_EQ(th.front(), 0.0);
    EXPECT_EQ(th.back(), 1.0);
    for (const EvalScope& scope : StandardScopes(T())) {
      const std::vector<PrPoint> curve = PrSweep(T(), scope, probs, truth, th);
      ASSERT_EQ(curve.size(), th.size());
      for (size_t i = 1; i < curve.size(); ++i) {
        EXPECT_LE(curve[i].recall, curve[i - 1].recall + 1e-15) << scope.name;
      }
      EXPECT_EQ(curve.back().precision, 0.0);
      EXPECT_EQ(curve.back().recall, 0.0);
      double best = 0;
      for (const PrPoint& pt : curve) best = std::max(best, pt.recall);
      EXPECT_EQ(curve.front().recall, best);
    }
  }
}

TEST(BinarizeTest, ThresholdIsInclusive) {
  const auto b = Binarize({{0.5, 0.49, 1.0}}, 0.5);
  EXPECT_EQ(b[0], Bits({1, 0, 1}));
}

TEST(EvalReportTest, TextAndJsonCoverEveryScope) {
  const std::vector<std::vector<double>> probs = {{0.9, 0.8, 0.1, 0.7, 0.6, 0.2, 0.1, 0.1, 0.1},
                                                  {0.8, 0.1, 0.1, 0.1, 0.1, 0.1, 0.9, 0.7, 0.2}};
  const std::vector<LabelVector> truth = {Labels({"Y02G10/22"}), Labels({"Y02G20/10"})};
  EvalReport r = EvaluateScopes(T(), StandardScopes(T()), probs, truth, 0.5);
  r.model_name = "sbhnn";
  const std::string text = r.ToText();
  for (const EvalScope& s : StandardScopes(T())) {
    EXPECT_NE(text.find(s.name), std::string::npos) << s.name;
  }
  EXPECT_NE(text.find("macro-avg."), std::string::npos);
  EXPECT_NE(text.find("Accuracy"), std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(r.ToJson());
  ASSERT_TRUE(j.contains("rows"));
  EXPECT_EQ(j["rows"].size(), 14u);
  // Y02G10/10 has no positive: AUPRC is absent, not zero.
  for (const auto& row : j["rows"]) {
    if (row["scope"] == "Y02G10/10") {
      EXPECT_TRUE(row["auprc"].is_null());
    }
  }
  for (const ScopeReport& row : r.rows) {
    for (double v : {row.macro.precision, row.macro.recall, row.macro.f1, row.micro.precision,
                     row.micro.recall, row.micro.f1, row.accuracy}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(EvalReportTest, CurvesCsvHasOneRowPerScopeAndThreshold) {
  const std::vector<std::vector<double>> probs = {std::vector<double>(9, 0.6)};
  const std::vector<LabelVector> truth = {Labels({"Y02G20/20"})};
  const std::vector<EvalScope> scopes = {EvalScope::Whole(T()), EvalScope::Single(T(), "Y02G")};
  const std::string csv = PrCurvesCsv(T(), scopes, probs, truth);
  EXPECT_EQ(csv.rfind("scope,threshold,hP,hR\n", 0), 0u);
  EXPECT_EQ(static_cast<size_t>(std::count(csv.begin(), csv.end(), '\n')), 1u + 2u * 101u);
}

}  // namespace
}  // namespace patcls
