#include "patcls/metrics.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "patcls/error.h"
#include "patcls/io.h"

namespace patcls {

EvalScope EvalScope::Whole(const Taxonomy& taxonomy) {
  EvalScope s;
  s.kind = ScopeKind::kWhole;
  s.level = taxonomy.max_level();
  s.classes.resize(taxonomy.size());
  std::iota(s.classes.begin(), s.classes.end(), size_t{0});
  s.name = "whole";
  return s;
}

EvalScope EvalScope::Level(const Taxonomy& taxonomy, int level) {
  if (level < 1 || level > taxonomy.max_level()) {
    throw ConfigError("level " + std::to_string(level) + " outside 1.." +
                      std::to_string(taxonomy.max_level()));
  }
  EvalScope s;
  s.kind = ScopeKind::kLevel;
  s.level = level;
  for (size_t i = 0; i < taxonomy.size(); ++i) {
    if (taxonomy.node(i).level <= level) s.classes.push_back(i);
  }
  s.name = "level " + std::to_string(level);
  return s;
}

EvalScope EvalScope::Single(const Taxonomy& taxonomy, const std::string& code) {
  EvalScope s;
  s.kind = ScopeKind::kSingle;
  const size_t index = taxonomy.IndexOf(code);
  s.level = taxonomy.node(index).level;
  s.classes = {index};
  s.name = code;
  return s;
}

std::vector<EvalScope> StandardScopes(const Taxonomy& taxonomy) {
  std::vector<EvalScope> out = {EvalScope::Whole(taxonomy)};
  for (int l = 1; l <= taxonomy.max_level(); ++l) {
    out.push_back(EvalScope::Level(taxonomy, l));
  }
  for (const auto& node : taxonomy.nodes()) {
    out.push_back(EvalScope::Single(taxonomy, node.code));
  }
  return out;
}

namespace {

std::vector<size_t> ExtendedSet(const Taxonomy& taxonomy, const EvalScope& scope,
                                const LabelVector& bits) {
  std::vector<uint8_t> member(taxonomy.size(), 0);
  for (size_t c : scope.classes) {
    if (!bits.test(c)) continue;
    member[c] = 1;
    for (size_t a : taxonomy.AncestorIndices(c)) member[a] = 1;
  }
  std::vector<size_t> out;
  for (size_t i = 0; i < member.size(); ++i) {
    if (member[i]) out.push_back(i);
  }
  return out;
}

void CheckShapes(size_t num_classes, std::span<const LabelVector> predictions,
                 std::span<const LabelVector> truths) {
  if (predictions.empty()) throw DataError("no instances to score");
  if (predictions.size() != truths.size()) {
    throw DataError("prediction and truth lists differ in length");
  }
  for (size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != num_classes || truths[i].size() != num_classes) {
      throw DataError("label vector of instance " + std::to_string(i) +
                      " has the wrong length");
    }
  }
}

double Ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double Harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

HierScores MicroScores(const Taxonomy& taxonomy, const EvalScope& scope,
                       std::span<const LabelVector> predictions,
                       std::span<const LabelVector> truths) {
  double overlap = 0.0, predicted = 0.0, actual = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const InstanceSets sets =
        MakeInstanceSets(taxonomy, scope, predictions[i], truths[i]);
    std::vector<size_t> both;
    std::set_intersection(sets.predicted.begin(), sets.predicted.end(),
                          sets.truth.begin(), sets.truth.end(), std::back_inserter(both));
    overlap += static_cast<double>(both.size());
    predicted += static_cast<double>(sets.predicted.size());
    actual += static_cast<double>(sets.truth.size());
  }
  HierScores s;
  s.precision = Ratio(overlap, predicted);
  s.recall = Ratio(overlap, actual);
  s.f1 = Harmonic(s.precision, s.recall);
  return s;
}

}  // namespace

InstanceSets MakeInstanceSets(const Taxonomy& taxonomy, const EvalScope& scope,
                              const LabelVector& predicted, const LabelVector& truth) {
  return {ExtendedSet(taxonomy, scope, predicted), ExtendedSet(taxonomy, scope, truth)};
}

HierScores HierarchicalScores(const Taxonomy& taxonomy, const EvalScope& scope,
                              std::span<const LabelVector> predictions,
                              std::span<const LabelVector> truths, Averaging averaging) {
  CheckShapes(taxonomy.size(), predictions, truths);
  if (averaging == Averaging::kMicro) {
    return MicroScores(taxonomy, scope, predictions, truths);
  }
  HierScores mean;
  for (size_t c : scope.classes) {
    const HierScores s = MicroScores(
        taxonomy, EvalScope::Single(taxonomy, taxonomy.node(c).code), predictions, truths);
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
  }
  const double n = static_cast<double>(scope.classes.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

double Accuracy(const EvalScope& scope, std::span<const LabelVector> predictions,
                std::span<const LabelVector> truths) {
  if (predictions.empty()) throw DataError("no instances to score");
  if (predictions.size() != truths.size()) {
    throw DataError("prediction and truth lists differ in length");
  }
  size_t exact = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    bool same = true;
    for (size_t c : scope.classes) {
      if (predictions[i].test(c) != truths[i].test(c)) {
        same = false;
        break;
      }
    }
    if (same) ++exact;
  }
  return static_cast<double>(exact) / static_cast<double>(predictions.size());
}

std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const uint8_t> labels) {
  const size_t positives =
      static_cast<size_t>(std::count_if(labels.begin(), labels.end(),
                                        [](uint8_t l) { return l != 0; }));
  if (positives == 0) return std::nullopt;
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  double previous_recall = 0.0;
  size_t tp = 0;
  size_t seen = 0;
  size_t i = 0;
  while (i < order.size()) {
    // A run of equal scores is one threshold.
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      if (labels[order[i]]) ++tp;
      ++seen;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - previous_recall) * precision;
    previous_recall = recall;
  }
  return ap;
}

std::optional<double> Auprc(const EvalScope& scope,
                            const std::vector<std::vector<double>>& probabilities,
                            std::span<const LabelVector> truths) {
  if (probabilities.size() != truths.size()) {
    throw DataError("score and truth lists differ in length");
  }
  std::vector<double> scores;
  std::vector<uint8_t> labels;
  for (size_t i = 0; i < truths.size(); ++i) {
    for (size_t c : scope.classes) {
      scores.push_back(probabilities[i][c]);
      labels.push_back(truths[i].test(c) ? 1 : 0);
    }
  }
  return AveragePrecision(scores, labels);
}

std::vector<LabelVector> Binarize(const std::vector<std::vector<double>>& probabilities,
                                  double threshold) {
  std::vector<LabelVector> out;
  out.reserve(probabilities.size());
  for (const auto& row : probabilities) {
    LabelVector bits(row.size());
    for (size_t c = 0; c < row.size(); ++c) bits.set(c, row[c] >= threshold);
    out.push_back(std::move(bits));
  }
  return out;
}

std::vector<double> DefaultSweepThresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 100; ++i) out.push_back(i / 100.0);
  return out;
}

std::vector<PrPoint> PrSweep(const Taxonomy& taxonomy, const EvalScope& scope,
                             const std::vector<std::vector<double>>& probabilities,
                             std::span<const LabelVector> truths,
                             std::span<const double> thresholds) {
  std::vector<PrPoint> out;
  for (double t : thresholds) {
    const std::vector<LabelVector> predicted = Binarize(probabilities, t);
    const HierScores s =
        HierarchicalScores(taxonomy, scope, predicted, truths, Averaging::kMicro);
    out.push_back({t, s.precision, s.recall});
  }
  return out;
}

EvalReport EvaluateScopes(const Taxonomy& taxonomy, const std::vector<EvalScope>& scopes,
                          const std::vector<std::vector<double>>& probabilities,
                          std::span<const LabelVector> truths, double threshold) {
  EvalReport report;
  report.threshold = threshold;
  const std::vector<LabelVector> predicted = Binarize(probabilities, threshold);
  for (const auto& scope : scopes) {
    ScopeReport row;
    row.scope = scope;
    row.macro = HierarchicalScores(taxonomy, scope, predicted, truths, Averaging::kMacro);
    row.micro = HierarchicalScores(taxonomy, scope, predicted, truths, Averaging::kMicro);
    row.auprc = Auprc(scope, probabilities, truths);
    row.accuracy = Accuracy(scope, predicted, truths);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string EvalReport::ToText() const {
  size_t width = 5;
  for (const auto& row : rows) width = std::max(width, row.scope.name.size());
  auto pad = [&](const std::string& s) {
    return s + std::string(width - std::min(width, s.size()), ' ');
  };
  std::string out;
  if (!model_name.empty()) out += "Model: " + model_name + "\n";
  out += "Decision threshold: " + FormatFixed(threshold, 2) + "\n\n";
  const std::string rule =
      std::string(width, '-') + "-+----------------------+----------------------+--------+---------\n";
  out += pad("") + " |      macro-avg.      |      micro-avg.      |        |\n";
  out += pad("Scope") + " |     hP     hR    hF1 |     hP     hR    hF1 |  AUPRC | Accuracy\n";
  out += rule;
  ScopeKind previous = rows.empty() ? ScopeKind::kWhole : rows.front().scope.kind;
  for (const auto& row : rows) {
    if (row.scope.kind != previous) {
      out += rule;
      previous = row.scope.kind;
    }
    out += pad(row.scope.name) + " | " + FormatFixed(row.macro.precision, 4) + " " +
           FormatFixed(row.macro.recall, 4) + " " + FormatFixed(row.macro.f1, 4) + " | " +
           FormatFixed(row.micro.precision, 4) + " " + FormatFixed(row.micro.recall, 4) +
           " " + FormatFixed(row.micro.f1, 4) + " | " +
           (row.auprc ? FormatFixed(*row.auprc, 4) : std::string("   n/a")) + " | " +
           FormatFixed(row.accuracy, 4) + "\n";
  }
  return out;
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["model"] = model_name;
  j["threshold"] = threshold;
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    r["scope"] = row.scope.name;
    r["kind"] = row.scope.kind == ScopeKind::kWhole   ? "whole"
                : row.scope.kind == ScopeKind::kLevel ? "level"
                                                      : "class";
    r["macro"] = {{"hP", row.macro.precision}, {"hR", row.macro.recall}, {"hF1", row.macro.f1}};
    r["micro"] = {{"hP", row.micro.precision}, {"hR", row.micro.recall}, {"hF1", row.micro.f1}};
    r["auprc"] = row.auprc ? nlohmann::ordered_json(*row.auprc) : nlohmann::ordered_json();
    r["accuracy"] = row.accuracy;
    rows_json.push_back(std::move(r));
  }
  j["rows"] = std::move(rows_json);
  return j.dump(2) + "\n";
}

std::string PrCurvesCsv(const Taxonomy& taxonomy, const std::vector<EvalScope>& scopes,
                        const std::vector<std::vector<double>>& probabilities,
                        std::span<const LabelVector> truths) {
  std::string out = "scope,threshold,hP,hR\n";
  const std::vector<double> thresholds = DefaultSweepThresholds();
  for (const auto& scope : scopes) {
    for (const auto& p : PrSweep(taxonomy, scope, probabilities, truths, thresholds)) {
      out += scope.name + "," + FormatFixed(p.threshold, 2) + "," +
             FormatFixed(p.precision, 6) + "," + FormatFixed(p.recall, 6) + "\n";
    }
  }
  return out;
}

}  // namespace patcls
