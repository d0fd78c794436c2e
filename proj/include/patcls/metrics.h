#ifndef PATCLS_METRICS_H_
#define PATCLS_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patcls/taxonomy.h"

namespace patcls {

enum class ScopeKind { kWhole, kLevel, kSingle };

// The classes a score is computed over. Level scopes are cumulative: level
// l covers every class at depth <= l, so the deepest level equals the whole
// hierarchy.
struct EvalScope {
  ScopeKind kind = ScopeKind::kWhole;
  int level = 0;
  std::vector<size_t> classes;  // sorted taxonomy indices, non-empty
  std::string name;             // "whole", "level 2", "Y02G10/20"

  static EvalScope Whole(const Taxonomy& taxonomy);
  static EvalScope Level(const Taxonomy& taxonomy, int level);
  static EvalScope Single(const Taxonomy& taxonomy, const std::string& code);
};

// Whole hierarchy, every level, then every class.
std::vector<EvalScope> StandardScopes(const Taxonomy& taxonomy);

// Y_i and L_i: predicted (resp. true) classes inside the scope extended with
// all of their ancestors, which may lie outside the scope.
struct InstanceSets {
  std::vector<size_t> predicted;
  std::vector<size_t> truth;
};

InstanceSets MakeInstanceSets(const Taxonomy& taxonomy, const EvalScope& scope,
                              const LabelVector& predicted, const LabelVector& truth);

struct HierScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class Averaging { kMicro, kMacro };

// micro: hP = sum|Y n L| / sum|Y|, hR = sum|Y n L| / sum|L|.
// macro: unweighted mean of the per-class (single scope) micro scores.
// Zero denominators score 0. Throws DataError on empty or ragged input.
HierScores HierarchicalScores(const Taxonomy& taxonomy, const EvalScope& scope,
                              std::span<const LabelVector> predictions,
                              std::span<const LabelVector> truths, Averaging averaging);

// Exact match over the scope's classes.
double Accuracy(const EvalScope& scope, std::span<const LabelVector> predictions,
                std::span<const LabelVector> truths);

// Step-wise average precision sum_k (R_k - R_{k-1}) P_k, one step per
// distinct score. nullopt when there is no positive label.
std::optional<double> AveragePrecision(std::span<const double> scores,
                                       std::span<const uint8_t> labels);

// Average precision over all (instance, class in scope) pairs, no
// hierarchical expansion.
std::optional<double> Auprc(const EvalScope& scope,
                            const std::vector<std::vector<double>>& probabilities,
                            std::span<const LabelVector> truths);

std::vector<LabelVector> Binarize(const std::vector<std::vector<double>>& probabilities,
                                  double threshold);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// Thresholds 0.00, 0.01, ..., 1.00.
std::vector<double> DefaultSweepThresholds();

// Micro hierarchical precision/recall at each threshold.
std::vector<PrPoint> PrSweep(const Taxonomy& taxonomy, const EvalScope& scope,
                             const std::vector<std::vector<double>>& probabilities,
                             std::span<const LabelVector> truths,
                             std::span<const double> thresholds);

struct ScopeReport {
  EvalScope scope;
  HierScores macro;
  HierScores micro;
  std::optional<double> auprc;
  double accuracy = 0.0;
};

struct EvalReport {
  std::string model_name;
  double threshold = 0.5;
  std::vector<ScopeReport> rows;

  // Fixed-width table: Scope | macro hP hR hF1 | micro hP hR hF1 | AUPRC |
  // Accuracy, four decimals.
  std::string ToText() const;
  std::string ToJson() const;
};

EvalReport EvaluateScopes(const Taxonomy& taxonomy, const std::vector<EvalScope>& scopes,
                          const std::vector<std::vector<double>>& probabilities,
                          std::span<const LabelVector> truths, double threshold);

// Columns scope,threshold,hP,hR for every scope.
std::string PrCurvesCsv(const Taxonomy& taxonomy, const std::vector<EvalScope>& scopes,
                        const std::vector<std::vector<double>>& probabilities,
                        std::span<const LabelVector> truths);

}  // namespace patcls

#endif  // PATCLS_METRICS_H_
