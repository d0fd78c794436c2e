#ifndef PATCLS_ATTRIBUTION_H_
#define PATCLS_ATTRIBUTION_H_

#include <string>
#include <string_view>
#include <vector>

#include "patcls/corpus.h"
#include "patcls/model.h"

namespace patcls {

enum class AttributionTarget { kProbability, kLogit };

AttributionTarget ParseAttributionTarget(std::string_view name);
const char* AttributionTargetName(AttributionTarget target);

struct AttributionConfig {
  size_t steps = 128;  // Riemann steps m
  std::string target_class = "Y02G";
  AttributionTarget target = AttributionTarget::kProbability;
};

struct TokenAttribution {
  std::string token;
  double score = 0.0;  // IG vector summed over embedding dimensions
  size_t position = 0;
};

struct CompletenessReport {
  double attribution_sum = 0.0;
  double output_at_input = 0.0;     // F(x)
  double output_at_baseline = 0.0;  // F(x'), all-zero embeddings
  double output_difference = 0.0;
  double relative_gap = 0.0;  // |sum - diff| / |diff|, or |sum| when diff = 0
};

struct AttributionResult {
  std::string target_class;
  AttributionTarget target = AttributionTarget::kProbability;
  std::vector<TokenAttribution> tokens;
  CompletenessReport completeness;
  std::vector<std::string> class_codes;
  std::vector<double> probabilities;
  std::vector<std::string> assigned;
};

// Integrated gradients from the zero-embedding baseline with a
// right-endpoint Riemann sum:
//   IG_t = x_t * (1/m) * sum_{j=1..m} dF/dx_t (j/m * x)
// Dropout is never applied. Throws ConfigError for external-feature models,
// unknown classes or m == 0.
AttributionResult IntegratedGradients(const Model& model, std::span<const std::string> tokens,
                                      const AttributionConfig& config,
                                      double threshold = 0.5);

enum class RenderFormat { kHtml, kAnsi };

// Positive scores render green, negative red, zero neutral; colour
// intensity is |score| / max |score|. Throws DataError on an empty list.
std::string RenderReport(const AttributionResult& result, RenderFormat format,
                         const std::string& document_id = "");

// Columns position,token,score.
std::string AttributionCsv(const AttributionResult& result);

}  // namespace patcls

#endif  // PATCLS_ATTRIBUTION_H_
