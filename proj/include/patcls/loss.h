#ifndef PATCLS_LOSS_H_
#define PATCLS_LOSS_H_

#include <span>
#include <vector>

#include "patcls/taxonomy.h"

namespace patcls {

// Weighted binary cross-entropy
//   L = -sum_i beta_i * (gamma_i * l_i * log y_i + (1 - l_i) * log(1 - y_i))
// with every log argument clamped below at kLogClamp.
struct LossConfig {
  std::vector<double> beta;   // class importance
  std::vector<double> gamma;  // positive-sample weight

  static LossConfig Uniform(size_t num_classes);
  // beta = [4, 3, 2, 2, 1, 1, 3, 2, 2], gamma = 2 everywhere.
  static LossConfig GreenPlasticsDefault();

  // Throws ConfigError unless both lengths equal num_classes and all
  // weights are positive and finite.
  void Validate(size_t num_classes) const;
};

inline constexpr double kLogClamp = 1e-12;

// Throws NumericError on non-finite probabilities.
double BceLoss(std::span<const double> y, const LabelVector& labels,
               const LossConfig& config);

// Same loss evaluated from logits; writes dL/dlogit into `dlogits` (which
// must have one slot per class). Throws NumericError on non-finite logits.
double BceLossFromLogits(std::span<const double> logits, const LabelVector& labels,
                         const LossConfig& config, std::span<double> dlogits);

}  // namespace patcls

#endif  // PATCLS_LOSS_H_
