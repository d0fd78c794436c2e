#include "patcls/loss.h"

#include <cmath>

#include "patcls/error.h"
#include "patcls/nn.h"

namespace patcls {

LossConfig LossConfig::Uniform(size_t num_classes) {
  return {std::vector<double>(num_classes, 1.0),
          std::vector<double>(num_classes, 1.0)};
}

LossConfig LossConfig::GreenPlasticsDefault() {
  return {{4, 3, 2, 2, 1, 1, 3, 2, 2}, std::vector<double>(9, 2.0)};
}

void LossConfig::Validate(size_t num_classes) const {
  if (beta.size() != num_classes || gamma.size() != num_classes) {
    throw ConfigError("loss.beta and loss.gamma need " +
                      std::to_string(num_classes) + " entries, got " +
                      std::to_string(beta.size()) + " and " +
                      std::to_string(gamma.size()));
  }
  for (size_t i = 0; i < num_classes; ++i) {
    if (!(beta[i] > 0.0) || !(gamma[i] > 0.0) || !std::isfinite(beta[i]) ||
        !std::isfinite(gamma[i])) {
      throw ConfigError("loss weights must be positive and finite");
    }
  }
}

namespace {

double ClampedLog(double v) { return std::log(v > kLogClamp ? v : kLogClamp); }

}  // namespace

double BceLoss(std::span<const double> y, const LabelVector& labels,
               const LossConfig& config) {
  double loss = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw NumericError("non-finite probability in loss");
    const double l = labels.test(i) ? 1.0 : 0.0;
    loss -= config.beta[i] *
            (config.gamma[i] * l * ClampedLog(y[i]) + (1.0 - l) * ClampedLog(1.0 - y[i]));
  }
  return loss;
}

double BceLossFromLogits(std::span<const double> logits, const LabelVector& labels,
                         const LossConfig& config, std::span<double> dlogits) {
  double loss = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) throw NumericError("non-finite logit in loss");
    const double y = Sigmoid(logits[i]);
    const double one_minus_y = Sigmoid(-logits[i]);
    if (labels.test(i)) {
      loss -= config.beta[i] * config.gamma[i] * ClampedLog(y);
      // d log(y)/dz = 1 - y; zero once the clamp is active.
      dlogits[i] = y > kLogClamp ? -config.beta[i] * config.gamma[i] * one_minus_y : 0.0;
    } else {
      loss -= config.beta[i] * ClampedLog(one_minus_y);
      dlogits[i] = one_minus_y > kLogClamp ? config.beta[i] * y : 0.0;
    }
  }
  return loss;
}

}  // namespace patcls
