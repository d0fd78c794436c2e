#include "patcls/adam.h"

#include <cmath>

#include "patcls/error.h"

namespace patcls {

void AdamUpdate(std::span<double> params, std::span<const double> grads,
                std::span<double> first_moment, std::span<double> second_moment,
                size_t step, double learning_rate, const AdamConfig& config) {
  const double t = static_cast<double>(step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    first_moment[i] = config.beta1 * first_moment[i] + (1.0 - config.beta1) * g;
    second_moment[i] = config.beta2 * second_moment[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = first_moment[i] / correction1;
    const double v_hat = second_moment[i] / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

AdamOptimizer::AdamOptimizer(const ModelParams& shape, AdamConfig config)
    : config_(config) {
  for (const auto& group : shape.Groups()) {
    first_.emplace_back(group.values.size(), 0.0);
    second_.emplace_back(group.values.size(), 0.0);
  }
}

void AdamOptimizer::Step(ModelParams& params, const ModelParams& grads,
                         double learning_rate) {
  auto param_groups = params.Groups();
  const auto grad_groups = grads.Groups();
  if (param_groups.size() != first_.size() || grad_groups.size() != first_.size()) {
    throw ConfigError("optimizer state does not match the model's parameters");
  }
  for (const auto& group : grad_groups) {
    for (double g : group.values) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in parameter group '" +
                           group.name + "'");
      }
    }
  }
  ++step_;
  for (size_t i = 0; i < param_groups.size(); ++i) {
    AdamUpdate(param_groups[i].values, grad_groups[i].values, first_[i], second_[i],
               step_, learning_rate, config_);
  }
}

}  // namespace patcls
