#ifndef PATCLS_ADAM_H_
#define PATCLS_ADAM_H_

#include <cstddef>
#include <span>
#include <vector>

#include "patcls/model.h"

namespace patcls {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update of a flat parameter array; `step` is the
// 1-based update count.
void AdamUpdate(std::span<double> params, std::span<const double> grads,
                std::span<double> first_moment, std::span<double> second_moment,
                size_t step, double learning_rate, const AdamConfig& config);

// Moment state for every parameter group of a model.
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& shape, AdamConfig config);

  // Throws NumericError naming the group if any gradient is non-finite.
  void Step(ModelParams& params, const ModelParams& grads, double learning_rate);
  size_t step_count() const { return step_; }

 private:
  AdamConfig config_;
  size_t step_ = 0;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
};

}  // namespace patcls

#endif  // PATCLS_ADAM_H_
