#include "patcls/nn.h"

namespace patcls {

void DenseLayer::Forward(std::span<const double> x, std::span<double> out) const {
  const size_t in = in_dim();
  for (size_t r = 0; r < out_dim(); ++r) {
    const double* w = weight.row(r).data();
    double acc = bias[r];
    for (size_t c = 0; c < in; ++c) acc += w[c] * x[c];
    out[r] = acc;
  }
}

void DenseLayer::Backward(std::span<const double> x, std::span<const double> dy,
                          DenseLayer& grad, std::span<double> dx) const {
  const size_t in = in_dim();
  for (size_t r = 0; r < out_dim(); ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    grad.bias[r] += g;
    double* gw = grad.weight.row(r).data();
    for (size_t c = 0; c < in; ++c) gw[c] += g * x[c];
    if (!dx.empty()) {
      const double* w = weight.row(r).data();
      for (size_t c = 0; c < in; ++c) dx[c] += g * w[c];
    }
  }
}

void DenseLayer::InitUniform(Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
  for (double& w : weight.values()) w = rng.Uniform(-s, s);
  for (double& b : bias) b = 0.0;
}

}  // namespace patcls
