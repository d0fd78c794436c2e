#ifndef PATCLS_NN_H_
#define PATCLS_NN_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "patcls/rng.h"

namespace patcls {

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double& at(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double at(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

inline double Relu(double z) { return z > 0.0 ? z : 0.0; }

// Branch form keeps exp() from overflowing for large |z|.
inline double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Fully connected map t = W x + b; the activation is applied by the caller.
struct DenseLayer {
  Matrix weight;  // out x in
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(size_t in, size_t out) : weight(out, in), bias(out, 0.0) {}

  size_t in_dim() const { return weight.cols(); }
  size_t out_dim() const { return weight.rows(); }

  void Forward(std::span<const double> x, std::span<double> out) const;
  // Accumulates dW += dy x^T, db += dy into `grad`; adds W^T dy to dx when
  // dx is non-empty.
  void Backward(std::span<const double> x, std::span<const double> dy,
                DenseLayer& grad, std::span<double> dx) const;

  // Weights uniform in (-s, s) with s = sqrt(6 / (in + out)); zero bias.
  void InitUniform(Rng& rng);
};

}  // namespace patcls

#endif  // PATCLS_NN_H_
