#ifndef PATCLS_TRAIN_H_
#define PATCLS_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "patcls/adam.h"
#include "patcls/loss.h"
#include "patcls/model.h"
#include "patcls/weaklabel.h"

namespace patcls {

// Source of precomputed feature vectors h, keyed by document id.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual size_t dim() const = 0;
  // Throws DataError naming the id when it is not present.
  virtual std::span<const double> Lookup(const std::string& id) const = 0;
};

// JSON Lines file, one {"id": string, "vector": [numbers]} object per line.
class ExternalEmbeddings : public FeatureProvider {
 public:
  // expected_dim == 0 accepts whatever dimension the first row has.
  static ExternalEmbeddings Load(const std::filesystem::path& path,
                                 size_t expected_dim = 0);
  static ExternalEmbeddings Parse(std::string_view text, size_t expected_dim = 0,
                                  const std::string& source = "embeddings");

  size_t dim() const override { return dim_; }
  size_t size() const { return vectors_.size(); }
  std::span<const double> Lookup(const std::string& id) const override;

 private:
  size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

struct TrainConfig {
  double learning_rate = 2e-6;
  size_t batch_size = 96;
  double dropout_rate = 0.5;
  AdamConfig adam;
  size_t max_epochs = 20;
  // Training stops once validation loss has failed to improve on
  // `patience` + 1 consecutive epochs.
  size_t patience = 2;
  uint64_t seed = 7;
  double threshold = 0.5;  // for the logged subset error

  void Validate() const;
};

struct EpochLog {
  size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_error = 0.0;  // 1 - subset accuracy
  double val_error = 0.0;
};

struct TrainResult {
  Model model;  // parameters from the epoch with the lowest validation loss
  std::vector<EpochLog> log;
  size_t best_epoch = 0;
};

// Builds the vocabulary from the training split and initialises weights.
Model InitModel(const Architecture& arch, const std::vector<LabeledExample>& train,
                size_t vocab_size, uint64_t seed);

Activations ForwardExample(const Model& model, const LabeledExample& example,
                           const FeatureProvider* features, const Dropout& dropout = {});

std::vector<std::vector<double>> PredictProbabilities(
    const Model& model, const std::vector<LabeledExample>& examples,
    const FeatureProvider* features = nullptr);

double MeanLoss(const Model& model, const std::vector<LabeledExample>& examples,
                const LossConfig& loss, const FeatureProvider* features = nullptr);

// Fraction of examples whose thresholded prediction differs from the label
// on at least one class.
double SubsetError(const std::vector<std::vector<double>>& probabilities,
                   const std::vector<LabeledExample>& examples, double threshold);

// Mean loss over a mini-batch and its parameter gradient.
double BatchGradient(const Model& model, std::span<const LabeledExample* const> batch,
                     const LossConfig& loss, const FeatureProvider* features,
                     const Dropout& dropout, ModelParams& grads);

// Mini-batch Adam with per-epoch shuffling, inverted dropout on h and early
// stopping on validation loss. Throws NumericError on divergence.
TrainResult Train(Model model, const std::vector<LabeledExample>& train,
                  const std::vector<LabeledExample>& validation,
                  const TrainConfig& config, const LossConfig& loss,
                  const FeatureProvider* features = nullptr);

// Columns: epoch,train_loss,val_loss,train_err,val_err.
std::string EpochLogCsv(const std::vector<EpochLog>& log);

}  // namespace patcls

#endif  // PATCLS_TRAIN_H_
