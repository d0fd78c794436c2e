#include "patcls/train.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "patcls/error.h"
#include "patcls/io.h"

namespace patcls {

ExternalEmbeddings ExternalEmbeddings::Parse(std::string_view text,
                                             size_t expected_dim,
                                             const std::string& source) {
  ExternalEmbeddings out;
  out.dim_ = expected_dim;
  size_t pos = 0;
  size_t line_number = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = source + ":" + std::to_string(line_number);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw DataError(where + ": invalid JSON");
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("vector") || !j["vector"].is_array()) {
      throw DataError(where + ": expected {\"id\": string, \"vector\": [...]}");
    }
    std::string id = j["id"].get<std::string>();
    std::vector<double> vec;
    for (const auto& v : j["vector"]) {
      if (!v.is_number()) throw DataError(where + ": non-numeric vector entry");
      vec.push_back(v.get<double>());
    }
    if (out.dim_ == 0) out.dim_ = vec.size();
    if (vec.size() != out.dim_ || vec.empty()) {
      throw DataError(where + ": vector for '" + id + "' has dimension " +
                      std::to_string(vec.size()) + ", expected " +
                      std::to_string(out.dim_));
    }
    if (!out.vectors_.emplace(id, std::move(vec)).second) {
      throw DataError(where + ": duplicate id '" + id + "'");
    }
  }
  if (out.vectors_.empty()) throw DataError(source + ": no embedding vectors");
  return out;
}

ExternalEmbeddings ExternalEmbeddings::Load(const std::filesystem::path& path,
                                            size_t expected_dim) {
  return Parse(ReadTextFile(path), expected_dim, path.string());
}

std::span<const double> ExternalEmbeddings::Lookup(const std::string& id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) {
    throw DataError("no external embedding for document '" + id + "'");
  }
  return it->second;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (batch_size == 0) throw ConfigError("train.batch_size must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ConfigError("train.dropout must lie in [0, 1)");
  }
  if (max_epochs == 0) throw ConfigError("train.max_epochs must be >= 1");
}

Model InitModel(const Architecture& arch, const std::vector<LabeledExample>& train,
                size_t vocab_size, uint64_t seed) {
  Vocabulary vocab;
  if (arch.features == FeatureKind::kToyEncoder) {
    std::vector<Tokens> docs;
    docs.reserve(train.size());
    for (const auto& ex : train) docs.push_back(ex.text_tokens);
    vocab = Vocabulary::Build(docs, vocab_size);
  }
  return Model::Create(arch, std::move(vocab), seed);
}

Activations ForwardExample(const Model& model, const LabeledExample& example,
                           const FeatureProvider* features, const Dropout& dropout) {
  if (model.architecture().features == FeatureKind::kExternal) {
    if (features == nullptr) {
      throw ConfigError("model expects external features but none were provided");
    }
    return model.ForwardFeatures(features->Lookup(example.id), dropout);
  }
  const std::vector<int> ids = model.EncodeTokens(example.text_tokens);
  return model.ForwardIds(ids, dropout);
}

std::vector<std::vector<double>> PredictProbabilities(
    const Model& model, const std::vector<LabeledExample>& examples,
    const FeatureProvider* features) {
  std::vector<std::vector<double>> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back(ForwardExample(model, ex, features).probabilities);
  }
  return out;
}

double MeanLoss(const Model& model, const std::vector<LabeledExample>& examples,
                const LossConfig& loss, const FeatureProvider* features) {
  if (examples.empty()) return 0.0;
  std::vector<double> dlogits(model.num_classes());
  double total = 0.0;
  for (const auto& ex : examples) {
    const Activations act = ForwardExample(model, ex, features);
    total += BceLossFromLogits(act.logits, ex.label, loss, dlogits);
  }
  return total / static_cast<double>(examples.size());
}

double SubsetError(const std::vector<std::vector<double>>& probabilities,
                   const std::vector<LabeledExample>& examples, double threshold) {
  if (examples.empty()) return 0.0;
  size_t wrong = 0;
  for (size_t i = 0; i < examples.size(); ++i) {
    for (size_t c = 0; c < probabilities[i].size(); ++c) {
      if ((probabilities[i][c] >= threshold) != examples[i].label.test(c)) {
        ++wrong;
        break;
      }
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(examples.size());
}

double BatchGradient(const Model& model, std::span<const LabeledExample* const> batch,
                     const LossConfig& loss, const FeatureProvider* features,
                     const Dropout& dropout, ModelParams& grads) {
  const double scale = 1.0 / static_cast<double>(batch.size());
  std::vector<double> dlogits(model.num_classes());
  double total = 0.0;
  for (const LabeledExample* ex : batch) {
    const Activations act = ForwardExample(model, *ex, features, dropout);
    total += BceLossFromLogits(act.logits, ex->label, loss, dlogits);
    for (double& g : dlogits) g *= scale;
    model.Backward(act, dlogits, grads);
  }
  return total * scale;
}

TrainResult Train(Model model, const std::vector<LabeledExample>& train,
                  const std::vector<LabeledExample>& validation,
                  const TrainConfig& config, const LossConfig& loss,
                  const FeatureProvider* features) {
  config.Validate();
  loss.Validate(model.num_classes());
  if (train.empty() || validation.empty()) {
    throw DataError("training needs non-empty train and validation splits");
  }
  Rng rng(config.seed);
  AdamOptimizer optimizer(model.params(), config.adam);
  ModelParams grads = model.params().ZerosLike();
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<const LabeledExample*> batch;
  const Dropout dropout{config.dropout_rate, &rng};

  TrainResult result;
  result.model = model;
  double best_val = std::numeric_limits<double>::infinity();
  size_t bad_epochs = 0;
  for (size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t stop = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (size_t i = start; i < stop; ++i) batch.push_back(&train[order[i]]);
      grads.SetZero();
      BatchGradient(model, batch, loss, features, dropout, grads);
      optimizer.Step(model.mutable_params(), grads, config.learning_rate);
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = MeanLoss(model, train, loss, features);
    entry.val_loss = MeanLoss(model, validation, loss, features);
    entry.train_error =
        SubsetError(PredictProbabilities(model, train, features), train, config.threshold);
    entry.val_error = SubsetError(PredictProbabilities(model, validation, features),
                                  validation, config.threshold);
    result.log.push_back(entry);
    if (!std::isfinite(entry.val_loss) || !std::isfinite(entry.train_loss)) {
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                         " (validation loss is not finite)");
    }
    if (entry.val_loss < best_val) {
      best_val = entry.val_loss;
      result.model = model;
      result.best_epoch = epoch;
      bad_epochs = 0;
    } else if (++bad_epochs > config.patience) {
      break;
    }
  }
  return result;
}

std::string EpochLogCsv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_loss,train_err,val_err\n";
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss,
                  e.val_loss, e.train_error, e.val_error);
    out += buf;
  }
  return out;
}

}  // namespace patcls
