#include "patcls/model.h"

#include <algorithm>
#include <map>

#include "patcls/error.h"

namespace patcls {

ModelKind ParseModelKind(std::string_view name) {
  if (name == "sbnn") return ModelKind::kSbnn;
  if (name == "sbhnn") return ModelKind::kSbhnn;
  throw ConfigError("unknown model kind '" + std::string(name) +
                    "' (expected sbnn or sbhnn)");
}

const char* ModelKindName(ModelKind kind) {
  return kind == ModelKind::kSbnn ? "sbnn" : "sbhnn";
}

HierarchyWiring ParseWiring(std::string_view name) {
  if (name == "cumulative") return HierarchyWiring::kCumulative;
  if (name == "parent_head") return HierarchyWiring::kParentHead;
  throw ConfigError("unknown hierarchy wiring '" + std::string(name) +
                    "' (expected cumulative or parent_head)");
}

const char* WiringName(HierarchyWiring wiring) {
  return wiring == HierarchyWiring::kCumulative ? "cumulative" : "parent_head";
}

FeatureKind ParseFeatureKind(std::string_view name) {
  if (name == "toy") return FeatureKind::kToyEncoder;
  if (name == "external") return FeatureKind::kExternal;
  throw ConfigError("unknown feature source '" + std::string(name) +
                    "' (expected toy or external)");
}

const char* FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kToyEncoder ? "toy" : "external";
}

void Architecture::SetClasses(const Taxonomy& taxonomy) {
  class_codes = taxonomy.codes();
  parents = taxonomy.parent_indices();
}

void ValidateArchitecture(const Architecture& arch) {
  if (arch.class_codes.empty()) throw ConfigError("model has no classes");
  if (arch.parents.size() != arch.class_codes.size()) {
    throw ConfigError("model parent list does not match its class list");
  }
  for (size_t c = 0; c < arch.parents.size(); ++c) {
    if (arch.parents[c] >= static_cast<int>(c)) {
      throw ConfigError("model classes are not in topological order");
    }
  }
  if (arch.feature_dim == 0) throw ConfigError("model.feature_dim must be > 0");
  if (arch.features == FeatureKind::kToyEncoder &&
      (arch.embed_dim == 0 || arch.max_len == 0)) {
    throw ConfigError("model.embed_dim and model.max_len must be > 0");
  }
  if (arch.kind == ModelKind::kSbnn && arch.hidden_dim == 0) {
    throw ConfigError("model.hidden_dim must be > 0");
  }
  if (arch.kind == ModelKind::kSbhnn && arch.head_dim == 0) {
    throw ConfigError("model.head_dim must be > 0");
  }
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() {
  tokens_ = {std::string(kPadToken), std::string(kOovToken)};
  index_ = {{tokens_[0], kPad}, {tokens_[1], kOov}};
}

Vocabulary Vocabulary::Build(std::span<const Tokens> documents, size_t max_words) {
  std::map<std::string, size_t> freq;
  for (const auto& doc : documents) {
    for (const auto& token : doc) ++freq[token];
  }
  std::vector<std::pair<std::string, size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& [token, count] : ranked) {
    if (vocab.tokens_.size() - 2 >= max_words) break;
    if (vocab.index_.count(token)) continue;
    vocab.index_.emplace(token, static_cast<int>(vocab.tokens_.size()));
    vocab.tokens_.push_back(token);
  }
  return vocab;
}

Vocabulary Vocabulary::FromTokens(std::vector<std::string> tokens) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kOovToken) {
    throw DataError("vocabulary must start with [PAD] and [OOV]");
  }
  Vocabulary vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.index_.clear();
  for (size_t i = 0; i < vocab.tokens_.size(); ++i) {
    if (!vocab.index_.emplace(vocab.tokens_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate vocabulary entry '" + vocab.tokens_[i] + "'");
    }
  }
  return vocab;
}

int Vocabulary::Index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kOov : it->second;
}

std::vector<int> Vocabulary::Encode(std::span<const std::string> tokens,
                                    size_t max_len) const {
  std::vector<int> ids;
  const size_t n = std::min(tokens.size(), max_len);
  ids.reserve(n);
  for (size_t i = 0; i < n; ++i) ids.push_back(Index(tokens[i]));
  return ids;
}

// ---------------------------------------------------------------------------

std::vector<ModelParams::Group> ModelParams::Groups() {
  std::vector<Group> out;
  auto add_dense = [&](const std::string& name, DenseLayer& layer) {
    if (layer.weight.values().empty()) return;
    out.push_back({name + ".weight", layer.weight.values()});
    out.push_back({name + ".bias", layer.bias});
  };
  if (!embedding.values().empty()) out.push_back({"embedding", embedding.values()});
  add_dense("projection", projection);
  add_dense("hidden", hidden);
  add_dense("output", output);
  for (size_t c = 0; c < heads.size(); ++c) {
    add_dense("head[" + std::to_string(c) + "]", heads[c]);
  }
  for (size_t c = 0; c < head_outputs.size(); ++c) {
    add_dense("head_output[" + std::to_string(c) + "]", head_outputs[c]);
  }
  return out;
}

std::vector<ModelParams::ConstGroup> ModelParams::Groups() const {
  std::vector<ConstGroup> out;
  for (auto& g : const_cast<ModelParams*>(this)->Groups()) {
    out.push_back({g.name, g.values});
  }
  return out;
}

ModelParams ModelParams::ZerosLike() const {
  ModelParams out = *this;
  out.SetZero();
  return out;
}

void ModelParams::SetZero() {
  for (auto& g : Groups()) std::fill(g.values.begin(), g.values.end(), 0.0);
}

size_t ModelParams::TotalSize() const {
  size_t n = 0;
  for (const auto& g : Groups()) n += g.values.size();
  return n;
}

ModelParams AllocateParams(const Architecture& arch, size_t vocab_size) {
  ModelParams p;
  const size_t c = arch.num_classes();
  if (arch.features == FeatureKind::kToyEncoder) {
    p.embedding = Matrix(vocab_size, arch.embed_dim);
    p.projection = DenseLayer(arch.embed_dim, arch.feature_dim);
  }
  if (arch.kind == ModelKind::kSbnn) {
    p.hidden = DenseLayer(arch.feature_dim, arch.hidden_dim);
    p.output = DenseLayer(arch.hidden_dim, c);
  } else {
    for (size_t i = 0; i < c; ++i) {
      p.heads.emplace_back(arch.feature_dim, arch.head_dim);
      p.head_outputs.emplace_back(arch.head_dim, 1);
    }
  }
  return p;
}

Model Model::Create(const Architecture& arch, Vocabulary vocab, uint64_t seed) {
  ValidateArchitecture(arch);
  Model model;
  model.arch_ = arch;
  model.vocab_ = std::move(vocab);
  model.params_ = AllocateParams(arch, model.vocab_.size());
  Rng rng(seed);
  ModelParams& p = model.params_;
  if (arch.features == FeatureKind::kToyEncoder) {
    // Each row is looked up by a one-hot input, so fan-in is 1.
    const double s = std::sqrt(6.0 / static_cast<double>(1 + arch.embed_dim));
    for (size_t r = 0; r < p.embedding.rows(); ++r) {
      for (double& v : p.embedding.row(r)) {
        v = r == static_cast<size_t>(Vocabulary::kPad) ? 0.0 : rng.Uniform(-s, s);
      }
    }
    p.projection.InitUniform(rng);
  }
  if (arch.kind == ModelKind::kSbnn) {
    p.hidden.InitUniform(rng);
    p.output.InitUniform(rng);
  } else {
    for (auto& head : p.heads) head.InitUniform(rng);
    for (auto& out : p.head_outputs) out.InitUniform(rng);
  }
  return model;
}

Model Model::FromParts(Architecture arch, Vocabulary vocab, ModelParams params) {
  ValidateArchitecture(arch);
  Model model;
  model.arch_ = std::move(arch);
  model.vocab_ = std::move(vocab);
  model.params_ = std::move(params);
  return model;
}

std::vector<int> Model::EncodeTokens(std::span<const std::string> tokens) const {
  return vocab_.Encode(tokens, arch_.max_len);
}

void Model::Pool(std::span<const int> ids, Activations& act) const {
  act.ids.assign(ids.begin(), ids.end());
  act.pooled.assign(arch_.embed_dim, 0.0);
  act.real_tokens = 0;
  for (int id : ids) {
    if (id == Vocabulary::kPad) continue;
    ++act.real_tokens;
    const auto row = params_.embedding.row(static_cast<size_t>(id));
    for (size_t k = 0; k < row.size(); ++k) act.pooled[k] += row[k];
  }
  if (act.real_tokens > 0) {
    const double inv = 1.0 / static_cast<double>(act.real_tokens);
    for (double& v : act.pooled) v *= inv;
  }
}

void Model::Project(Activations& act) const {
  act.features.assign(arch_.feature_dim, 0.0);
  params_.projection.Forward(act.pooled, act.features);
}

void Model::Classify(Activations& act, const Dropout& dropout) const {
  act.classifier_input = act.features;
  act.dropout_scale.clear();
  if (dropout.rng != nullptr && dropout.rate > 0.0) {
    const double keep = 1.0 - dropout.rate;
    act.dropout_scale.resize(act.features.size());
    for (size_t i = 0; i < act.features.size(); ++i) {
      act.dropout_scale[i] = dropout.rng->UniformUnit() < keep ? 1.0 / keep : 0.0;
      act.classifier_input[i] *= act.dropout_scale[i];
    }
  }
  if (arch_.kind == ModelKind::kSbnn) {
    ClassifySbnn(act);
  } else {
    ClassifySbhnn(act);
  }
  act.probabilities.resize(act.logits.size());
  for (size_t c = 0; c < act.logits.size(); ++c) {
    act.probabilities[c] = Sigmoid(act.logits[c]);
  }
}

void Model::ClassifySbnn(Activations& act) const {
  act.hidden_pre.assign(arch_.hidden_dim, 0.0);
  params_.hidden.Forward(act.classifier_input, act.hidden_pre);
  act.hidden.resize(act.hidden_pre.size());
  for (size_t i = 0; i < act.hidden.size(); ++i) act.hidden[i] = Relu(act.hidden_pre[i]);
  act.logits.assign(arch_.num_classes(), 0.0);
  params_.output.Forward(act.hidden, act.logits);
}

void Model::ClassifySbhnn(Activations& act) const {
  const size_t num = arch_.num_classes();
  const size_t m = arch_.head_dim;
  act.head_pre.assign(num, std::vector<double>(m, 0.0));
  act.head_out.assign(num, std::vector<double>(m, 0.0));
  act.state.assign(num, std::vector<double>(m, 0.0));
  act.logits.assign(num, 0.0);
  for (size_t c = 0; c < num; ++c) {
    params_.heads[c].Forward(act.classifier_input, act.head_pre[c]);
    for (size_t k = 0; k < m; ++k) act.head_out[c][k] = Relu(act.head_pre[c][k]);
    act.state[c] = act.head_out[c];
    const int parent = arch_.parents[c];
    if (parent >= 0) {
      const auto& add = arch_.wiring == HierarchyWiring::kCumulative
                            ? act.state[parent]
                            : act.head_out[parent];
      for (size_t k = 0; k < m; ++k) act.state[c][k] += add[k];
    }
    params_.head_outputs[c].Forward(act.state[c],
                                    std::span<double>(&act.logits[c], 1));
  }
}

Activations Model::ForwardIds(std::span<const int> ids, const Dropout& dropout) const {
  Activations act;
  Pool(ids, act);
  Project(act);
  Classify(act, dropout);
  return act;
}

Activations Model::ForwardTokens(std::span<const std::string> tokens) const {
  if (arch_.features != FeatureKind::kToyEncoder) {
    throw ConfigError("model uses external features; token input is unsupported");
  }
  const std::vector<int> ids = EncodeTokens(tokens);
  return ForwardIds(ids);
}

Activations Model::ForwardFeatures(std::span<const double> features,
                                   const Dropout& dropout) const {
  if (features.size() != arch_.feature_dim) {
    throw DataError("feature vector has dimension " +
                    std::to_string(features.size()) + ", model expects " +
                    std::to_string(arch_.feature_dim));
  }
  Activations act;
  act.features.assign(features.begin(), features.end());
  Classify(act, dropout);
  return act;
}

Activations Model::ForwardPooled(std::span<const double> pooled) const {
  Activations act;
  act.pooled.assign(pooled.begin(), pooled.end());
  Project(act);
  Classify(act);
  return act;
}

void Model::Backward(const Activations& act, std::span<const double> dlogits,
                     ModelParams& grads, std::vector<double>* dpooled) const {
  std::vector<double> dinput(act.classifier_input.size(), 0.0);
  if (arch_.kind == ModelKind::kSbnn) {
    std::vector<double> dhidden(arch_.hidden_dim, 0.0);
    params_.output.Backward(act.hidden, dlogits, grads.output, dhidden);
    for (size_t i = 0; i < dhidden.size(); ++i) {
      if (act.hidden_pre[i] <= 0.0) dhidden[i] = 0.0;
    }
    params_.hidden.Backward(act.classifier_input, dhidden, grads.hidden, dinput);
  } else {
    const size_t num = arch_.num_classes();
    const size_t m = arch_.head_dim;
    std::vector<std::vector<double>> dstate(num, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> dhead(num, std::vector<double>(m, 0.0));
    // Children follow parents, so a reverse sweep sees every child's
    // contribution before the parent is propagated.
    for (size_t c = num; c-- > 0;) {
      std::vector<double> dz(m, 0.0);
      params_.head_outputs[c].Backward(act.state[c],
                                       std::span<const double>(&dlogits[c], 1),
                                       grads.head_outputs[c], dz);
      for (size_t k = 0; k < m; ++k) dstate[c][k] += dz[k];
      for (size_t k = 0; k < m; ++k) dhead[c][k] += dstate[c][k];
      const int parent = arch_.parents[c];
      if (parent < 0) continue;
      auto& target = arch_.wiring == HierarchyWiring::kCumulative ? dstate[parent]
                                                                   : dhead[parent];
      for (size_t k = 0; k < m; ++k) target[k] += dstate[c][k];
    }
    for (size_t c = 0; c < num; ++c) {
      for (size_t k = 0; k < m; ++k) {
        if (act.head_pre[c][k] <= 0.0) dhead[c][k] = 0.0;
      }
      params_.heads[c].Backward(act.classifier_input, dhead[c], grads.heads[c],
                                dinput);
    }
  }
  if (arch_.features != FeatureKind::kToyEncoder || act.pooled.empty()) return;
  std::vector<double> dfeatures = std::move(dinput);
  if (!act.dropout_scale.empty()) {
    for (size_t i = 0; i < dfeatures.size(); ++i) dfeatures[i] *= act.dropout_scale[i];
  }
  std::vector<double> dmean(arch_.embed_dim, 0.0);
  params_.projection.Backward(act.pooled, dfeatures, grads.projection, dmean);
  if (dpooled) *dpooled = dmean;
  if (act.real_tokens == 0) return;
  const double inv = 1.0 / static_cast<double>(act.real_tokens);
  for (int id : act.ids) {
    if (id == Vocabulary::kPad) continue;
    auto row = grads.embedding.row(static_cast<size_t>(id));
    for (size_t k = 0; k < row.size(); ++k) row[k] += dmean[k] * inv;
  }
}

std::vector<std::string> AssignClasses(const Model& model,
                                       std::span<const double> probabilities,
                                       double threshold) {
  std::vector<std::string> out;
  for (size_t c = 0; c < probabilities.size(); ++c) {
    if (probabilities[c] >= threshold) {
      out.push_back(model.architecture().class_codes[c]);
    }
  }
  return out;
}

Prediction Predict(const Model& model, std::span<const std::string> tokens,
                   double threshold) {
  Prediction p;
  p.probabilities = model.ForwardTokens(tokens).probabilities;
  p.assigned = AssignClasses(model, p.probabilities, threshold);
  return p;
}

}  // namespace patcls
