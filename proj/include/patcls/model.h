#ifndef PATCLS_MODEL_H_
#define PATCLS_MODEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patcls/corpus.h"
#include "patcls/nn.h"
#include "patcls/rng.h"
#include "patcls/taxonomy.h"

namespace patcls {

enum class ModelKind { kSbnn, kSbhnn };
// How SBHNN heads are chained along tree edges:
//   kCumulative: z_c = u_c + z_parent (information flows down every edge)
//   kParentHead: z_c = u_c + u_parent (only the direct parent's head)
enum class HierarchyWiring { kCumulative, kParentHead };
enum class FeatureKind { kToyEncoder, kExternal };

ModelKind ParseModelKind(std::string_view name);
const char* ModelKindName(ModelKind kind);
HierarchyWiring ParseWiring(std::string_view name);
const char* WiringName(HierarchyWiring wiring);
FeatureKind ParseFeatureKind(std::string_view name);
const char* FeatureKindName(FeatureKind kind);

struct Architecture {
  ModelKind kind = ModelKind::kSbhnn;
  FeatureKind features = FeatureKind::kToyEncoder;
  HierarchyWiring wiring = HierarchyWiring::kCumulative;
  size_t embed_dim = 128;    // e
  size_t feature_dim = 256;  // d, size of h
  size_t hidden_dim = 256;   // H, SBNN hidden layer
  size_t head_dim = 64;      // m, SBHNN head width
  size_t max_len = 256;      // input truncation, in tokens
  std::vector<std::string> class_codes;
  std::vector<int> parents;  // -1 for the root, parents precede children

  size_t num_classes() const { return class_codes.size(); }
  // Copies class codes and parent links from a taxonomy.
  void SetClasses(const Taxonomy& taxonomy);
};

// Token -> row index. Row 0 is padding, row 1 is out-of-vocabulary.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;
  static constexpr std::string_view kPadToken = "[PAD]";
  static constexpr std::string_view kOovToken = "[OOV]";

  Vocabulary();
  // Keeps the `max_words` most frequent tokens (ties broken alphabetically)
  // after the two special rows.
  static Vocabulary Build(std::span<const Tokens> documents, size_t max_words);
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  int Index(std::string_view token) const;
  std::vector<int> Encode(std::span<const std::string> tokens, size_t max_len) const;
  size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct ModelParams {
  Matrix embedding;       // V x e, toy encoder only
  DenseLayer projection;  // e -> d, toy encoder only
  DenseLayer hidden;      // SBNN: d -> H
  DenseLayer output;      // SBNN: H -> C
  std::vector<DenseLayer> heads;         // SBHNN: d -> m per class
  std::vector<DenseLayer> head_outputs;  // SBHNN: m -> 1 per class

  struct Group {
    std::string name;
    std::span<double> values;
  };
  struct ConstGroup {
    std::string name;
    std::span<const double> values;
  };
  // Every parameter array in a fixed order; names are stable identifiers
  // such as "hidden.weight" or "head[3].bias".
  std::vector<Group> Groups();
  std::vector<ConstGroup> Groups() const;

  ModelParams ZerosLike() const;
  void SetZero();
  size_t TotalSize() const;
};

// Per-sample forward state kept for backpropagation.
struct Activations {
  std::vector<int> ids;
  size_t real_tokens = 0;
  std::vector<double> pooled;      // mean embedding, e
  std::vector<double> features;    // h before dropout, d
  std::vector<double> dropout_scale;  // empty when dropout is off
  std::vector<double> classifier_input;
  std::vector<double> hidden_pre;  // SBNN
  std::vector<double> hidden;
  std::vector<std::vector<double>> head_pre;  // SBHNN, per class
  std::vector<std::vector<double>> head_out;  // u_c
  std::vector<std::vector<double>> state;     // z_c
  std::vector<double> logits;
  std::vector<double> probabilities;
};

struct Dropout {
  double rate = 0.0;
  Rng* rng = nullptr;  // null disables dropout
};

class Model {
 public:
  Model() = default;
  // Random initialisation. `vocab` may be empty for external features.
  static Model Create(const Architecture& arch, Vocabulary vocab, uint64_t seed);

  const Architecture& architecture() const { return arch_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const ModelParams& params() const { return params_; }
  ModelParams& mutable_params() { return params_; }
  size_t num_classes() const { return arch_.num_classes(); }

  std::vector<int> EncodeTokens(std::span<const std::string> tokens) const;

  // Mean of the non-padding embedding rows; zero when there are none.
  void Pool(std::span<const int> ids, Activations& act) const;
  // h = projection(pooled).
  void Project(Activations& act) const;
  // Classifier over act.features, with optional inverted dropout on h.
  void Classify(Activations& act, const Dropout& dropout = {}) const;

  Activations ForwardIds(std::span<const int> ids, const Dropout& dropout = {}) const;
  Activations ForwardTokens(std::span<const std::string> tokens) const;
  Activations ForwardFeatures(std::span<const double> features,
                              const Dropout& dropout = {}) const;
  Activations ForwardPooled(std::span<const double> pooled) const;

  // Accumulates parameter gradients for dL/dlogits into `grads`. When
  // `dpooled` is given it receives dL/d(pooled embedding).
  void Backward(const Activations& act, std::span<const double> dlogits,
                ModelParams& grads, std::vector<double>* dpooled = nullptr) const;

  // Checkpoint loading hook.
  static Model FromParts(Architecture arch, Vocabulary vocab, ModelParams params);

 private:
  void ClassifySbnn(Activations& act) const;
  void ClassifySbhnn(Activations& act) const;

  Architecture arch_;
  Vocabulary vocab_;
  ModelParams params_;
};

// Throws ConfigError when the architecture is internally inconsistent.
void ValidateArchitecture(const Architecture& arch);
ModelParams AllocateParams(const Architecture& arch, size_t vocab_size);

struct Prediction {
  std::vector<double> probabilities;
  std::vector<std::string> assigned;  // codes with probability >= threshold
};

Prediction Predict(const Model& model, std::span<const std::string> tokens,
                   double threshold = 0.5);
std::vector<std::string> AssignClasses(const Model& model,
                                       std::span<const double> probabilities,
                                       double threshold);

}  // namespace patcls

#endif  // PATCLS_MODEL_H_
