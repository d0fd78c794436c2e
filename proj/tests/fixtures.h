#ifndef PATCLS_TESTS_FIXTURES_H_
#define PATCLS_TESTS_FIXTURES_H_

#include <random>
#include <string>
#include <vector>

#include "patcls/model.h"
#include "patcls/taxonomy.h"
#include "patcls/train.h"
#include "patcls/weaklabel.h"

namespace patcls::testing {

// Two-class chain A -> A1 with three document groups: negatives (0,0),
// A only (1,0) and A with A1 (1,1). Each document carries three words
// unique to its group plus three shared noise words, so the groups are
// linearly separable in the mean-pooled bag of words.
struct ChainFixture {
  Taxonomy taxonomy;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
};

inline ChainFixture SeparableChainFixture(uint64_t seed, size_t n_train = 120,
                                          size_t n_val = 30) {
  std::vector<ClassNode> nodes(2);
  nodes[0].code = "A";
  nodes[0].query_source = "a+";
  nodes[1].code = "A1";
  nodes[1].parent = "A";
  nodes[1].query_source = "b+";
  ChainFixture f{Taxonomy::FromNodes(nodes), {}, {}};
  std::mt19937_64 gen(seed);
  const char* group_prefix[3] = {"neg", "aaa", "bbb"};
  auto make = [&](size_t i) {
    const size_t group = i % 3;
    LabeledExample ex;
    ex.id = "doc" + std::to_string(i);
    for (int k = 0; k < 3; ++k) {
      ex.text_tokens.push_back(group_prefix[group] + std::to_string(gen() % 8));
      ex.text_tokens.push_back("noise" + std::to_string(gen() % 20));
    }
    ex.label = LabelVector(2);
    if (group >= 1) ex.label.set(0);
    if (group == 2) ex.label.set(1);
    return ex;
  };
  for (size_t i = 0; i < n_train; ++i) f.train.push_back(make(i));
  for (size_t i = 0; i < n_val; ++i) f.validation.push_back(make(n_train + i));
  return f;
}

inline Architecture SmallArchitecture(ModelKind kind, const Taxonomy& taxonomy,
                                      size_t width = 16) {
  Architecture arch;
  arch.kind = kind;
  arch.embed_dim = width;
  arch.feature_dim = width;
  arch.hidden_dim = width;
  arch.head_dim = width / 2;
  arch.max_len = 64;
  arch.SetClasses(taxonomy);
  return arch;
}

// Settings used for the separable fixture.
inline TrainConfig FixtureTrainConfig() {
  TrainConfig cfg;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 8;
  cfg.dropout_rate = 0.1;
  cfg.max_epochs = 50;
  cfg.patience = 50;
  cfg.seed = 7;
  return cfg;
}

}  // namespace patcls::testing

#endif  // PATCLS_TESTS_FIXTURES_H_
