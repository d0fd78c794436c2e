#ifndef PATCLS_PIPELINE_H_
#define PATCLS_PIPELINE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "patcls/attribution.h"
#include "patcls/loss.h"
#include "patcls/metrics.h"
#include "patcls/model.h"
#include "patcls/taxonomy.h"
#include "patcls/train.h"
#include "patcls/weaklabel.h"

namespace patcls {

inline constexpr int kConfigSchemaVersion = 1;

struct ConfigKey {
  std::string key;  // dotted path, e.g. "train.batch_size"
  nlohmann::json default_value;
  std::string help;
};

// Every recognised configuration key with its default.
const std::vector<ConfigKey>& ConfigKeys();
std::string ConfigKeysHelp();

struct PipelinePaths {
  std::filesystem::path corpus;
  std::filesystem::path taxonomy;  // empty: bundled green plastics scheme
  std::filesystem::path labels;
  std::filesystem::path dataset_dir;
  std::filesystem::path checkpoint_dir;
  std::filesystem::path report_dir;
  std::filesystem::path embeddings;  // external feature vectors
};

struct PipelineConfig {
  uint64_t seed = 7;
  PipelinePaths paths;
  LabelingConfig labeling;
  size_t workers = 1;
  Architecture architecture;  // classes are filled from the taxonomy
  size_t vocab_size = 30000;
  TrainConfig train;
  // Unset: the bundled class weights when the taxonomy is the bundled one,
  // uniform weights otherwise.
  std::optional<std::vector<double>> loss_beta;
  std::optional<std::vector<double>> loss_gamma;
  double threshold = 0.5;
  std::string eval_split = "test";
  // Entries: "whole", "levels", "classes", "level <n>" or a class code.
  std::vector<std::string> eval_scopes = {"whole", "levels", "classes"};
  AttributionConfig attribution;
  std::string attribution_format = "html";
};

// Layers the file's contents over the defaults, then `overrides` (dotted
// key, textual value) over that. Values that parse as JSON are taken as
// JSON, anything else as a string. Unknown keys and type mismatches throw
// ConfigError. No file means defaults only.
nlohmann::json ResolveConfigJson(const std::optional<std::filesystem::path>& file,
                                 const std::vector<std::pair<std::string, std::string>>& overrides);
PipelineConfig ParsePipelineConfig(const nlohmann::json& resolved);
PipelineConfig LoadPipelineConfig(
    const std::optional<std::filesystem::path>& file,
    const std::vector<std::pair<std::string, std::string>>& overrides = {});

Taxonomy LoadConfiguredTaxonomy(const PipelineConfig& config);
LossConfig ResolveLoss(const PipelineConfig& config, const Taxonomy& taxonomy);
std::vector<EvalScope> ResolveScopes(const PipelineConfig& config, const Taxonomy& taxonomy);

// Pipeline commands. Each writes its artifacts and returns a one-paragraph
// human summary.
std::string RunLabel(const PipelineConfig& config);
std::string RunBuildDataset(const PipelineConfig& config);
std::string RunTrain(const PipelineConfig& config);
std::string RunEvaluate(const PipelineConfig& config);

struct PredictOptions {
  std::optional<std::filesystem::path> input_corpus;  // otherwise eval split
  std::optional<std::filesystem::path> output;
};
std::string RunPredict(const PipelineConfig& config, const PredictOptions& options);

struct ExplainOptions {
  std::optional<std::string> id;    // looked up in the dataset splits
  std::optional<std::string> text;  // raw text, preprocessed first
};
std::string RunExplain(const PipelineConfig& config, const ExplainOptions& options);

std::string RunCurves(const PipelineConfig& config);
std::string RunReport(const PipelineConfig& config);

// Artifact file names inside the configured directories.
std::filesystem::path CheckpointPath(const PipelineConfig& config);
std::filesystem::path EpochLogPath(const PipelineConfig& config);
std::filesystem::path DatasetReportPath(const PipelineConfig& config);
std::filesystem::path EvalReportPath(const PipelineConfig& config);
std::filesystem::path CurvesPath(const PipelineConfig& config);
std::filesystem::path PredictionsPath(const PipelineConfig& config);
std::filesystem::path ExplainPath(const PipelineConfig& config, const std::string& id,
                                  const std::string& extension);

}  // namespace patcls

#endif  // PATCLS_PIPELINE_H_
