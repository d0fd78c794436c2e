#include "patcls/pipeline.h"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <thread>

#include "patcls/checkpoint.h"
#include "patcls/error.h"
#include "patcls/io.h"

namespace patcls {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<ConfigKey>& BuildKeys() {
  static const std::vector<ConfigKey> keys = {
      {"schema_version", kConfigSchemaVersion, "config schema version, must be 1"},
      {"seed", 7, "global seed for sampling, shuffling, initialisation and dropout"},
      {"paths.corpus", "data/sample_corpus.jsonl", "input corpus, JSON Lines"},
      {"paths.taxonomy", "", "taxonomy JSON; empty selects the bundled Y02G scheme"},
      {"paths.labels", "out/labels.jsonl", "output of `label`"},
      {"paths.dataset_dir", "out/dataset", "train.csv, val.csv, test.csv and report"},
      {"paths.checkpoint_dir", "out/checkpoint", "model.ckpt and epoch_log.csv"},
      {"paths.report_dir", "out/report", "evaluation, curves, predictions, explanations"},
      {"paths.embeddings", "", "JSONL {id, vector} feature file for model.features=external"},
      {"labeling.k", 1, "minimum non-overlapping query matches per class"},
      {"labeling.k_per_class", json::object(), "per-class overrides of labeling.k"},
      {"labeling.fields", json::array({"description"}),
       "text fields scanned by the queries (title, abstract, description)"},
      {"labeling.negative_ratio", 2.0, "negatives sampled per positive"},
      {"labeling.split", json::array({0.8, 0.1, 0.1}), "train/validation/test fractions"},
      {"labeling.negative_boost_query", "plastic+",
       "negatives matching this query are favoured; empty disables"},
      {"labeling.negative_boost_fraction", 0.25, "minimum share of boosted negatives"},
      {"labeling.workers", 1, "threads used by `label`"},
      {"model.kind", "sbhnn", "sbnn or sbhnn"},
      {"model.features", "toy", "toy (trainable encoder) or external (precomputed h)"},
      {"model.wiring", "cumulative", "SBHNN head wiring: cumulative or parent_head"},
      {"model.vocab_size", 30000, "toy encoder vocabulary size, excluding PAD and OOV"},
      {"model.embed_dim", 128, "toy encoder embedding width"},
      {"model.feature_dim", 256, "width of the feature vector h"},
      {"model.hidden_dim", 256, "SBNN hidden layer width"},
      {"model.head_dim", 64, "SBHNN per-class head width"},
      {"model.max_len", 256, "input truncation in tokens"},
      {"train.learning_rate", 2e-6, "Adam step size"},
      {"train.batch_size", 96, "mini-batch size"},
      {"train.dropout", 0.5, "dropout rate on h during training"},
      {"train.adam_beta1", 0.9, "Adam first-moment decay"},
      {"train.adam_beta2", 0.999, "Adam second-moment decay"},
      {"train.adam_epsilon", 1e-8, "Adam denominator offset"},
      {"train.max_epochs", 20, "epoch limit"},
      {"train.patience", 2, "tolerated non-improving validation epochs"},
      {"loss.beta", nullptr,
       "per-class importance weights; null uses the bundled weights for the bundled "
       "taxonomy and 1 otherwise"},
      {"loss.gamma", nullptr, "per-class positive weights; null uses 2 for the bundled "
                              "taxonomy and 1 otherwise"},
      {"eval.threshold", 0.5, "probability threshold for assigning a class"},
      {"eval.split", "test", "split used by evaluate and curves: train, val or test"},
      {"eval.scopes", json::array({"whole", "levels", "classes"}),
       "scopes: whole, levels, classes, \"level <n>\" or a class code"},
      {"attribution.steps", 128, "integrated-gradients Riemann steps"},
      {"attribution.class", "Y02G", "class whose output is attributed"},
      {"attribution.target", "probability", "probability or logit"},
      {"attribution.format", "html", "html or ansi"},
  };
  return keys;
}

const ConfigKey* FindKey(const std::string& key) {
  for (const ConfigKey& k : BuildKeys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

// Registered keys with a dotted prefix `prefix.` exist.
bool IsSection(const std::string& prefix) {
  const std::string dotted = prefix + ".";
  for (const ConfigKey& k : BuildKeys()) {
    if (k.key.rfind(dotted, 0) == 0) return true;
  }
  return false;
}

bool SameKind(const json& expected, const json& actual) {
  if (expected.is_null()) return actual.is_null() || actual.is_array();
  if (expected.is_number()) return actual.is_number();
  if (expected.is_string()) return actual.is_string();
  if (expected.is_array()) return actual.is_array();
  if (expected.is_object()) return actual.is_object();
  if (expected.is_boolean()) return actual.is_boolean();
  return false;
}

void SetLeaf(json& flat, const std::string& key, const json& value) {
  const ConfigKey* def = FindKey(key);
  if (def == nullptr) throw ConfigError("unknown config key '" + key + "'");
  if (!SameKind(def->default_value, value)) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + value.dump());
  }
  flat[key] = value;
}

void FlattenInto(const json& node, const std::string& prefix, json& flat) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (FindKey(key) != nullptr) {
      SetLeaf(flat, key, it.value());
    } else if (it.value().is_object() && IsSection(key)) {
      FlattenInto(it.value(), key, flat);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

size_t GetSize(const json& flat, const std::string& key) {
  const json& v = flat.at(key);
  if (v.is_number_unsigned()) return v.get<size_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) return v.get<size_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == static_cast<double>(static_cast<uint64_t>(d))) {
      return static_cast<size_t>(d);
    }
  }
  throw ConfigError("config key '" + key + "' must be a non-negative integer, got " +
                    v.dump());
}

double GetDouble(const json& flat, const std::string& key) {
  return flat.at(key).get<double>();
}

std::string GetString(const json& flat, const std::string& key) {
  return flat.at(key).get<std::string>();
}

std::vector<double> GetDoubles(const json& value, const std::string& key) {
  std::vector<double> out;
  for (const json& x : value) {
    if (!x.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> GetStrings(const json& flat, const std::string& key) {
  std::vector<std::string> out;
  for (const json& x : flat.at(key)) {
    if (!x.is_string()) throw ConfigError("config key '" + key + "' must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

const std::vector<LabeledExample>& PickSplit(const DatasetSplit& split,
                                             const std::string& name) {
  if (name == "train") return split.train;
  if (name == "val" || name == "validation") return split.validation;
  if (name == "test") return split.test;
  throw ConfigError("unknown split '" + name + "', expected train, val or test");
}

std::string SplitFileName(const std::string& name) {
  if (name == "train") return "train.csv";
  if (name == "val" || name == "validation") return "val.csv";
  if (name == "test") return "test.csv";
  throw ConfigError("unknown split '" + name + "', expected train, val or test");
}

std::string SafeName(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                      c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out.empty() ? "_" : out;
}

// Loads the external feature file when the model needs one.
std::unique_ptr<ExternalEmbeddings> MaybeLoadFeatures(const PipelineConfig& config,
                                                      const Architecture& arch) {
  if (arch.features != FeatureKind::kExternal) return nullptr;
  if (config.paths.embeddings.empty()) {
    throw ConfigError("model.features=external requires paths.embeddings");
  }
  return std::make_unique<ExternalEmbeddings>(
      ExternalEmbeddings::Load(config.paths.embeddings, arch.feature_dim));
}

Model LoadCompatibleCheckpoint(const PipelineConfig& config, const Taxonomy& taxonomy) {
  const fs::path path = CheckpointPath(config);
  if (!fs::exists(path)) {
    throw DataError("checkpoint " + path.string() + " not found; run `train` first");
  }
  Model model = LoadCheckpoint(path);
  if (model.architecture().class_codes != taxonomy.codes()) {
    throw ConfigError("checkpoint " + path.string() +
                      " was trained on a different class list than the taxonomy");
  }
  return model;
}

std::vector<LabelVector> Truths(const std::vector<LabeledExample>& examples) {
  std::vector<LabelVector> out;
  out.reserve(examples.size());
  for (const LabeledExample& ex : examples) out.push_back(ex.label);
  return out;
}

json CodesJson(const Taxonomy& taxonomy, const std::vector<size_t>& indices) {
  json out = json::array();
  for (size_t i : indices) out.push_back(taxonomy.node(i).code);
  return out;
}

std::string LabelLine(const Taxonomy& taxonomy, const Labeler& labeler,
                      const RawPatent& patent, bool* positive) {
  const Document doc = MakeDocument(patent);
  const std::vector<size_t> direct = labeler.DirectClasses(doc);
  const LabelVector label = labeler.Label(doc);
  std::vector<size_t> assigned;
  for (size_t i = 0; i < label.size(); ++i) {
    if (label.test(i)) assigned.push_back(i);
  }
  *positive = label.any();
  json row = json::object();
  row["id"] = patent.id;
  row["direct"] = CodesJson(taxonomy, direct);
  row["labels"] = CodesJson(taxonomy, assigned);
  row["vector"] = label.bits();
  return row.dump();
}

std::string ReadIfExists(const fs::path& path) {
  return fs::exists(path) ? ReadTextFile(path) : std::string();
}

}  // namespace

const std::vector<ConfigKey>& ConfigKeys() { return BuildKeys(); }

std::string ConfigKeysHelp() {
  std::ostringstream out;
  out << "Configuration keys (dotted path = default):\n";
  for (const ConfigKey& k : BuildKeys()) {
    out << "  " << k.key << " = " << k.default_value.dump() << "\n      " << k.help
        << "\n";
  }
  return out.str();
}

json ResolveConfigJson(const std::optional<fs::path>& file,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  json flat = json::object();
  for (const ConfigKey& k : BuildKeys()) flat[k.key] = k.default_value;
  if (file.has_value()) {
    json parsed;
    try {
      parsed = json::parse(ReadTextFile(*file));
    } catch (const json::parse_error& e) {
      throw ConfigError("config " + file->string() + " is not valid JSON: " + e.what());
    } catch (const Error& e) {
      throw ConfigError("cannot read config " + file->string() + ": " + e.what());
    }
    if (!parsed.is_object()) {
      throw ConfigError("config " + file->string() + " must be a JSON object");
    }
    if (!parsed.contains("schema_version")) {
      throw ConfigError("config " + file->string() + " lacks schema_version");
    }
    FlattenInto(parsed, "", flat);
  }
  for (const auto& [key, text] : overrides) {
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }
    const ConfigKey* def = FindKey(key);
    // A bare word such as 7e or true stays a string for string keys.
    if (def != nullptr && def->default_value.is_string() && !value.is_string()) {
      value = text;
    }
    SetLeaf(flat, key, value);
  }
  const json& version = flat.at("schema_version");
  if (!version.is_number_integer() || version.get<int>() != kConfigSchemaVersion) {
    throw ConfigError("unsupported config schema_version " + version.dump() +
                      ", expected " + std::to_string(kConfigSchemaVersion));
  }
  return flat;
}

PipelineConfig ParsePipelineConfig(const json& flat) {
  PipelineConfig c;
  try {
    c.seed = GetSize(flat, "seed");
    c.paths.corpus = GetString(flat, "paths.corpus");
    c.paths.taxonomy = GetString(flat, "paths.taxonomy");
    c.paths.labels = GetString(flat, "paths.labels");
    c.paths.dataset_dir = GetString(flat, "paths.dataset_dir");
    c.paths.checkpoint_dir = GetString(flat, "paths.checkpoint_dir");
    c.paths.report_dir = GetString(flat, "paths.report_dir");
    c.paths.embeddings = GetString(flat, "paths.embeddings");

    LabelingConfig& l = c.labeling;
    l.k = GetSize(flat, "labeling.k");
    l.k_per_class.clear();
    for (const auto& [code, value] : flat.at("labeling.k_per_class").items()) {
      if (!value.is_number_integer() || value.get<int64_t>() < 0) {
        throw ConfigError("labeling.k_per_class." + code + " must be a positive integer");
      }
      l.k_per_class[code] = value.get<size_t>();
    }
    l.fields_to_scan.clear();
    for (const std::string& f : GetStrings(flat, "labeling.fields")) {
      l.fields_to_scan.push_back(ParseTextField(f));
    }
    if (l.fields_to_scan.empty()) throw ConfigError("labeling.fields must not be empty");
    l.negative_ratio = GetDouble(flat, "labeling.negative_ratio");
    const std::vector<double> split = GetDoubles(flat.at("labeling.split"), "labeling.split");
    if (split.size() != 3) throw ConfigError("labeling.split needs exactly 3 fractions");
    std::copy(split.begin(), split.end(), l.split_fractions.begin());
    l.seed = c.seed;
    l.negative_boost_query = GetString(flat, "labeling.negative_boost_query");
    l.negative_boost_fraction = GetDouble(flat, "labeling.negative_boost_fraction");
    c.workers = GetSize(flat, "labeling.workers");
    if (c.workers == 0) throw ConfigError("labeling.workers must be at least 1");

    Architecture& a = c.architecture;
    a.kind = ParseModelKind(GetString(flat, "model.kind"));
    a.features = ParseFeatureKind(GetString(flat, "model.features"));
    a.wiring = ParseWiring(GetString(flat, "model.wiring"));
    c.vocab_size = GetSize(flat, "model.vocab_size");
    a.embed_dim = GetSize(flat, "model.embed_dim");
    a.feature_dim = GetSize(flat, "model.feature_dim");
    a.hidden_dim = GetSize(flat, "model.hidden_dim");
    a.head_dim = GetSize(flat, "model.head_dim");
    a.max_len = GetSize(flat, "model.max_len");

    TrainConfig& t = c.train;
    t.learning_rate = GetDouble(flat, "train.learning_rate");
    t.batch_size = GetSize(flat, "train.batch_size");
    t.dropout_rate = GetDouble(flat, "train.dropout");
    t.adam.beta1 = GetDouble(flat, "train.adam_beta1");
    t.adam.beta2 = GetDouble(flat, "train.adam_beta2");
    t.adam.epsilon = GetDouble(flat, "train.adam_epsilon");
    t.max_epochs = GetSize(flat, "train.max_epochs");
    t.patience = GetSize(flat, "train.patience");
    t.seed = c.seed;

    if (!flat.at("loss.beta").is_null()) {
      c.loss_beta = GetDoubles(flat.at("loss.beta"), "loss.beta");
    }
    if (!flat.at("loss.gamma").is_null()) {
      c.loss_gamma = GetDoubles(flat.at("loss.gamma"), "loss.gamma");
    }
    c.threshold = GetDouble(flat, "eval.threshold");
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) {
      throw ConfigError("eval.threshold must lie in [0, 1]");
    }
    t.threshold = c.threshold;
    c.eval_split = GetString(flat, "eval.split");
    SplitFileName(c.eval_split);
    c.eval_scopes = GetStrings(flat, "eval.scopes");
    if (c.eval_scopes.empty()) throw ConfigError("eval.scopes must not be empty");

    c.attribution.steps = GetSize(flat, "attribution.steps");
    c.attribution.target_class = GetString(flat, "attribution.class");
    c.attribution.target = ParseAttributionTarget(GetString(flat, "attribution.target"));
    c.attribution_format = GetString(flat, "attribution.format");
    if (c.attribution_format != "html" && c.attribution_format != "ansi") {
      throw ConfigError("attribution.format must be html or ansi");
    }
    t.Validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }
  return c;
}

PipelineConfig LoadPipelineConfig(
    const std::optional<fs::path>& file,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  return ParsePipelineConfig(ResolveConfigJson(file, overrides));
}

Taxonomy LoadConfiguredTaxonomy(const PipelineConfig& config) {
  if (config.paths.taxonomy.empty()) return DefaultTaxonomy();
  return LoadTaxonomyFile(config.paths.taxonomy);
}

LossConfig ResolveLoss(const PipelineConfig& config, const Taxonomy& taxonomy) {
  const bool bundled = taxonomy.codes() == DefaultTaxonomy().codes();
  const LossConfig fallback = bundled ? LossConfig::GreenPlasticsDefault()
                                      : LossConfig::Uniform(taxonomy.size());
  LossConfig loss;
  loss.beta = config.loss_beta.value_or(fallback.beta);
  loss.gamma = config.loss_gamma.value_or(fallback.gamma);
  loss.Validate(taxonomy.size());
  return loss;
}

std::vector<EvalScope> ResolveScopes(const PipelineConfig& config,
                                     const Taxonomy& taxonomy) {
  std::vector<EvalScope> scopes;
  for (const std::string& entry : config.eval_scopes) {
    if (entry == "whole") {
      scopes.push_back(EvalScope::Whole(taxonomy));
    } else if (entry == "levels") {
      for (int l = 1; l <= taxonomy.max_level(); ++l) {
        scopes.push_back(EvalScope::Level(taxonomy, l));
      }
    } else if (entry == "classes") {
      for (const std::string& code : taxonomy.codes()) {
        scopes.push_back(EvalScope::Single(taxonomy, code));
      }
    } else if (entry.rfind("level ", 0) == 0) {
      int level = 0;
      try {
        level = std::stoi(entry.substr(6));
      } catch (const std::exception&) {
        throw ConfigError("bad eval scope '" + entry + "'");
      }
      scopes.push_back(EvalScope::Level(taxonomy, level));
    } else {
      scopes.push_back(EvalScope::Single(taxonomy, entry));
    }
  }
  return scopes;
}

fs::path CheckpointPath(const PipelineConfig& c) { return c.paths.checkpoint_dir / "model.ckpt"; }
fs::path EpochLogPath(const PipelineConfig& c) {
  return c.paths.checkpoint_dir / "epoch_log.csv";
}
fs::path DatasetReportPath(const PipelineConfig& c) {
  return c.paths.dataset_dir / "dataset_report.txt";
}
fs::path EvalReportPath(const PipelineConfig& c) { return c.paths.report_dir / "eval_report.txt"; }
fs::path CurvesPath(const PipelineConfig& c) { return c.paths.report_dir / "pr_curves.csv"; }
fs::path PredictionsPath(const PipelineConfig& c) {
  return c.paths.report_dir / "predictions.jsonl";
}
fs::path ExplainPath(const PipelineConfig& c, const std::string& id,
                     const std::string& extension) {
  return c.paths.report_dir /
         ("explain_" + SafeName(id) + "_" + SafeName(c.attribution.target_class) + extension);
}

std::string RunLabel(const PipelineConfig& config) {
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  config.labeling.Validate(taxonomy);
  const Labeler labeler(taxonomy, config.labeling);
  CorpusReader reader(config.paths.corpus);

  constexpr size_t kChunk = 4096;
  std::string output;
  size_t labelled = 0;
  size_t positives = 0;
  size_t filtered = 0;
  std::vector<RawPatent> chunk;
  std::vector<std::string> lines;
  std::vector<uint8_t> is_positive;

  auto flush = [&] {
    lines.assign(chunk.size(), std::string());
    is_positive.assign(chunk.size(), 0);
    const size_t workers = std::min(config.workers, std::max<size_t>(chunk.size(), 1));
    // Worker w handles records w, w + workers, ...; results land by index.
    auto work = [&](size_t w) {
      for (size_t i = w; i < chunk.size(); i += workers) {
        if (!FilterPatent(chunk[i])) continue;
        bool positive = false;
        lines[i] = LabelLine(taxonomy, labeler, chunk[i], &positive);
        is_positive[i] = positive ? 1 : 0;
      }
    };
    std::vector<std::thread> threads;
    for (size_t w = 1; w < workers; ++w) threads.emplace_back(work, w);
    work(0);
    for (std::thread& t : threads) t.join();
    for (size_t i = 0; i < chunk.size(); ++i) {
      if (lines[i].empty()) {
        ++filtered;
        continue;
      }
      output += lines[i];
      output += '\n';
      ++labelled;
      positives += is_positive[i];
    }
    chunk.clear();
  };

  while (std::optional<RawPatent> patent = reader.Next()) {
    chunk.push_back(std::move(*patent));
    if (chunk.size() == kChunk) flush();
  }
  flush();
  WriteTextFile(config.paths.labels, output);

  std::ostringstream summary;
  summary << "labelled " << labelled << " documents (" << positives
          << " with at least one class) -> " << config.paths.labels.string() << "\n"
          << "filtered out " << filtered << ", malformed lines " << reader.skipped().size()
          << "\n";
  return summary.str();
}

std::string RunBuildDataset(const PipelineConfig& config) {
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  CorpusReader reader(config.paths.corpus);
  const BuildResult result = BuildDataset(taxonomy, config.labeling, reader);
  WriteDataset(taxonomy, result.split, config.paths.dataset_dir);
  const std::string report = result.report.ToText();
  WriteTextFile(DatasetReportPath(config), report);
  return report;
}

std::string RunTrain(const PipelineConfig& config) {
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  const LossConfig loss = ResolveLoss(config, taxonomy);
  config.train.Validate();
  const DatasetSplit split = ReadDataset(taxonomy, config.paths.dataset_dir);
  Architecture arch = config.architecture;
  arch.SetClasses(taxonomy);
  ValidateArchitecture(arch);
  const std::unique_ptr<ExternalEmbeddings> features = MaybeLoadFeatures(config, arch);

  Model model = InitModel(arch, split.train, config.vocab_size, config.seed);
  TrainResult result =
      Train(std::move(model), split.train, split.validation, config.train, loss, features.get());
  SaveCheckpoint(result.model, CheckpointPath(config));
  WriteTextFile(EpochLogPath(config), EpochLogCsv(result.log));

  std::ostringstream summary;
  summary << "trained " << ModelKindName(arch.kind) << " for " << result.log.size()
          << " epochs; best epoch " << result.best_epoch;
  if (result.best_epoch > 0) {
    summary << " (val loss " << FormatFixed(result.log[result.best_epoch - 1].val_loss, 6)
            << ")";
  }
  summary << "\ncheckpoint -> " << CheckpointPath(config).string() << "\n";
  return summary.str();
}

namespace {

struct Scored {
  std::vector<LabeledExample> examples;
  std::vector<std::vector<double>> probabilities;
  std::vector<LabelVector> truths;
  std::string model_name;
};

Scored ScoreSplit(const PipelineConfig& config, const Taxonomy& taxonomy) {
  const Model model = LoadCompatibleCheckpoint(config, taxonomy);
  const std::unique_ptr<ExternalEmbeddings> features =
      MaybeLoadFeatures(config, model.architecture());
  Scored s;
  s.examples = ReadSplitFile(taxonomy, config.paths.dataset_dir / SplitFileName(config.eval_split));
  if (s.examples.empty()) {
    throw DataError("split '" + config.eval_split + "' is empty");
  }
  s.probabilities = PredictProbabilities(model, s.examples, features.get());
  s.truths = Truths(s.examples);
  s.model_name = ModelKindName(model.architecture().kind);
  return s;
}

}  // namespace

std::string RunEvaluate(const PipelineConfig& config) {
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  const std::vector<EvalScope> scopes = ResolveScopes(config, taxonomy);
  const Scored s = ScoreSplit(config, taxonomy);
  EvalReport report =
      EvaluateScopes(taxonomy, scopes, s.probabilities, s.truths, config.threshold);
  report.model_name = s.model_name;
  const std::string text = report.ToText();
  WriteTextFile(EvalReportPath(config), text);
  fs::path json_path = EvalReportPath(config);
  json_path.replace_extension(".json");
  WriteTextFile(json_path, report.ToJson());
  return text;
}

std::string RunCurves(const PipelineConfig& config) {
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  const std::vector<EvalScope> scopes = ResolveScopes(config, taxonomy);
  const Scored s = ScoreSplit(config, taxonomy);
  WriteTextFile(CurvesPath(config), PrCurvesCsv(taxonomy, scopes, s.probabilities, s.truths));
  return "precision/recall sweep for " + std::to_string(scopes.size()) + " scopes -> " +
         CurvesPath(config).string() + "\n";
}

std::string RunPredict(const PipelineConfig& config, const PredictOptions& options) {
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  const Model model = LoadCompatibleCheckpoint(config, taxonomy);
  const std::unique_ptr<ExternalEmbeddings> features =
      MaybeLoadFeatures(config, model.architecture());

  std::vector<LabeledExample> examples;
  size_t skipped = 0;
  if (options.input_corpus.has_value()) {
    for (const RawPatent& patent : ReadCorpus(*options.input_corpus)) {
      if (!patent.title.has_value() && !patent.abstract.has_value()) {
        ++skipped;
        continue;
      }
      const Document doc = MakeDocument(patent);
      examples.push_back({patent.id, JoinFields(doc, {TextField::kTitle, TextField::kAbstract}),
                          LabelVector(taxonomy.size())});
    }
  } else {
    examples =
        ReadSplitFile(taxonomy, config.paths.dataset_dir / SplitFileName(config.eval_split));
  }
  const std::vector<std::vector<double>> probs =
      PredictProbabilities(model, examples, features.get());

  std::string out;
  for (size_t i = 0; i < examples.size(); ++i) {
    json row = json::object();
    row["id"] = examples[i].id;
    json p = json::object();
    for (size_t c = 0; c < taxonomy.size(); ++c) p[taxonomy.node(c).code] = probs[i][c];
    row["probabilities"] = p;
    row["assigned"] = AssignClasses(model, probs[i], config.threshold);
    out += row.dump();
    out += '\n';
  }
  const fs::path path = options.output.value_or(PredictionsPath(config));
  WriteTextFile(path, out);
  std::string summary = "predicted " + std::to_string(examples.size()) + " documents -> " +
                        path.string() + "\n";
  if (skipped > 0) summary += "skipped " + std::to_string(skipped) + " without text\n";
  return summary;
}

std::string RunExplain(const PipelineConfig& config, const ExplainOptions& options) {
  if (options.id.has_value() == options.text.has_value()) {
    throw ConfigError("explain needs exactly one of --id or --text");
  }
  const Taxonomy taxonomy = LoadConfiguredTaxonomy(config);
  const Model model = LoadCompatibleCheckpoint(config, taxonomy);

  Tokens tokens;
  std::string doc_id;
  if (options.text.has_value()) {
    tokens = Preprocess(*options.text);
    doc_id = "text";
  } else {
    doc_id = *options.id;
    const DatasetSplit split = ReadDataset(taxonomy, config.paths.dataset_dir);
    bool found = false;
    for (const auto* part : {&split.test, &split.validation, &split.train}) {
      for (const LabeledExample& ex : *part) {
        if (ex.id == doc_id) {
          tokens = ex.text_tokens;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) throw DataError("document '" + doc_id + "' is not in the dataset splits");
  }

  const AttributionResult result =
      IntegratedGradients(model, tokens, config.attribution, config.threshold);
  const bool html = config.attribution_format == "html";
  const fs::path report_path = ExplainPath(config, doc_id, html ? ".html" : ".txt");
  WriteTextFile(report_path,
                RenderReport(result, html ? RenderFormat::kHtml : RenderFormat::kAnsi, doc_id));
  WriteTextFile(ExplainPath(config, doc_id, ".csv"), AttributionCsv(result));

  std::ostringstream summary;
  summary << "attribution for " << doc_id << " on " << result.target_class << " ("
          << AttributionTargetName(result.target) << "): sum "
          << FormatFixed(result.completeness.attribution_sum, 6) << ", F(x)-F(0) "
          << FormatFixed(result.completeness.output_difference, 6) << ", relative gap "
          << FormatFixed(result.completeness.relative_gap, 6) << "\n"
          << "report -> " << report_path.string() << "\n";
  return summary.str();
}

std::string RunReport(const PipelineConfig& config) {
  struct Part {
    const char* title;
    fs::path path;
    const char* producer;
  };
  const Part parts[] = {
      {"Dataset", DatasetReportPath(config), "build-dataset"},
      {"Training log", EpochLogPath(config), "train"},
      {"Evaluation", EvalReportPath(config), "evaluate"},
  };
  std::string out = "# Pipeline report\n";
  size_t present = 0;
  for (const Part& part : parts) {
    out += "\n## ";
    out += part.title;
    out += "\n\n";
    const std::string body = ReadIfExists(part.path);
    if (body.empty()) {
      out += std::string("(missing: run `") + part.producer + "`)\n";
      continue;
    }
    ++present;
    out += "```\n" + body + (body.back() == '\n' ? "" : "\n") + "```\n";
  }
  if (present == 0) {
    throw DataError("no pipeline artifacts found; run build-dataset, train and evaluate first");
  }
  const fs::path path = config.paths.report_dir / "report.md";
  WriteTextFile(path, out);
  return out;
}

}  // namespace patcls
