// Command-line front end for the patent classification pipeline.

#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "patcls/error.h"
#include "patcls/pipeline.h"

namespace {

// Errors are reported on one line so scripts can split on ": ".
std::string OneLine(std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return message;
}

int Fail(const char* category, const std::string& message, int code) {
  std::cerr << "error: " << category << ": " << OneLine(message) << "\n";
  return code;
}

std::vector<std::pair<std::string, std::string>> SplitOverrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    const size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw patcls::ConfigError("--set expects key=value, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

std::string FieldsJson(const std::string& csv) {
  std::string out = "[";
  size_t start = 0;
  while (start <= csv.size()) {
    size_t comma = csv.find(',', start);
    if (comma == std::string::npos) comma = csv.size();
    if (out.size() > 1) out += ",";
    out += "\"" + csv.substr(start, comma - start) + "\"";
    start = comma + 1;
  }
  return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weakly supervised hierarchical patent classification pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(patcls::ConfigKeysHelp());

  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::optional<uint64_t> seed;
  std::optional<std::string> fields;
  std::optional<size_t> workers;
  app.add_option("-c,--config", config_path, "pipeline configuration file (JSON)");
  app.add_option("--set", sets, "override a config key, e.g. --set train.max_epochs=5")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--seed", seed, "global seed (same as --set seed=N)");
  app.add_option("--fields", fields,
                 "comma-separated fields scanned by the queries (labeling.fields)");
  app.add_option("--workers", workers, "labeling threads (labeling.workers)");

  CLI::App* label = app.add_subcommand("label", "apply the class queries to every document");
  CLI::App* build =
      app.add_subcommand("build-dataset", "label, sample negatives, shuffle and split");
  CLI::App* train = app.add_subcommand("train", "fit the classifier and save a checkpoint");
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "hierarchical scores for the configured scopes");
  CLI::App* predict = app.add_subcommand("predict", "class probabilities per document");
  CLI::App* explain = app.add_subcommand("explain", "integrated-gradients token attribution");
  CLI::App* curves = app.add_subcommand("curves", "precision/recall threshold sweep");
  CLI::App* report = app.add_subcommand("report", "collect the pipeline reports");

  patcls::PredictOptions predict_options;
  std::optional<std::string> predict_input;
  std::optional<std::string> predict_output;
  predict->add_option("--input", predict_input, "JSONL corpus to score (default: eval split)");
  predict->add_option("--output", predict_output, "output JSONL path");

  patcls::ExplainOptions explain_options;
  std::optional<std::string> explain_class;
  std::optional<std::string> explain_format;
  explain->add_option("--id", explain_options.id, "document id from the dataset splits");
  explain->add_option("--text", explain_options.text, "raw text to explain");
  explain->add_option("--class", explain_class, "class to attribute (attribution.class)");
  explain->add_option("--format", explain_format, "html or ansi (attribution.format)");

  std::optional<std::string> eval_split;
  for (CLI::App* sub : {evaluate, curves, predict}) {
    sub->add_option("--split", eval_split, "train, val or test (eval.split)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("config_error", e.what(), patcls::ExitCode(patcls::ErrorCategory::kConfig));
  }

  try {
    auto overrides = SplitOverrides(sets);
    if (seed) overrides.emplace_back("seed", std::to_string(*seed));
    if (fields) overrides.emplace_back("labeling.fields", FieldsJson(*fields));
    if (workers) overrides.emplace_back("labeling.workers", std::to_string(*workers));
    if (explain_class) overrides.emplace_back("attribution.class", *explain_class);
    if (explain_format) overrides.emplace_back("attribution.format", *explain_format);
    if (eval_split) overrides.emplace_back("eval.split", *eval_split);

    std::optional<std::filesystem::path> file;
    if (config_path) file = *config_path;
    const patcls::PipelineConfig config = patcls::LoadPipelineConfig(file, overrides);

    std::string out;
    if (label->parsed()) {
      out = patcls::RunLabel(config);
    } else if (build->parsed()) {
      out = patcls::RunBuildDataset(config);
    } else if (train->parsed()) {
      out = patcls::RunTrain(config);
    } else if (evaluate->parsed()) {
      out = patcls::RunEvaluate(config);
    } else if (predict->parsed()) {
      if (predict_input) predict_options.input_corpus = *predict_input;
      if (predict_output) predict_options.output = *predict_output;
      out = patcls::RunPredict(config, predict_options);
    } else if (explain->parsed()) {
      out = patcls::RunExplain(config, explain_options);
    } else if (curves->parsed()) {
      out = patcls::RunCurves(config);
    } else if (report->parsed()) {
      out = patcls::RunReport(config);
    }
    std::cout << out;
    return 0;
  } catch (const patcls::Error& e) {
    return Fail(patcls::CategoryName(e.category()), e.what(), patcls::ExitCode(e.category()));
  } catch (const std::exception& e) {
    return Fail("internal_error", e.what(), 1);
  }
}
