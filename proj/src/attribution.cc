#include "patcls/attribution.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "patcls/error.h"
#include "patcls/io.h"

namespace patcls {

AttributionTarget ParseAttributionTarget(std::string_view name) {
  if (name == "probability") return AttributionTarget::kProbability;
  if (name == "logit") return AttributionTarget::kLogit;
  throw ConfigError("unknown attribution target '" + std::string(name) +
                    "' (expected probability or logit)");
}

const char* AttributionTargetName(AttributionTarget target) {
  return target == AttributionTarget::kProbability ? "probability" : "logit";
}

namespace {

double TargetValue(const Activations& act, size_t c, AttributionTarget target) {
  return target == AttributionTarget::kProbability ? act.probabilities[c] : act.logits[c];
}

}  // namespace

AttributionResult IntegratedGradients(const Model& model, std::span<const std::string> tokens,
                                      const AttributionConfig& config, double threshold) {
  const Architecture& arch = model.architecture();
  if (arch.features != FeatureKind::kToyEncoder) {
    throw ConfigError("attribution needs a toy-encoder checkpoint; external features "
                      "have no token embeddings");
  }
  if (config.steps == 0) throw ConfigError("attribution.steps must be >= 1");
  const auto it = std::find(arch.class_codes.begin(), arch.class_codes.end(),
                            config.target_class);
  if (it == arch.class_codes.end()) {
    throw ConfigError("unknown class '" + config.target_class + "' for attribution");
  }
  const size_t target = static_cast<size_t>(it - arch.class_codes.begin());

  Activations input;
  const std::vector<int> ids = model.EncodeTokens(tokens);
  model.Pool(ids, input);
  model.Project(input);
  model.Classify(input);
  const Activations baseline =
      model.ForwardPooled(std::vector<double>(arch.embed_dim, 0.0));

  // Every token enters through the mean, so dF/dx_t = (1/n) dF/dpooled and
  // all positions share one path-averaged gradient.
  std::vector<double> mean_grad(arch.embed_dim, 0.0);
  ModelParams scratch = model.params().ZerosLike();
  std::vector<double> dlogits(arch.num_classes(), 0.0);
  std::vector<double> dpooled;
  std::vector<double> point(arch.embed_dim);
  for (size_t j = 1; j <= config.steps; ++j) {
    const double alpha = static_cast<double>(j) / static_cast<double>(config.steps);
    for (size_t k = 0; k < point.size(); ++k) point[k] = alpha * input.pooled[k];
    const Activations act = model.ForwardPooled(point);
    const double y = act.probabilities[target];
    std::fill(dlogits.begin(), dlogits.end(), 0.0);
    dlogits[target] = config.target == AttributionTarget::kProbability ? y * (1.0 - y) : 1.0;
    model.Backward(act, dlogits, scratch, &dpooled);
    for (size_t k = 0; k < mean_grad.size(); ++k) mean_grad[k] += dpooled[k];
  }
  const double scale = input.real_tokens > 0
                           ? 1.0 / (static_cast<double>(config.steps) *
                                    static_cast<double>(input.real_tokens))
                           : 0.0;

  AttributionResult result;
  result.target_class = config.target_class;
  result.target = config.target;
  result.class_codes = arch.class_codes;
  result.probabilities = input.probabilities;
  result.assigned = AssignClasses(model, input.probabilities, threshold);
  double sum = 0.0;
  for (size_t pos = 0; pos < ids.size(); ++pos) {
    double score = 0.0;
    if (ids[pos] != Vocabulary::kPad) {
      const auto row = model.params().embedding.row(static_cast<size_t>(ids[pos]));
      for (size_t k = 0; k < row.size(); ++k) score += row[k] * mean_grad[k];
      score *= scale;
    }
    sum += score;
    result.tokens.push_back({tokens[pos], score, pos});
  }
  CompletenessReport& c = result.completeness;
  c.attribution_sum = sum;
  c.output_at_input = TargetValue(input, target, config.target);
  c.output_at_baseline = TargetValue(baseline, target, config.target);
  c.output_difference = c.output_at_input - c.output_at_baseline;
  c.relative_gap = c.output_difference != 0.0
                       ? std::abs(sum - c.output_difference) / std::abs(c.output_difference)
                       : std::abs(sum);
  return result;
}

namespace {

std::string EscapeHtml(std::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double MaxMagnitude(const AttributionResult& result) {
  double max_abs = 0.0;
  for (const auto& t : result.tokens) max_abs = std::max(max_abs, std::abs(t.score));
  return max_abs;
}

std::string Sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string RenderHtml(const AttributionResult& result, const std::string& document_id) {
  const double max_abs = MaxMagnitude(result);
  std::string out;
  out += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>Attribution for class " + EscapeHtml(result.target_class) + "</title>\n";
  out += "<style>\n"
         "body { font-family: sans-serif; max-width: 60em; margin: 2em auto; }\n"
         ".text { line-height: 2; }\n"
         ".tok { padding: 1px 3px; border-radius: 3px; }\n"
         ".neu { background-color: transparent; }\n"
         "table { border-collapse: collapse; }\n"
         "td, th { border: 1px solid #ccc; padding: 2px 8px; text-align: left; }\n"
         "</style>\n</head>\n<body>\n";
  out += "<h1>Integrated gradients for class " + EscapeHtml(result.target_class) + "</h1>\n";
  if (!document_id.empty()) {
    out += "<p>Document: <code>" + EscapeHtml(document_id) + "</code></p>\n";
  }
  out += "<p>Green tokens increase the " + std::string(AttributionTargetName(result.target)) +
         " of class " + EscapeHtml(result.target_class) +
         "; red tokens decrease it.</p>\n";
  out += "<p class=\"text\">\n";
  for (const auto& t : result.tokens) {
    const double a = max_abs > 0.0 ? std::abs(t.score) / max_abs : 0.0;
    std::string klass = "neu";
    std::string style;
    if (t.score > 0.0) {
      klass = "pos";
      style = " style=\"background-color: rgba(0, 160, 0, " + FormatFixed(a, 3) + ")\"";
    } else if (t.score < 0.0) {
      klass = "neg";
      style = " style=\"background-color: rgba(220, 0, 0, " + FormatFixed(a, 3) + ")\"";
    }
    out += "<span class=\"tok " + klass + "\"" + style + " title=\"" + Sci(t.score) + "\">" +
           EscapeHtml(t.token) + "</span>\n";
  }
  out += "</p>\n";
  const CompletenessReport& c = result.completeness;
  out += "<h2>Completeness</h2>\n<table>\n";
  out += "<tr><th>sum of attributions</th><td>" + Sci(c.attribution_sum) + "</td></tr>\n";
  out += "<tr><th>F(x) - F(baseline)</th><td>" + Sci(c.output_difference) + "</td></tr>\n";
  out += "<tr><th>relative gap</th><td>" + Sci(c.relative_gap) + "</td></tr>\n";
  out += "</table>\n";
  out += "<h2>Predicted probabilities</h2>\n<table>\n<tr><th>class</th><th>probability</th>"
         "<th>assigned</th></tr>\n";
  for (size_t i = 0; i < result.class_codes.size(); ++i) {
    const bool assigned = std::find(result.assigned.begin(), result.assigned.end(),
                                    result.class_codes[i]) != result.assigned.end();
    out += "<tr><td>" + EscapeHtml(result.class_codes[i]) + "</td><td>" +
           FormatFixed(result.probabilities[i], 4) + "</td><td>" + (assigned ? "yes" : "no") +
           "</td></tr>\n";
  }
  out += "</table>\n<p>Assigned classes: ";
  if (result.assigned.empty()) out += "none";
  for (size_t i = 0; i < result.assigned.size(); ++i) {
    if (i > 0) out += ", ";
    out += EscapeHtml(result.assigned[i]);
  }
  out += "</p>\n</body>\n</html>\n";
  return out;
}

std::string RenderAnsi(const AttributionResult& result, const std::string& document_id) {
  const double max_abs = MaxMagnitude(result);
  std::string out = "class " + result.target_class;
  if (!document_id.empty()) out += "  document " + document_id;
  out += "\n";
  for (size_t i = 0; i < result.tokens.size(); ++i) {
    const auto& t = result.tokens[i];
    if (i > 0) out += ' ';
    const double a = max_abs > 0.0 ? std::abs(t.score) / max_abs : 0.0;
    if (t.score == 0.0) {
      out += t.token;
      continue;
    }
    int r, g, b;
    if (t.score > 0.0) {
      r = static_cast<int>(std::lround(255 - 255 * a));
      g = static_cast<int>(std::lround(255 - 95 * a));
      b = r;
    } else {
      r = static_cast<int>(std::lround(255 - 35 * a));
      g = static_cast<int>(std::lround(255 - 255 * a));
      b = g;
    }
    out += "\x1b[48;2;" + std::to_string(r) + ";" + std::to_string(g) + ";" +
           std::to_string(b) + "m" + t.token + "\x1b[0m";
  }
  out += "\n";
  for (size_t i = 0; i < result.class_codes.size(); ++i) {
    out += result.class_codes[i] + " " + FormatFixed(result.probabilities[i], 4) + "\n";
  }
  out += "assigned:";
  for (const auto& code : result.assigned) out += " " + code;
  out += "\nrelative completeness gap " + Sci(result.completeness.relative_gap) + "\n";
  return out;
}

}  // namespace

std::string RenderReport(const AttributionResult& result, RenderFormat format,
                         const std::string& document_id) {
  if (result.tokens.empty()) throw DataError("nothing to render: no attributed tokens");
  return format == RenderFormat::kHtml ? RenderHtml(result, document_id)
                                       : RenderAnsi(result, document_id);
}

std::string AttributionCsv(const AttributionResult& result) {
  std::string out = "position,token,score\n";
  char buf[64];
  for (const auto& t : result.tokens) {
    std::snprintf(buf, sizeof(buf), "%.9g", t.score);
    out += std::to_string(t.position) + "," + t.token + "," + buf + "\n";
  }
  return out;
}

}  // namespace patcls
