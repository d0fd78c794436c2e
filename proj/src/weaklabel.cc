#include "patcls/weaklabel.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "patcls/error.h"
#include "patcls/rng.h"

namespace patcls {

void LabelingConfig::Validate(const Taxonomy& taxonomy) const {
  if (k == 0) throw ConfigError("labeling.k must be at least 1");
  for (const auto& [code, threshold] : k_per_class) {
    if (!taxonomy.Find(code)) {
      throw ConfigError("labeling.k_per_class names unknown class '" + code +
                        "'");
    }
    if (threshold == 0) {
      throw ConfigError("labeling.k_per_class[" + code + "] must be >= 1");
    }
  }
  if (fields_to_scan.empty()) {
    throw ConfigError("labeling.fields must name at least one field");
  }
  if (!(negative_ratio > 0.0) || !std::isfinite(negative_ratio)) {
    throw ConfigError("labeling.negative_ratio must be positive");
  }
  double sum = 0.0;
  for (double f : split_fractions) {
    if (!(f > 0.0)) throw ConfigError("labeling.split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("labeling.split fractions must sum to 1");
  }
  if (negative_boost_fraction < 0.0 || negative_boost_fraction > 1.0) {
    throw ConfigError("labeling.negative_boost_fraction must lie in [0, 1]");
  }
}

size_t LabelingConfig::ThresholdFor(const std::string& code) const {
  auto it = k_per_class.find(code);
  return it == k_per_class.end() ? k : it->second;
}

Labeler::Labeler(const Taxonomy& taxonomy, LabelingConfig config)
    : taxonomy_(&taxonomy), config_(std::move(config)) {
  config_.Validate(taxonomy);
  for (const auto& node : taxonomy.nodes()) {
    try {
      queries_.push_back(ParseQuery(node.query_source));
    } catch (const QueryParseError& e) {
      throw ConfigError("query of class '" + node.code + "': " + e.what());
    }
    thresholds_.push_back(config_.ThresholdFor(node.code));
  }
  if (!config_.negative_boost_query.empty()) {
    try {
      boost_query_ = ParseQuery(config_.negative_boost_query);
    } catch (const QueryParseError& e) {
      throw ConfigError(std::string("negative boost query: ") + e.what());
    }
  }
}

std::vector<size_t> Labeler::DirectClasses(const Document& doc) const {
  const Tokens scan = JoinFields(doc, config_.fields_to_scan);
  std::vector<size_t> direct;
  for (size_t c = 0; c < queries_.size(); ++c) {
    if (CountAtLeast(*queries_[c], scan, thresholds_[c])) direct.push_back(c);
  }
  return direct;
}

LabelVector Labeler::Label(const Document& doc) const {
  return taxonomy_->PropagateIndices(DirectClasses(doc));
}

bool Labeler::MatchesBoostQuery(const Document& doc) const {
  if (!boost_query_) return false;
  return CountAtLeast(*boost_query_, JoinFields(doc, config_.fields_to_scan), 1);
}

namespace {

struct Candidate {
  double key;
  size_t order;
  bool boost;
  LabeledExample example;
};

// Smallest-key selection; equivalent in distribution to reservoir sampling.
void TakeSmallest(std::vector<Candidate>& pool, size_t count,
                  std::vector<Candidate>& out) {
  count = std::min(count, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + count, pool.end(),
                    [](const Candidate& a, const Candidate& b) {
                      return a.key != b.key ? a.key < b.key : a.order < b.order;
                    });
  for (size_t i = 0; i < count; ++i) out.push_back(std::move(pool[i]));
  pool.erase(pool.begin(), pool.begin() + count);
}

void Tally(const std::vector<LabeledExample>& rows, size_t num_classes,
           std::vector<ClassCounts>& counts) {
  counts.assign(num_classes, ClassCounts{});
  for (const auto& row : rows) {
    for (size_t c = 0; c < num_classes; ++c) {
      if (row.label.test(c)) {
        ++counts[c].positive;
      } else {
        ++counts[c].negative;
      }
    }
  }
}

}  // namespace

LabelingReport CountSplits(const Taxonomy& taxonomy, const DatasetSplit& split) {
  LabelingReport report;
  report.class_codes = taxonomy.codes();
  const std::vector<LabeledExample>* parts[3] = {&split.train, &split.validation,
                                                 &split.test};
  for (size_t s = 0; s < 3; ++s) {
    Tally(*parts[s], taxonomy.size(), report.per_split[s]);
    report.split_sizes[s] = parts[s]->size();
  }
  return report;
}

BuildResult BuildDataset(const Taxonomy& taxonomy, const LabelingConfig& config,
                         const PatentSource& source) {
  const Labeler labeler(taxonomy, config);
  Rng rng(config.seed);

  std::vector<LabeledExample> positives;
  std::vector<Candidate> boosted;
  std::vector<Candidate> ordinary;
  LabelingReport stats;
  size_t order = 0;
  while (auto patent = source()) {
    ++stats.records_read;
    if (!FilterPatent(*patent)) {
      ++stats.filtered_out;
      continue;
    }
    const Document doc = MakeDocument(*patent);
    LabeledExample example;
    example.id = doc.id;
    example.text_tokens = JoinFields(doc, {TextField::kTitle, TextField::kAbstract});
    if (example.text_tokens.empty()) {
      ++stats.empty_input;
      continue;
    }
    example.label = labeler.Label(doc);
    if (example.label.any()) {
      positives.push_back(std::move(example));
      continue;
    }
    // One key per negative, drawn in input order.
    const bool boost = labeler.MatchesBoostQuery(doc);
    Candidate candidate{rng.UniformUnit(), order++, boost, std::move(example)};
    if (boost) {
      boosted.push_back(std::move(candidate));
    } else {
      ordinary.push_back(std::move(candidate));
    }
  }
  if (positives.empty()) {
    throw DataError("no positive documents after labeling " +
                    std::to_string(stats.records_read) +
                    " records; check the taxonomy queries and --fields");
  }

  stats.positives = positives.size();
  stats.boost_negatives_available = boosted.size();
  stats.negatives_available = boosted.size() + ordinary.size();
  stats.negatives_target = static_cast<size_t>(
      std::floor(config.negative_ratio * static_cast<double>(positives.size())));

  std::vector<Candidate> chosen;
  const size_t boost_quota = static_cast<size_t>(std::floor(
      config.negative_boost_fraction * static_cast<double>(stats.negatives_target)));
  TakeSmallest(boosted, boost_quota, chosen);
  std::vector<Candidate> rest = std::move(ordinary);
  for (auto& c : boosted) rest.push_back(std::move(c));
  const size_t before = chosen.size();
  TakeSmallest(rest, stats.negatives_target - std::min(before, stats.negatives_target),
               chosen);
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& a, const Candidate& b) { return a.order < b.order; });
  stats.negatives_sampled = chosen.size();
  stats.boost_negatives_sampled = static_cast<size_t>(std::count_if(
      chosen.begin(), chosen.end(), [](const Candidate& c) { return c.boost; }));

  std::vector<LabeledExample> pool = std::move(positives);
  for (auto& c : chosen) pool.push_back(std::move(c.example));
  rng.Shuffle(std::span<LabeledExample>(pool));

  const double n = static_cast<double>(pool.size());
  const size_t n_train =
      static_cast<size_t>(std::llround(config.split_fractions[0] * n));
  const size_t n_val =
      static_cast<size_t>(std::llround(config.split_fractions[1] * n));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= pool.size()) {
    throw DataError("split fractions are infeasible for a pool of " +
                    std::to_string(pool.size()) + " documents");
  }
  BuildResult result;
  auto first = std::make_move_iterator(pool.begin());
  result.split.train.assign(first, first + n_train);
  result.split.validation.assign(first + n_train, first + n_train + n_val);
  result.split.test.assign(first + n_train + n_val,
                           std::make_move_iterator(pool.end()));

  LabelingReport report = CountSplits(taxonomy, result.split);
  report.records_read = stats.records_read;
  report.filtered_out = stats.filtered_out;
  report.empty_input = stats.empty_input;
  report.positives = stats.positives;
  report.negatives_available = stats.negatives_available;
  report.boost_negatives_available = stats.boost_negatives_available;
  report.negatives_target = stats.negatives_target;
  report.negatives_sampled = stats.negatives_sampled;
  report.boost_negatives_sampled = stats.boost_negatives_sampled;
  result.report = std::move(report);
  return result;
}

BuildResult BuildDataset(const Taxonomy& taxonomy, const LabelingConfig& config,
                         CorpusReader& reader) {
  BuildResult result =
      BuildDataset(taxonomy, config, [&reader] { return reader.Next(); });
  result.report.malformed_lines = reader.skipped().size();
  return result;
}

BuildResult BuildDataset(const Taxonomy& taxonomy, const LabelingConfig& config,
                         const std::vector<RawPatent>& records) {
  size_t next = 0;
  return BuildDataset(taxonomy, config, [&]() -> std::optional<RawPatent> {
    if (next >= records.size()) return std::nullopt;
    return records[next++];
  });
}

std::string LabelingReport::ToText() const {
  std::ostringstream out;
  size_t width = 5;
  for (const auto& code : class_codes) width = std::max(width, code.size());
  auto cell = [](size_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %8zu", v);
    return std::string(buf);
  };
  auto pad = [&](const std::string& s) {
    return s + std::string(width - std::min(width, s.size()), ' ');
  };
  out << pad("Class");
  for (const char* name : {"train", "val", "test"}) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), " |%8s+%8s-", name, name);
    out << buf;
  }
  out << "\n" << std::string(width, '-');
  for (int s = 0; s < 3; ++s) out << "-+" << std::string(18, '-');
  out << "\n";
  for (size_t c = 0; c < class_codes.size(); ++c) {
    out << pad(class_codes[c]);
    for (size_t s = 0; s < 3; ++s) {
      const ClassCounts counts =
          c < per_split[s].size() ? per_split[s][c] : ClassCounts{};
      out << " |" << cell(counts.positive) << cell(counts.negative);
    }
    out << "\n";
  }
  out << pad("Total");
  for (size_t s = 0; s < 3; ++s) out << " |" << cell(split_sizes[s]) << std::string(9, ' ');
  out << "\n\n";
  out << "records_read " << records_read << "\n"
      << "malformed_lines " << malformed_lines << "\n"
      << "filtered_out " << filtered_out << "\n"
      << "empty_input " << empty_input << "\n"
      << "positives " << positives << "\n"
      << "negatives_available " << negatives_available << "\n"
      << "boost_negatives_available " << boost_negatives_available << "\n"
      << "negatives_target " << negatives_target << "\n"
      << "negatives_sampled " << negatives_sampled << "\n"
      << "boost_negatives_sampled " << boost_negatives_sampled << "\n";
  return out.str();
}

}  // namespace patcls
