#ifndef PATCLS_WEAKLABEL_H_
#define PATCLS_WEAKLABEL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patcls/corpus.h"
#include "patcls/query.h"
#include "patcls/taxonomy.h"

namespace patcls {

struct LabelingConfig {
  size_t k = 1;                              // global match threshold
  std::map<std::string, size_t> k_per_class;  // overrides by class code
  std::vector<TextField> fields_to_scan = {TextField::kDescription};
  double negative_ratio = 2.0;
  std::array<double, 3> split_fractions = {0.8, 0.1, 0.1};
  uint64_t seed = 7;
  // Negatives matching this query are kept preferentially; empty disables.
  std::string negative_boost_query = "plastic+";
  double negative_boost_fraction = 0.25;

  // Throws ConfigError on k == 0, non-positive ratio, fractions that are
  // not positive or do not sum to one, or an unknown per-class code.
  void Validate(const Taxonomy& taxonomy) const;
  size_t ThresholdFor(const std::string& code) const;
};

struct LabeledExample {
  std::string id;
  Tokens text_tokens;  // title followed by abstract
  LabelVector label;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;

  friend bool operator==(const DatasetSplit&, const DatasetSplit&) = default;
};

// Applies each class query to a document and closes the hits under
// ancestry. All queries are parsed up front.
class Labeler {
 public:
  Labeler(const Taxonomy& taxonomy, LabelingConfig config);

  LabelVector Label(const Document& doc) const;
  // Classes whose own query fired, before propagation.
  std::vector<size_t> DirectClasses(const Document& doc) const;
  bool MatchesBoostQuery(const Document& doc) const;

  const Taxonomy& taxonomy() const { return *taxonomy_; }
  const LabelingConfig& config() const { return config_; }

 private:
  const Taxonomy* taxonomy_;
  LabelingConfig config_;
  std::vector<QueryPtr> queries_;
  std::vector<size_t> thresholds_;
  QueryPtr boost_query_;
};

struct ClassCounts {
  size_t positive = 0;
  size_t negative = 0;
};

struct LabelingReport {
  std::vector<std::string> class_codes;
  // [split][class], split order train, validation, test.
  std::array<std::vector<ClassCounts>, 3> per_split;
  std::array<size_t, 3> split_sizes = {0, 0, 0};

  size_t records_read = 0;
  size_t malformed_lines = 0;
  size_t filtered_out = 0;       // non-English or missing content
  size_t empty_input = 0;        // title+abstract empty after preprocessing
  size_t positives = 0;
  size_t negatives_available = 0;
  size_t boost_negatives_available = 0;
  size_t negatives_target = 0;
  size_t negatives_sampled = 0;
  size_t boost_negatives_sampled = 0;

  // Table-style text: one row per class with +/- per split, then totals.
  std::string ToText() const;
};

struct BuildResult {
  DatasetSplit split;
  LabelingReport report;
};

using PatentSource = std::function<std::optional<RawPatent>()>;

// Labels every record, keeps all positives, samples
// floor(negative_ratio * positives) negatives, shuffles and splits.
// Throws DataError when there are no positives or a split would be empty.
BuildResult BuildDataset(const Taxonomy& taxonomy, const LabelingConfig& config,
                         const PatentSource& source);
BuildResult BuildDataset(const Taxonomy& taxonomy, const LabelingConfig& config,
                         CorpusReader& reader);
BuildResult BuildDataset(const Taxonomy& taxonomy, const LabelingConfig& config,
                         const std::vector<RawPatent>& records);

LabelingReport CountSplits(const Taxonomy& taxonomy, const DatasetSplit& split);

// CSV: header ID,TITLE_ABSTR,<class codes in taxonomy order>, one 0/1 column
// per class, TITLE_ABSTR is the space-joined token list.
std::string SplitToCsv(const Taxonomy& taxonomy,
                       const std::vector<LabeledExample>& rows);
std::vector<LabeledExample> SplitFromCsv(const Taxonomy& taxonomy,
                                         std::string_view csv_text,
                                         const std::string& source_name = "csv");

void WriteDataset(const Taxonomy& taxonomy, const DatasetSplit& split,
                  const std::filesystem::path& dir);
DatasetSplit ReadDataset(const Taxonomy& taxonomy,
                         const std::filesystem::path& dir);
std::vector<LabeledExample> ReadSplitFile(const Taxonomy& taxonomy,
                                          const std::filesystem::path& path);

}  // namespace patcls

#endif  // PATCLS_WEAKLABEL_H_
