#ifndef PATCLS_CORPUS_H_
#define PATCLS_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace patcls {

struct RawPatent {
  std::string id;
  std::string language;
  std::optional<std::string> title;
  std::optional<std::string> abstract;
  std::optional<std::string> description;
};

using Tokens = std::vector<std::string>;

struct Document {
  std::string id;
  Tokens title_tokens;
  Tokens abstract_tokens;
  Tokens description_tokens;
};

enum class TextField { kTitle, kAbstract, kDescription };

TextField ParseTextField(std::string_view name);
const char* TextFieldName(TextField field);

struct SkippedLine {
  size_t line_number = 0;  // 1-based
  std::string reason;
};

// Single-pass reader over a JSON Lines corpus. Each line is an object with
// string fields id, lang, title, abstract and description (the text fields
// may be absent or null). Malformed lines are skipped and recorded.
class CorpusReader {
 public:
  // Throws DataError when the file cannot be opened.
  explicit CorpusReader(const std::filesystem::path& path);

  // Next valid record in file order. At end of input returns nullopt, or
  // throws DataError if the file held no valid record at all.
  std::optional<RawPatent> Next();

  size_t records_read() const { return records_; }
  const std::vector<SkippedLine>& skipped() const { return skipped_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  size_t line_number_ = 0;
  size_t records_ = 0;
  std::vector<SkippedLine> skipped_;
};

// Parses one JSONL line. Returns nullopt with `reason` set when malformed.
std::optional<RawPatent> ParsePatentLine(std::string_view line,
                                         std::string* reason);

// Whole-file convenience wrapper.
std::vector<RawPatent> ReadCorpus(const std::filesystem::path& path,
                                  std::vector<SkippedLine>* skipped = nullptr);

// English with non-empty title, abstract and description.
bool FilterPatent(const RawPatent& patent);

class Stopwords {
 public:
  // One word per line; '#' starts a comment line.
  static Stopwords Parse(std::string_view text);
  static const Stopwords& Bundled();

  bool contains(std::string_view word) const {
    return words_.count(std::string(word)) > 0;
  }
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

// Lowercases ASCII, deletes hyphens and apostrophes (joining the halves),
// turns every other non-alphanumeric byte into a separator, splits, and
// drops stopwords.
Tokens Preprocess(std::string_view text,
                  const Stopwords& stopwords = Stopwords::Bundled());

Document MakeDocument(const RawPatent& patent,
                      const Stopwords& stopwords = Stopwords::Bundled());

// Concatenation of the requested token fields, in the given order.
Tokens JoinFields(const Document& doc, const std::vector<TextField>& fields);

}  // namespace patcls

#endif  // PATCLS_CORPUS_H_
