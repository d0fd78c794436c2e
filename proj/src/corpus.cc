#include "patcls/corpus.h"

#include <cctype>

#include "embedded_data.h"
#include "json.hpp"
#include "patcls/error.h"

namespace patcls {

TextField ParseTextField(std::string_view name) {
  if (name == "title") return TextField::kTitle;
  if (name == "abstract") return TextField::kAbstract;
  if (name == "description") return TextField::kDescription;
  throw ConfigError("unknown text field '" + std::string(name) +
                    "' (expected title, abstract or description)");
}

const char* TextFieldName(TextField field) {
  switch (field) {
    case TextField::kTitle:
      return "title";
    case TextField::kAbstract:
      return "abstract";
    case TextField::kDescription:
      return "description";
  }
  return "?";
}

std::optional<RawPatent> ParsePatentLine(std::string_view line,
                                         std::string* reason) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    *reason = "invalid JSON";
    return std::nullopt;
  }
  if (!j.is_object()) {
    *reason = "not a JSON object";
    return std::nullopt;
  }
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    *reason = "missing or empty 'id'";
    return std::nullopt;
  }
  RawPatent patent;
  patent.id = id->get<std::string>();
  auto lang = j.find("lang");
  if (lang != j.end() && !lang->is_null()) {
    if (!lang->is_string()) {
      *reason = "'lang' is not a string";
      return std::nullopt;
    }
    patent.language = lang->get<std::string>();
  }
  for (auto [key, slot] : {std::pair{"title", &patent.title},
                           std::pair{"abstract", &patent.abstract},
                           std::pair{"description", &patent.description}}) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) continue;
    if (!it->is_string()) {
      *reason = std::string("'") + key + "' is not a string";
      return std::nullopt;
    }
    *slot = it->get<std::string>();
  }
  return patent;
}

CorpusReader::CorpusReader(const std::filesystem::path& path)
    : path_(path), in_(path) {
  if (!in_) throw DataError("cannot read corpus file " + path.string());
}

std::optional<RawPatent> CorpusReader::Next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::string reason;
    if (auto patent = ParsePatentLine(line, &reason)) {
      ++records_;
      return patent;
    }
    skipped_.push_back({line_number_, reason});
  }
  if (records_ == 0) {
    throw DataError("no valid records in corpus " + path_.string() + " (" +
                    std::to_string(skipped_.size()) + " malformed lines)");
  }
  return std::nullopt;
}

std::vector<RawPatent> ReadCorpus(const std::filesystem::path& path,
                                  std::vector<SkippedLine>* skipped) {
  CorpusReader reader(path);
  std::vector<RawPatent> out;
  while (auto patent = reader.Next()) out.push_back(std::move(*patent));
  if (skipped) *skipped = reader.skipped();
  return out;
}

bool FilterPatent(const RawPatent& patent) {
  auto present = [](const std::optional<std::string>& field) {
    return field && !field->empty();
  };
  return patent.language == "en" && present(patent.title) &&
         present(patent.abstract) && present(patent.description);
}

Stopwords Stopwords::Parse(std::string_view text) {
  Stopwords out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    if (!line.empty() && line.front() != '#') out.words_.emplace(line);
    pos = eol + 1;
  }
  return out;
}

const Stopwords& Stopwords::Bundled() {
  static const Stopwords kBundled = Parse(embedded::Stopwords());
  return kBundled;
}

namespace {

// UTF-8 encodings of U+2010, U+2011 (hyphens) and U+2018, U+2019 (quotes),
// all deleted like their ASCII counterparts.
bool IsJoinerSequence(std::string_view text, size_t i) {
  if (i + 2 >= text.size() || static_cast<unsigned char>(text[i]) != 0xE2 ||
      static_cast<unsigned char>(text[i + 1]) != 0x80) {
    return false;
  }
  const unsigned char last = text[i + 2];
  return last == 0x90 || last == 0x91 || last == 0x98 || last == 0x99;
}

}  // namespace

Tokens Preprocess(std::string_view text, const Stopwords& stopwords) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.contains(current)) {
      out.push_back(current);
    }
    current.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const unsigned char c = text[i];
    if (c == '-' || c == '\'') continue;
    if (c >= 0x80 && IsJoinerSequence(text, i)) {
      i += 2;
      continue;
    }
    if (c < 0x80 && std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Document MakeDocument(const RawPatent& patent, const Stopwords& stopwords) {
  Document doc;
  doc.id = patent.id;
  if (patent.title) doc.title_tokens = Preprocess(*patent.title, stopwords);
  if (patent.abstract) {
    doc.abstract_tokens = Preprocess(*patent.abstract, stopwords);
  }
  if (patent.description) {
    doc.description_tokens = Preprocess(*patent.description, stopwords);
  }
  return doc;
}

Tokens JoinFields(const Document& doc, const std::vector<TextField>& fields) {
  Tokens out;
  for (TextField field : fields) {
    const Tokens& src = field == TextField::kTitle      ? doc.title_tokens
                        : field == TextField::kAbstract ? doc.abstract_tokens
                                                        : doc.description_tokens;
    out.insert(out.end(), src.begin(), src.end());
  }
  return out;
}

}  // namespace patcls
