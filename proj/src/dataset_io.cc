#include <sstream>

#include "patcls/error.h"
#include "patcls/io.h"
#include "patcls/weaklabel.h"

namespace patcls {

namespace {

std::string QuoteCsv(const std::string& field, bool always) {
  const bool needs = always || field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// RFC 4180 records. Returns false at end of input.
bool NextRecord(std::string_view text, size_t& pos, std::vector<std::string>& fields,
                size_t& line, const std::string& source) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
      break;
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw DataError(source + ": unterminated quoted field near line " +
                    std::to_string(line));
  }
  fields.push_back(std::move(field));
  return true;
}

Tokens SplitTokens(const std::string& text) {
  Tokens out;
  std::istringstream in(text);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

}  // namespace

std::string SplitToCsv(const Taxonomy& taxonomy,
                       const std::vector<LabeledExample>& rows) {
  std::string out = "ID,TITLE_ABSTR";
  for (const auto& node : taxonomy.nodes()) out += "," + QuoteCsv(node.code, false);
  out += "\n";
  for (const auto& row : rows) {
    std::string text;
    for (size_t i = 0; i < row.text_tokens.size(); ++i) {
      if (i > 0) text += ' ';
      text += row.text_tokens[i];
    }
    out += QuoteCsv(row.id, false);
    out += ',';
    out += QuoteCsv(text, true);
    for (size_t c = 0; c < taxonomy.size(); ++c) {
      out += row.label.test(c) ? ",1" : ",0";
    }
    out += "\n";
  }
  return out;
}

std::vector<LabeledExample> SplitFromCsv(const Taxonomy& taxonomy,
                                         std::string_view csv_text,
                                         const std::string& source_name) {
  size_t pos = 0;
  size_t line = 1;
  std::vector<std::string> fields;
  if (!NextRecord(csv_text, pos, fields, line, source_name)) {
    throw DataError(source_name + ": empty file, expected a header row");
  }
  std::vector<std::string> expected = {"ID", "TITLE_ABSTR"};
  for (const auto& node : taxonomy.nodes()) expected.push_back(node.code);
  if (fields.size() != expected.size()) {
    throw DataError(source_name + ": schema mismatch: header has " +
                    std::to_string(fields.size()) + " columns, expected " +
                    std::to_string(expected.size()));
  }
  for (size_t i = 0; i < expected.size(); ++i) {
    if (fields[i] != expected[i]) {
      throw DataError(source_name + ": schema mismatch: column " +
                      std::to_string(i + 1) + " is '" + fields[i] +
                      "', expected '" + expected[i] + "'");
    }
  }
  std::vector<LabeledExample> rows;
  while (true) {
    ++line;
    const size_t record_line = line;
    if (!NextRecord(csv_text, pos, fields, line, source_name)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != expected.size()) {
      throw DataError(source_name + ": line " + std::to_string(record_line) +
                      " has " + std::to_string(fields.size()) +
                      " columns, expected " + std::to_string(expected.size()));
    }
    LabeledExample row;
    row.id = fields[0];
    if (row.id.empty()) {
      throw DataError(source_name + ": line " + std::to_string(record_line) +
                      " has an empty ID");
    }
    row.text_tokens = SplitTokens(fields[1]);
    if (row.text_tokens.empty()) {
      throw DataError(source_name + ": line " + std::to_string(record_line) +
                      " has an empty TITLE_ABSTR");
    }
    row.label = LabelVector(taxonomy.size());
    for (size_t c = 0; c < taxonomy.size(); ++c) {
      const std::string& cellv = fields[2 + c];
      if (cellv != "0" && cellv != "1") {
        throw DataError(source_name + ": line " + std::to_string(record_line) +
                        " column " + expected[2 + c] + ": target '" + cellv +
                        "' is not 0 or 1");
      }
      row.label.set(c, cellv == "1");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteDataset(const Taxonomy& taxonomy, const DatasetSplit& split,
                  const std::filesystem::path& dir) {
  WriteTextFile(dir / "train.csv", SplitToCsv(taxonomy, split.train));
  WriteTextFile(dir / "val.csv", SplitToCsv(taxonomy, split.validation));
  WriteTextFile(dir / "test.csv", SplitToCsv(taxonomy, split.test));
}

std::vector<LabeledExample> ReadSplitFile(const Taxonomy& taxonomy,
                                          const std::filesystem::path& path) {
  return SplitFromCsv(taxonomy, ReadTextFile(path), path.string());
}

DatasetSplit ReadDataset(const Taxonomy& taxonomy,
                         const std::filesystem::path& dir) {
  DatasetSplit split;
  split.train = ReadSplitFile(taxonomy, dir / "train.csv");
  split.validation = ReadSplitFile(taxonomy, dir / "val.csv");
  split.test = ReadSplitFile(taxonomy, dir / "test.csv");
  return split;
}

}  // namespace patcls
