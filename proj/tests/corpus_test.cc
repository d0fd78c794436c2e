#include "patcls/corpus.h"

#include <gtest/gtest.h>

#include <random>

#include "patcls/error.h"
#include "patcls/io.h"
#include "test_util.h"

namespace patcls {
namespace {

using Toks = std::vector<std::string>;

std::string Record(const std::string& id, const std::string& lang = "en") {
  return R"({"id": ")" + id + R"(", "lang": ")" + lang +
         R"(", "title": "T", "abstract": "A", "description": "D"})";
}

TEST(CorpusReaderTest, ReadsRecordsInOrder) {
  testing::TempDir dir;
  WriteTextFile(dir / "c.jsonl", Record("1") + "\n" + Record("2") + "\n" + Record("3") + "\n");
  CorpusReader reader(dir / "c.jsonl");
  std::vector<std::string> ids;
  while (auto r = reader.Next()) ids.push_back(r->id);
  EXPECT_EQ(ids, (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_TRUE(reader.skipped().empty());
}

TEST(CorpusReaderTest, SkipsAndReportsMalformedLines) {
  testing::TempDir dir;
  WriteTextFile(dir / "c.jsonl",
                Record("1") + "\n{broken\n" + Record("2") + "\n\n" + Record("3") + "\n");
  std::vector<SkippedLine> skipped;
  const std::vector<RawPatent> records = ReadCorpus(dir / "c.jsonl", &skipped);
  EXPECT_EQ(records.size(), 3u);
  ASSERT_EQ(skipped.size(), 1u);
  EXPECT_EQ(skipped[0].line_number, 2u);
  EXPECT_FALSE(skipped[0].reason.empty());
}

TEST(CorpusReaderTest, RecordsWithoutIdAreMalformed) {
  std::string reason;
  EXPECT_FALSE(ParsePatentLine(R"({"lang": "en"})", &reason).has_value());
  EXPECT_FALSE(ParsePatentLine(R"({"id": "", "lang": "en"})", &reason).has_value());
  EXPECT_FALSE(ParsePatentLine(R"([1, 2])", &reason).has_value());
  EXPECT_FALSE(ParsePatentLine(R"({"id": "x", "title": 3})", &reason).has_value());
  const auto ok = ParsePatentLine(R"({"id": "x", "lang": "en", "abstract": null})", &reason);
  ASSERT_TRUE(ok.has_value());
  EXPECT_FALSE(ok->abstract.has_value());
}

TEST(CorpusReaderTest, EmptyFileHasNoValidRecords) {
  testing::TempDir dir;
  WriteTextFile(dir / "empty.jsonl", "");
  try {
    ReadCorpus(dir / "empty.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kData);
    EXPECT_NE(std::string(e.what()).find("no valid records"), std::string::npos);
  }
}

TEST(CorpusReaderTest, MissingFileIsDataError) {
  try {
    CorpusReader reader("/nonexistent/corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kData);
  }
}

TEST(FilterPatentTest, Examples) {
  RawPatent p{"1", "en", "t", "a", "d"};
  EXPECT_TRUE(FilterPatent(p));
  p.language = "de";
  EXPECT_FALSE(FilterPatent(p));
  p.language = "en";
  p.description = "";
  EXPECT_FALSE(FilterPatent(p));
  p.description.reset();
  EXPECT_FALSE(FilterPatent(p));
}

TEST(PreprocessTest, Examples) {
  EXPECT_EQ(Preprocess("Self-healing polymers for recycling"),
            (Toks{"selfhealing", "polymers", "recycling"}));
  EXPECT_TRUE(Preprocess("").empty());
  EXPECT_EQ(Preprocess("The Plastic, the Waste."), (Toks{"plastic", "waste"}));
}

TEST(PreprocessTest, ApostrophesJoinAndNumbersStay) {
  EXPECT_EQ(Preprocess("The polymer's 3 layers"), (Toks{"polymers", "3", "layers"}));
  // U+2019 right single quotation mark and U+2011 non-breaking hyphen.
  EXPECT_EQ(Preprocess("polymer\xE2\x80\x99s bio\xE2\x80\x91" "based"),
            (Toks{"polymers", "biobased"}));
  // Other non-ASCII bytes separate.
  EXPECT_EQ(Preprocess("caf\xC3\xA9 latte"), (Toks{"caf", "latte"}));
  EXPECT_EQ(Preprocess("PET/PE (50:50)"), (Toks{"pet", "pe", "50", "50"}));
}

TEST(PreprocessTest, CustomStopwords) {
  const Stopwords sw = Stopwords::Parse("# comment\nfoo\n\nbar\n");
  EXPECT_EQ(sw.size(), 2u);
  EXPECT_EQ(Preprocess("foo baz BAR the", sw), (Toks{"baz", "the"}));
}

TEST(PreprocessTest, IdempotentAndClean) {
  std::mt19937_64 gen(17);
  const std::string chars = "abcXYZ019 -'.,;:()/\t\n";
  const Stopwords& sw = Stopwords::Bundled();
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const size_t len = gen() % 60;
    for (size_t i = 0; i < len; ++i) text += chars[gen() % chars.size()];
    if (gen() % 3 == 0) text += " the and of";
    const Toks once = Preprocess(text);
    std::string joined;
    for (const std::string& t : once) {
      EXPECT_FALSE(t.empty());
      EXPECT_FALSE(sw.contains(t));
      for (char c : t) EXPECT_TRUE((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) << t;
      joined += t + " ";
    }
    EXPECT_EQ(Preprocess(joined), once);
  }
}

TEST(DocumentTest, MakeDocumentAndJoinFields) {
  const RawPatent p{"7", "en", "Green Plastic", "A plastic bottle", std::nullopt};
  const Document d = MakeDocument(p);
  EXPECT_EQ(d.id, "7");
  EXPECT_EQ(d.title_tokens, (Toks{"green", "plastic"}));
  EXPECT_TRUE(d.description_tokens.empty());
  EXPECT_EQ(JoinFields(d, {TextField::kTitle, TextField::kAbstract}),
            (Toks{"green", "plastic", "plastic", "bottle"}));
  EXPECT_EQ(JoinFields(d, {TextField::kAbstract}), (Toks{"plastic", "bottle"}));
}

TEST(DocumentTest, TextFieldNames) {
  for (TextField f : {TextField::kTitle, TextField::kAbstract, TextField::kDescription}) {
    EXPECT_EQ(ParseTextField(TextFieldName(f)), f);
  }
  EXPECT_THROW(ParseTextField("claims"), Error);
}

TEST(SampleCorpusTest, BundledCorpusIsReadable) {
  std::vector<SkippedLine> skipped;
  const std::vector<RawPatent> records =
      ReadCorpus(testing::kDataDir / "sample_corpus.jsonl", &skipped);
  EXPECT_EQ(records.size(), 200u);
  EXPECT_EQ(skipped.size(), 1u);
  size_t kept = 0;
  for (const RawPatent& r : records) kept += FilterPatent(r);
  EXPECT_EQ(kept, 193u);
}

}  // namespace
}  // namespace patcls
