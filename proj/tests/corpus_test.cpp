#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "depscan/corpus.hpp"
#include "depscan/error.hpp"

using namespace depscan;

namespace {

Document transcript(std::string id, std::optional<Label> label, std::string text = "some words") {
  Document d;
  d.id = std::move(id);
  d.text = std::move(text);
  d.label = label;
  return d;
}

ErrorKind load_error(const std::string& text, std::optional<std::size_t>* line = nullptr) {
  std::istringstream in(text);
  try {
    load_corpus(in);
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST(LoadCorpus, ParsesRecords) {
  std::istringstream in(
      R"({"id":"t1","kind":"transcript","text":"Hello there","label":"depressive","category":"depression","tags":["sad songs"]})"
      "\n\n"
      R"({"id":"c1","kind":"comment","text":"so true","video_id":"t1","timestamp":"2024-03-01T10:00:00Z"})"
      "\n");
  const auto result = load_corpus(in);
  ASSERT_EQ(result.documents.size(), 2u);
  const auto& t = result.documents[0];
  EXPECT_EQ(t.kind, DocumentKind::transcript);
  EXPECT_EQ(t.label, Label::depressive);
  EXPECT_EQ(t.category, "depression");
  EXPECT_EQ(t.tags, std::vector<std::string>{"sad songs"});
  const auto& c = result.documents[1];
  EXPECT_EQ(c.kind, DocumentKind::comment);
  EXPECT_EQ(c.video_id, "t1");
  EXPECT_EQ(format_timestamp(*c.timestamp), "2024-03-01T10:00:00Z");
  EXPECT_FALSE(c.label.has_value());
}

TEST(LoadCorpus, StrictErrorsCarryLineNumbers) {
  std::optional<std::size_t> line;
  EXPECT_EQ(load_error("{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"x\"}\nnot json\n", &line),
            ErrorKind::parse_error);
  EXPECT_EQ(line, 2u);
  EXPECT_EQ(load_error(R"({"id":"a","kind":"comment","text":"x"})"), ErrorKind::parse_error);
  EXPECT_EQ(load_error(R"({"id":"a","kind":"video","text":"x"})"), ErrorKind::parse_error);
  EXPECT_EQ(load_error(R"({"id":"a","kind":"transcript","text":"x","label":"maybe"})"),
            ErrorKind::parse_error);
  EXPECT_EQ(load_error(R"({"id":"a","kind":"transcript"})"), ErrorKind::parse_error);
}

TEST(LoadCorpus, DuplicateIdsAlwaysFail) {
  const std::string text =
      "{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"x\"}\n"
      "{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"y\"}\n";
  EXPECT_EQ(load_error(text), ErrorKind::duplicate_id);
  std::istringstream in(text);
  EXPECT_THROW(load_corpus(in, false), Error);
}

TEST(LoadCorpus, LenientModeSkipsAndReports) {
  std::istringstream in(
      "{\"id\":\"a\",\"kind\":\"transcript\",\"text\":\"x\"}\n"
      "{broken\n"
      "{\"id\":\"b\",\"kind\":\"transcript\",\"text\":\"y\"}\n");
  const auto result = load_corpus(in, false);
  EXPECT_EQ(result.documents.size(), 2u);
  ASSERT_EQ(result.diagnostics.size(), 1u);
  EXPECT_EQ(result.diagnostics[0].line, 2u);
}

TEST(LoadCorpus, WriteLoadRoundTripIsFieldIdentical) {
  std::vector<Document> docs;
  for (int i = 0; i < 20; ++i) {
    Document d = transcript("doc" + std::to_string(i),
                            i % 3 == 0 ? std::nullopt : std::optional(i % 2 ? Label::depressive : Label::non_depressive),
                            "Text number " + std::to_string(i) + " with \"quotes\" and ünïcode");
    if (i % 4 == 0) {
      d.kind = DocumentKind::comment;
      d.video_id = "doc1";
      d.timestamp = parse_timestamp("2024-01-0" + std::to_string(1 + i % 9) + "T00:00:00Z");
    }
    if (i % 5 == 0) d.tags = {"a", "b c"};
    if (i % 2 == 0) d.title = "title";
    if (i % 7 == 0) d.query = "query";
    if (i % 3 == 1) d.category = "funny";
    docs.push_back(d);
  }
  std::stringstream buf;
  write_corpus(docs, buf);
  const auto first = load_corpus(buf).documents;
  EXPECT_EQ(first, docs);
  std::stringstream again;
  write_corpus(first, again);
  std::stringstream original;
  write_corpus(docs, original);
  EXPECT_EQ(again.str(), original.str());
}

TEST(KeywordLabel, FirstMatchingRuleWins) {
  const auto rules = default_keyword_rules();
  Document d = transcript("v", std::nullopt);
  d.tags = {"Sad Songs", "music"};
  const auto labelled = keyword_label(d, rules);
  EXPECT_EQ(labelled.label, Label::depressive);
  EXPECT_EQ(labelled.category, "depression");
  EXPECT_EQ(labelled.text, d.text);

  Document funny = transcript("f", std::nullopt);
  funny.tags = {"best prank ever"};
  EXPECT_EQ(keyword_label(funny, rules).category, "funny");
  EXPECT_EQ(keyword_label(funny, rules).label, Label::non_depressive);
}

TEST(KeywordLabel, NoMatchLeavesDocumentUnchanged) {
  Document d = transcript("v", std::nullopt);
  d.tags = {"sadness"};
  d.title = "depression talk";
  EXPECT_EQ(keyword_label(d, default_keyword_rules()), d);
  const std::vector<KeywordRule> by_title{
      make_rule(Label::depressive, std::nullopt, {"Depression"}, MatchField::title)};
  EXPECT_EQ(keyword_label(d, by_title).label, Label::depressive);
}

TEST(KeywordLabel, RulesJsonRoundTrip) {
  const auto rules = default_keyword_rules();
  const auto doc = to_json(rules);
  EXPECT_EQ(to_json(keyword_rules_from_json(doc)), doc);
  EXPECT_THROW(make_rule(Label::depressive, std::nullopt, {}, MatchField::tags), Error);
}

TEST(KeywordLabel, ShippedRulesMatchBuiltIn) {
  std::ifstream in(DEPSCAN_DATA_DIR "/default_keyword_rules.json");
  ASSERT_TRUE(in);
  EXPECT_EQ(to_json(keyword_rules_from_json(nlohmann::json::parse(in))),
            to_json(default_keyword_rules()));
}

TEST(Split, StratifiedAndDeterministic) {
  std::vector<Document> docs;
  for (int i = 0; i < 30; ++i) docs.push_back(transcript("d" + std::to_string(i), Label::depressive));
  for (int i = 0; i < 10; ++i) docs.push_back(transcript("n" + std::to_string(i), Label::non_depressive));
  docs.push_back(transcript("u", std::nullopt));
  const auto s = split(docs, 0.3, 42);
  std::size_t dep_test = 0;
  for (const auto& d : s.test) dep_test += d.label == Label::depressive;
  EXPECT_EQ(dep_test, 9u);
  EXPECT_EQ(s.test.size(), 12u);
  EXPECT_EQ(s.train.size(), 28u);
  EXPECT_EQ(s.unlabeled.size(), 1u);

  std::set<std::string> ids;
  for (const auto& d : s.train) ids.insert(d.id);
  for (const auto& d : s.test) EXPECT_TRUE(ids.insert(d.id).second);

  std::reverse(docs.begin(), docs.end());
  const auto again = split(docs, 0.3, 42);
  EXPECT_EQ(again.test, s.test);
  EXPECT_NE(split(docs, 0.3, 43).test, s.test);
}

TEST(Split, Errors) {
  std::vector<Document> docs{transcript("a", Label::depressive), transcript("b", Label::depressive),
                             transcript("c", Label::non_depressive)};
  try {
    split(docs, 0.5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_class_support);
  }
  EXPECT_THROW(split(docs, 1.0, 1), Error);
}

TEST(SeededPermutation, FixedOutput) {
  const auto p = seeded_permutation(4, 1);
  EXPECT_EQ(p, (std::vector<std::size_t>{1, 2, 3, 0}));
  auto sorted = seeded_permutation(100, 9);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

TEST(CorpusStats, CountsByLabelAndKind) {
  std::vector<Document> docs{transcript("a", Label::depressive, "one two three"),
                             transcript("b", Label::non_depressive, "one"),
                             transcript("c", std::nullopt, "x y")};
  Document c = transcript("d", Label::depressive, "hi there");
  c.kind = DocumentKind::comment;
  c.video_id = "a";
  docs.push_back(c);
  const auto s = corpus_stats(docs);
  EXPECT_EQ(s.depressive.transcripts.documents, 1u);
  EXPECT_EQ(s.depressive.transcripts.tokens, 3u);
  EXPECT_EQ(s.depressive.comments.tokens, 2u);
  EXPECT_EQ(s.unlabeled.transcripts.documents, 1u);
  EXPECT_EQ(s.total_documents, 4u);
  EXPECT_EQ(s.total_tokens, 8u);
  EXPECT_EQ(to_json(s)["non_depressive"]["transcripts"]["tokens"], 1);
}
