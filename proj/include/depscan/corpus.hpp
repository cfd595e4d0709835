#pragma once

// Line-delimited JSON corpora of transcripts and comments, keyword-based
// labeling, stratified splitting and corpus statistics.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depscan/types.hpp"
#include "json.hpp"

namespace depscan {

enum class DocumentKind { transcript, comment };

std::string_view to_string(DocumentKind kind);

struct Document {
  std::string id;
  DocumentKind kind = DocumentKind::transcript;
  std::string text;
  std::optional<Label> label;
  std::optional<std::string> category;
  std::optional<std::string> video_id;  // required for comments
  std::optional<Timestamp> timestamp;
  // Search metadata consulted by keyword rules.
  std::vector<std::string> tags;
  std::optional<std::string> title;
  std::optional<std::string> query;

  bool operator==(const Document&) const = default;
};

nlohmann::json to_json(const Document& doc);
// Throws parse-error.
Document document_from_json(const nlohmann::json& record);

struct LoadDiagnostic {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  std::vector<Document> documents;
  std::vector<LoadDiagnostic> diagnostics;
};

// One JSON record per line; blank lines are skipped. In strict mode the first
// malformed line throws parse-error; otherwise it is skipped and reported in
// `diagnostics`. Repeated ids always throw duplicate-id.
LoadResult load_corpus(std::istream& in, bool strict = true);

void write_corpus(std::span<const Document> documents, std::ostream& out);

enum class MatchField { tags, title, query };

std::string_view to_string(MatchField field);

struct KeywordRule {
  std::optional<Label> label;
  std::optional<std::string> category;
  std::vector<std::string> keywords;
  MatchField match_field = MatchField::tags;
};

// Validates and tokenizer-normalizes keywords. Throws invalid-argument.
KeywordRule make_rule(std::optional<Label> label,
                      std::optional<std::string> category,
                      std::vector<std::string> keywords, MatchField field);

// Stand-in rules; the depressive tag list is a reconstruction, not a
// published keyword list.
std::vector<KeywordRule> default_keyword_rules();

nlohmann::json to_json(std::span<const KeywordRule> rules);
std::vector<KeywordRule> keyword_rules_from_json(const nlohmann::json& doc);

// The first rule (in list order) with a keyword occurring as a token phrase
// in its field assigns its label and/or category. Without a match the
// document is returned unchanged. Text is never modified.
Document keyword_label(Document doc, std::span<const KeywordRule> rules);

struct CorpusSplit {
  std::vector<Document> train;
  std::vector<Document> test;
  std::vector<Document> unlabeled;  // not assigned to either side
};

// Stratified by label: per class, round(n_c * test_fraction) documents
// (clamped to [1, n_c - 1]) chosen by a seeded permutation of the class
// sorted by id. Throws invalid-argument, insufficient-class-support.
CorpusSplit split(std::span<const Document> corpus, double test_fraction,
                  std::uint64_t seed);

// Deterministic Fisher-Yates permutation of 0..n-1 from a 64-bit Mersenne
// Twister; identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct KindCounts {
  std::size_t documents = 0;
  std::size_t tokens = 0;
};

struct LabelCounts {
  KindCounts transcripts;
  KindCounts comments;
};

struct CorpusStats {
  LabelCounts depressive;
  LabelCounts non_depressive;
  LabelCounts unlabeled;
  std::size_t total_documents = 0;
  std::size_t total_tokens = 0;
};

CorpusStats corpus_stats(std::span<const Document> corpus);

nlohmann::json to_json(const CorpusStats& stats);

}  // namespace depscan
