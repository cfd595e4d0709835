#include "depscan/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <random>
#include <unordered_set>

#include "depscan/error.hpp"
#include "depscan/text.hpp"
#include "json_util.hpp"

namespace depscan {
namespace {

using nlohmann::json;

[[noreturn]] void bad_record(const std::string& message) {
  throw Error(ErrorKind::parse_error, message);
}

std::string string_field(const json& record, const char* key) {
  const auto it = record.find(key);
  if (it == record.end()) bad_record(std::string("missing field '") + key + "'");
  if (!it->is_string()) bad_record(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& record, const char* key) {
  const auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) bad_record(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

bool phrase_in(const TokenStream& field, std::span<const std::string> phrase) {
  return phrase_count(field, phrase) > 0;
}

MatchField parse_match_field(std::string_view text) {
  if (text == "tags") return MatchField::tags;
  if (text == "title") return MatchField::title;
  if (text == "query") return MatchField::query;
  throw Error(ErrorKind::invalid_argument,
              "unknown match_field '" + std::string(text) + "'");
}

void add_counts(LabelCounts& counts, DocumentKind kind, std::size_t tokens) {
  KindCounts& k = kind == DocumentKind::transcript ? counts.transcripts : counts.comments;
  ++k.documents;
  k.tokens += tokens;
}

json label_counts_json(const LabelCounts& c) {
  return json{{"transcripts", {{"documents", c.transcripts.documents},
                               {"tokens", c.transcripts.tokens}}},
              {"comments", {{"documents", c.comments.documents},
                            {"tokens", c.comments.tokens}}}};
}

}  // namespace

std::string_view to_string(DocumentKind kind) {
  return kind == DocumentKind::transcript ? "transcript" : "comment";
}

std::string_view to_string(MatchField field) {
  switch (field) {
    case MatchField::tags: return "tags";
    case MatchField::title: return "title";
    case MatchField::query: return "query";
  }
  return "tags";
}

json to_json(const Document& doc) {
  json out{{"id", doc.id}, {"kind", to_string(doc.kind)}, {"text", doc.text}};
  if (doc.label) out["label"] = to_string(*doc.label);
  if (doc.category) out["category"] = *doc.category;
  if (doc.video_id) out["video_id"] = *doc.video_id;
  if (doc.timestamp) out["timestamp"] = format_timestamp(*doc.timestamp);
  if (!doc.tags.empty()) out["tags"] = doc.tags;
  if (doc.title) out["title"] = *doc.title;
  if (doc.query) out["query"] = *doc.query;
  return out;
}

Document document_from_json(const json& record) {
  if (!record.is_object()) bad_record("record is not a JSON object");
  Document doc;
  doc.id = string_field(record, "id");
  if (doc.id.empty()) bad_record("field 'id' is empty");
  const std::string kind = string_field(record, "kind");
  if (kind == "transcript") {
    doc.kind = DocumentKind::transcript;
  } else if (kind == "comment") {
    doc.kind = DocumentKind::comment;
  } else {
    bad_record("unknown kind '" + kind + "'");
  }
  doc.text = string_field(record, "text");
  if (const auto label = optional_string(record, "label")) {
    doc.label = parse_label(*label);
    if (!doc.label) bad_record("unknown label '" + *label + "'");
  }
  doc.category = optional_string(record, "category");
  doc.video_id = optional_string(record, "video_id");
  if (doc.kind == DocumentKind::comment && !doc.video_id) {
    bad_record("comment '" + doc.id + "' has no video_id");
  }
  if (const auto ts = optional_string(record, "timestamp")) {
    doc.timestamp = parse_timestamp(*ts);
  }
  if (const auto it = record.find("tags"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) bad_record("field 'tags' must be an array of strings");
    for (const auto& tag : *it) {
      if (!tag.is_string()) bad_record("field 'tags' must be an array of strings");
      doc.tags.push_back(tag.get<std::string>());
    }
  }
  doc.title = optional_string(record, "title");
  doc.query = optional_string(record, "query");
  return doc;
}

LoadResult load_corpus(std::istream& in, bool strict) {
  LoadResult result;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    Document doc;
    try {
      doc = document_from_json(json::parse(line));
    } catch (const std::exception& e) {
      const std::string message =
          dynamic_cast<const json::exception*>(&e)
              ? std::string("invalid JSON: ") + e.what()
              : std::string(e.what());
      if (strict) throw Error(ErrorKind::parse_error, message, line_no);
      result.diagnostics.push_back({line_no, message});
      continue;
    }
    if (!ids.insert(doc.id).second) {
      throw Error(ErrorKind::duplicate_id, "id '" + doc.id + "' appears twice",
                  line_no);
    }
    result.documents.push_back(std::move(doc));
  }
  return result;
}

void write_corpus(std::span<const Document> documents, std::ostream& out) {
  for (const auto& doc : documents) out << to_json(doc).dump() << '\n';
}

KeywordRule make_rule(std::optional<Label> label,
                      std::optional<std::string> category,
                      std::vector<std::string> keywords, MatchField field) {
  if (!label && !category) {
    throw Error(ErrorKind::invalid_argument,
                "keyword rule must assign a label or a category");
  }
  if (keywords.empty()) {
    throw Error(ErrorKind::invalid_argument, "keyword rule has no keywords");
  }
  for (auto& keyword : keywords) {
    std::string normalized = join_tokens(tokenize(keyword).tokens);
    if (normalized.empty()) {
      throw Error(ErrorKind::invalid_argument,
                  "keyword '" + keyword + "' has no tokens");
    }
    keyword = std::move(normalized);
  }
  return {label, std::move(category), std::move(keywords), field};
}

std::vector<KeywordRule> default_keyword_rules() {
  return {
      make_rule(Label::depressive, "depression",
                {"self-harm", "suicidal", "triggering", "depression", "depressed",
                 "depressing", "self harm", "suicide", "sad songs", "lonely"},
                MatchField::tags),
      make_rule(Label::non_depressive, "funny",
                {"funny", "comedy", "prank", "memes"}, MatchField::tags),
      make_rule(Label::non_depressive, "music",
                {"music", "song", "official video", "live"}, MatchField::tags),
      make_rule(Label::non_depressive, "self-help",
                {"motivation", "motivational", "self-help", "self improvement"},
                MatchField::tags),
      make_rule(Label::non_depressive, "educational",
                {"educational", "tutorial", "lecture", "science"},
                MatchField::tags),
  };
}

json to_json(std::span<const KeywordRule> rules) {
  json out = json::array();
  for (const auto& rule : rules) {
    json r{{"keywords", rule.keywords}, {"match_field", to_string(rule.match_field)}};
    if (rule.label) r["label"] = to_string(*rule.label);
    if (rule.category) r["category"] = *rule.category;
    out.push_back(std::move(r));
  }
  return json{{"version", detail::kSchemaVersion},
              {"kind", "keyword_rules"},
              {"rules", std::move(out)}};
}

std::vector<KeywordRule> keyword_rules_from_json(const json& doc) {
  detail::check_header(doc, "keyword_rules");
  std::vector<KeywordRule> rules;
  for (const auto& r : detail::require(doc, "rules")) {
    std::optional<Label> label;
    if (r.contains("label")) {
      label = parse_label(detail::require_as<std::string>(r, "label"));
      if (!label) throw Error(ErrorKind::corrupt_payload, "unknown rule label");
    }
    std::optional<std::string> category;
    if (r.contains("category")) category = detail::require_as<std::string>(r, "category");
    rules.push_back(make_rule(
        label, std::move(category),
        detail::require_as<std::vector<std::string>>(r, "keywords"),
        parse_match_field(detail::require_as<std::string>(r, "match_field"))));
  }
  return rules;
}

Document keyword_label(Document doc, std::span<const KeywordRule> rules) {
  std::vector<TokenStream> tag_streams;
  for (const auto& tag : doc.tags) tag_streams.push_back(tokenize(tag));
  const TokenStream title = tokenize(doc.title.value_or(""));
  const TokenStream query = tokenize(doc.query.value_or(""));

  for (const auto& rule : rules) {
    bool matched = false;
    for (const auto& keyword : rule.keywords) {
      const std::vector<std::string> phrase = tokenize(keyword).tokens;
      if (phrase.empty()) continue;
      switch (rule.match_field) {
        case MatchField::tags:
          matched = std::any_of(tag_streams.begin(), tag_streams.end(),
                                [&](const auto& s) { return phrase_in(s, phrase); });
          break;
        case MatchField::title: matched = phrase_in(title, phrase); break;
        case MatchField::query: matched = phrase_in(query, phrase); break;
      }
      if (matched) break;
    }
    if (matched) {
      if (rule.label) doc.label = rule.label;
      if (rule.category) doc.category = rule.category;
      return doc;
    }
  }
  return doc;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

CorpusSplit split(std::span<const Document> corpus, double test_fraction,
                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "test_fraction must lie in (0, 1)");
  }
  CorpusSplit out;
  std::array<std::vector<const Document*>, 2> by_class;
  for (const auto& doc : corpus) {
    if (doc.label) {
      by_class[class_index(*doc.label)].push_back(&doc);
    } else {
      out.unlabeled.push_back(doc);
    }
  }
  std::uint64_t stream = seed;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& docs = by_class[c];
    if (docs.size() < 2) {
      throw Error(ErrorKind::insufficient_class_support,
                  "class " + std::string(to_string(kClassOrder[c])) + " has " +
                      std::to_string(docs.size()) +
                      " labeled documents; at least 2 are required");
    }
    std::sort(docs.begin(), docs.end(),
              [](const Document* a, const Document* b) { return a->id < b->id; });
    const auto n = static_cast<double>(docs.size());
    const std::size_t n_test = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(n * test_fraction)), 1,
        docs.size() - 1);
    const auto order = seeded_permutation(docs.size(), stream++);
    std::vector<bool> in_test(docs.size(), false);
    for (std::size_t k = 0; k < n_test; ++k) in_test[order[k]] = true;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      (in_test[i] ? out.test : out.train).push_back(*docs[i]);
    }
  }
  const auto by_id = [](const Document& a, const Document& b) { return a.id < b.id; };
  std::sort(out.train.begin(), out.train.end(), by_id);
  std::sort(out.test.begin(), out.test.end(), by_id);
  return out;
}

CorpusStats corpus_stats(std::span<const Document> corpus) {
  CorpusStats stats;
  for (const auto& doc : corpus) {
    const std::size_t tokens = tokenize(doc.text).source_len();
    LabelCounts& counts = !doc.label ? stats.unlabeled
                          : *doc.label == Label::depressive ? stats.depressive
                                                            : stats.non_depressive;
    add_counts(counts, doc.kind, tokens);
    ++stats.total_documents;
    stats.total_tokens += tokens;
  }
  return stats;
}

json to_json(const CorpusStats& stats) {
  return json{{"depressive", label_counts_json(stats.depressive)},
              {"non_depressive", label_counts_json(stats.non_depressive)},
              {"unlabeled", label_counts_json(stats.unlabeled)},
              {"total_documents", stats.total_documents},
              {"total_tokens", stats.total_tokens}};
}

}  // namespace depscan
