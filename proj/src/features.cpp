#include "depscan/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "depscan/error.hpp"
#include "depscan/hash.hpp"
#include "json_util.hpp"

namespace depscan {
namespace {

using nlohmann::json;

// Orders space-joined n-gram keys as word sequences: the separator sorts
// below every token byte.
bool word_sequence_less(const std::string& a, const std::string& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        const int rx = x == ' ' ? 0 : static_cast<unsigned char>(x) + 1;
        const int ry = y == ' ' ? 0 : static_cast<unsigned char>(y) + 1;
        return rx < ry;
      });
}

std::string key_of(std::span<const std::string> words) {
  return join_tokens(words);
}

}  // namespace

double FeatureVector::value_at(std::size_t index) const {
  const auto it = std::lower_bound(
      components.begin(), components.end(), index,
      [](const auto& c, std::size_t i) { return c.first < i; });
  return it != components.end() && it->first == index ? it->second : 0.0;
}

TfidfVocabulary::TfidfVocabulary(int n_min, int n_max, std::size_t max_features,
                                 std::size_t n_documents,
                                 std::vector<VocabEntry> entries)
    : n_min_(n_min),
      n_max_(n_max),
      max_features_(max_features),
      n_documents_(n_documents),
      entries_(std::move(entries)) {
  if (n_min < 1 || n_min > n_max) {
    throw Error(ErrorKind::invalid_range, "invalid n-gram range");
  }
  if (entries_.size() > max_features_) {
    throw Error(ErrorKind::invalid_argument,
                "vocabulary larger than max_features");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.ngram.n() < static_cast<std::size_t>(n_min) ||
        e.ngram.n() > static_cast<std::size_t>(n_max)) {
      throw Error(ErrorKind::invalid_argument,
                  "n-gram '" + e.ngram.joined() + "' outside the n-gram range");
    }
    if (!(e.idf > 0.0) || !std::isfinite(e.idf)) {
      throw Error(ErrorKind::invalid_argument,
                  "idf of '" + e.ngram.joined() + "' must be positive");
    }
    if (!index_.emplace(e.ngram.joined(), i).second) {
      throw Error(ErrorKind::invalid_argument,
                  "duplicate n-gram '" + e.ngram.joined() + "'");
    }
  }
}

std::optional<std::size_t> TfidfVocabulary::index_of(const Ngram& ngram) const {
  return index_of(ngram.words);
}

std::optional<std::size_t> TfidfVocabulary::index_of(
    std::span<const std::string> words) const {
  const auto it = index_.find(key_of(words));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TfidfVocabulary build_vocab(std::span<const TokenStream> corpus, int n_min,
                            int n_max, std::size_t max_features) {
  if (corpus.empty()) {
    throw Error(ErrorKind::empty_corpus, "cannot build a vocabulary from no documents");
  }
  if (n_min < 1 || n_min > n_max) {
    throw Error(ErrorKind::invalid_range, "invalid n-gram range");
  }
  std::unordered_map<std::string, std::size_t> df;
  std::unordered_set<std::string> seen;
  for (const auto& doc : corpus) {
    seen.clear();
    for_each_ngram(doc, n_min, n_max, [&](std::span<const std::string> words) {
      seen.insert(key_of(words));
    });
    for (const auto& key : seen) ++df[key];
  }

  std::vector<std::pair<const std::string*, std::size_t>> ranked;
  ranked.reserve(df.size());
  for (const auto& [key, count] : df) ranked.emplace_back(&key, count);
  const auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return word_sequence_less(*a.first, *b.first);
  };
  const std::size_t keep = std::min(max_features, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                    ranked.end(), better);
  ranked.resize(keep);

  const double n = static_cast<double>(corpus.size());
  std::vector<VocabEntry> entries;
  entries.reserve(keep);
  for (const auto& [key, count] : ranked) {
    entries.push_back({Ngram{tokenize(*key).tokens},
                       std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0,
                       count});
  }
  return TfidfVocabulary(n_min, n_max, max_features, corpus.size(),
                         std::move(entries));
}

FeatureVector tfidf_vector(const TokenStream& doc, const TfidfVocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for_each_ngram(doc, vocab.n_min(), vocab.n_max(),
                 [&](std::span<const std::string> words) {
                   if (const auto idx = vocab.index_of(words)) counts[*idx] += 1.0;
                 });
  FeatureVector out;
  out.dimension = vocab.size();
  out.segments = {{std::string(kTfidfSegment), 0, vocab.size()}};
  double sum_sq = 0.0;
  for (const auto& [idx, count] : counts) {
    const double value = count * vocab.entry(idx).idf;
    out.components.emplace_back(idx, value);
    sum_sq += value * value;
  }
  if (sum_sq > 0.0) {
    const double norm = std::sqrt(sum_sq);
    for (auto& c : out.components) c.second /= norm;
  }
  return out;
}

std::size_t empath_dimension(const LexiconBundle& bundle) {
  return bundle.symptom_categories().size() + 2;
}

FeatureVector empath_vector(const TokenStream& doc, const LexiconBundle& bundle) {
  FeatureVector out;
  out.dimension = empath_dimension(bundle);
  out.segments = {{std::string(kEmpathSegment), 0, out.dimension}};
  if (doc.empty()) return out;
  const TokenIndex index(doc);
  std::size_t i = 0;
  const auto add = [&](const LexiconCategory& category) {
    const double value = analyze(index, category);
    if (value != 0.0) out.components.emplace_back(i, value);
    ++i;
  };
  for (const auto& category : bundle.symptom_categories()) add(category);
  add(bundle.positive());
  add(bundle.negative());
  return out;
}

FeatureVector feature_union(const FeatureVector& tfidf,
                            const FeatureVector& empath) {
  if (tfidf.segments.size() > 1 || empath.segments.size() > 1) {
    throw Error(ErrorKind::dimension_mismatch,
                "union inputs must each hold a single segment");
  }
  FeatureVector out;
  out.dimension = tfidf.dimension + empath.dimension;
  out.segments = {{std::string(kTfidfSegment), 0, tfidf.dimension},
                  {std::string(kEmpathSegment), tfidf.dimension, out.dimension}};
  out.components = tfidf.components;
  for (const auto& [idx, value] : empath.components) {
    out.components.emplace_back(idx + tfidf.dimension, value);
  }
  return out;
}

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::empath ? "empath" : "tfidf+empath";
}

FeatureMode parse_feature_mode(std::string_view text) {
  if (text == "empath") return FeatureMode::empath;
  if (text == "tfidf+empath") return FeatureMode::tfidf_empath;
  throw Error(ErrorKind::invalid_argument,
              "unknown feature set '" + std::string(text) +
                  "' (expected empath or tfidf+empath)");
}

FeatureSpace FeatureSpace::fit(const FeatureConfig& config, LexiconBundle bundle,
                               std::span<const TokenStream> training_corpus) {
  std::optional<TfidfVocabulary> vocab;
  if (config.mode == FeatureMode::tfidf_empath) {
    vocab = build_vocab(training_corpus, config.n_min, config.n_max,
                        config.max_features);
  }
  return FeatureSpace(config, std::move(vocab), std::move(bundle));
}

FeatureSpace::FeatureSpace(FeatureConfig config,
                           std::optional<TfidfVocabulary> vocabulary,
                           LexiconBundle bundle)
    : config_(config), vocabulary_(std::move(vocabulary)), bundle_(std::move(bundle)) {
  if ((config_.mode == FeatureMode::tfidf_empath) != vocabulary_.has_value()) {
    throw Error(ErrorKind::invalid_argument,
                "a vocabulary is required exactly when TF-IDF features are used");
  }
  hash_ = sha256_hex(to_json(*this).dump());
}

std::size_t FeatureSpace::dimension() const noexcept {
  return (vocabulary_ ? vocabulary_->size() : 0) + empath_dimension(bundle_);
}

FeatureVector FeatureSpace::vectorize(const TokenStream& doc) const {
  FeatureVector empath = empath_vector(doc, bundle_);
  if (!vocabulary_) return empath;
  return feature_union(tfidf_vector(doc, *vocabulary_), empath);
}

json to_json(const TfidfVocabulary& vocab) {
  json entries = json::array();
  for (const auto& e : vocab.entries()) {
    entries.push_back(json::array({e.ngram.joined(), e.idf, e.document_frequency}));
  }
  return json{{"version", detail::kSchemaVersion},
              {"kind", "tfidf_vocabulary"},
              {"n_min", vocab.n_min()},
              {"n_max", vocab.n_max()},
              {"max_features", vocab.max_features()},
              {"n_documents", vocab.n_documents()},
              {"idf", "ln((1+N)/(1+df))+1"},
              {"entries", std::move(entries)}};
}

TfidfVocabulary vocabulary_from_json(const json& doc) {
  detail::check_header(doc, "tfidf_vocabulary");
  std::vector<VocabEntry> entries;
  try {
    for (const auto& e : detail::require(doc, "entries")) {
      entries.push_back({Ngram{tokenize(e.at(0).get<std::string>()).tokens},
                         e.at(1).get<double>(), e.at(2).get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::corrupt_payload,
                std::string("malformed vocabulary entry: ") + e.what());
  }
  return TfidfVocabulary(detail::require_as<int>(doc, "n_min"),
                         detail::require_as<int>(doc, "n_max"),
                         detail::require_as<std::size_t>(doc, "max_features"),
                         detail::require_as<std::size_t>(doc, "n_documents"),
                         std::move(entries));
}

json to_json(const FeatureSpace& space) {
  const auto& config = space.config();
  return json{{"version", detail::kSchemaVersion},
              {"kind", "feature_space"},
              {"mode", to_string(config.mode)},
              {"n_min", config.n_min},
              {"n_max", config.n_max},
              {"max_features", config.max_features},
              {"tfidf_normalization", "l2"},
              {"empath_values", "raw"},
              {"vocabulary", space.vocabulary() ? to_json(*space.vocabulary())
                                                : json(nullptr)},
              {"lexicon", to_json(space.bundle())}};
}

FeatureSpace feature_space_from_json(const json& doc) {
  detail::check_header(doc, "feature_space");
  FeatureConfig config;
  config.mode = parse_feature_mode(detail::require_as<std::string>(doc, "mode"));
  config.n_min = detail::require_as<int>(doc, "n_min");
  config.n_max = detail::require_as<int>(doc, "n_max");
  config.max_features = detail::require_as<std::size_t>(doc, "max_features");
  std::optional<TfidfVocabulary> vocab;
  const json& raw_vocab = detail::require(doc, "vocabulary");
  if (!raw_vocab.is_null()) vocab = vocabulary_from_json(raw_vocab);
  return FeatureSpace(config, std::move(vocab),
                      lexicon_from_json(detail::require(doc, "lexicon")));
}

}  // namespace depscan
