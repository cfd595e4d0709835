#pragma once

// Classifier feature space: TF-IDF weighted word n-grams and lexical
// category densities, optionally concatenated.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depscan/lexicon.hpp"
#include "depscan/text.hpp"
#include "json.hpp"

namespace depscan {

// Half-open index range [begin, end) of one named feature block.
struct Segment {
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Segment&) const = default;
};

// Sparse non-negative vector; components sorted by strictly increasing index,
// zero components omitted.
struct FeatureVector {
  std::vector<std::pair<std::size_t, double>> components;
  std::size_t dimension = 0;
  std::vector<Segment> segments;

  double value_at(std::size_t index) const;
  bool operator==(const FeatureVector&) const = default;
};

inline constexpr std::string_view kTfidfSegment = "tfidf";
inline constexpr std::string_view kEmpathSegment = "empath";

struct VocabEntry {
  Ngram ngram;
  double idf = 0.0;
  std::size_t document_frequency = 0;
};

class TfidfVocabulary {
 public:
  // `entries[i]` is the n-gram with feature index i.
  TfidfVocabulary(int n_min, int n_max, std::size_t max_features,
                  std::size_t n_documents, std::vector<VocabEntry> entries);

  int n_min() const noexcept { return n_min_; }
  int n_max() const noexcept { return n_max_; }
  std::size_t max_features() const noexcept { return max_features_; }
  std::size_t n_documents() const noexcept { return n_documents_; }
  std::size_t size() const noexcept { return entries_.size(); }

  const VocabEntry& entry(std::size_t index) const { return entries_[index]; }
  const std::vector<VocabEntry>& entries() const noexcept { return entries_; }
  std::optional<std::size_t> index_of(const Ngram& ngram) const;
  std::optional<std::size_t> index_of(std::span<const std::string> words) const;

 private:
  int n_min_;
  int n_max_;
  std::size_t max_features_;
  std::size_t n_documents_;
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps the max_features n-grams with highest document frequency (ties by
// word sequence, ascending); idf = ln((1 + N) / (1 + df)) + 1.
// Throws empty-corpus, invalid-range.
TfidfVocabulary build_vocab(std::span<const TokenStream> corpus, int n_min,
                            int n_max, std::size_t max_features);

// count * idf per in-vocabulary n-gram, L2-normalized unless all zero.
FeatureVector tfidf_vector(const TokenStream& doc, const TfidfVocabulary& vocab);

// analyze() per category: symptom categories in order, then positive, then
// negative.
FeatureVector empath_vector(const TokenStream& doc, const LexiconBundle& bundle);

std::size_t empath_dimension(const LexiconBundle& bundle);

// Concatenates a tfidf-only and an empath-only vector. Throws
// dimension-mismatch if either input already spans more than one segment.
FeatureVector feature_union(const FeatureVector& tfidf,
                            const FeatureVector& empath);

enum class FeatureMode { empath, tfidf_empath };

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view text);

struct FeatureConfig {
  FeatureMode mode = FeatureMode::tfidf_empath;
  int n_min = 2;
  int n_max = 3;
  std::size_t max_features = 5000;
};

// Frozen vocabulary plus lexicon; maps a document to its feature vector.
class FeatureSpace {
 public:
  static FeatureSpace fit(const FeatureConfig& config, LexiconBundle bundle,
                          std::span<const TokenStream> training_corpus);

  FeatureSpace(FeatureConfig config, std::optional<TfidfVocabulary> vocabulary,
               LexiconBundle bundle);

  FeatureVector vectorize(const TokenStream& doc) const;

  const FeatureConfig& config() const noexcept { return config_; }
  const std::optional<TfidfVocabulary>& vocabulary() const noexcept {
    return vocabulary_;
  }
  const LexiconBundle& bundle() const noexcept { return bundle_; }
  std::size_t dimension() const noexcept;

  // Binds models to the exact vocabulary and lexicon they were trained on.
  const std::string& config_hash() const noexcept { return hash_; }

 private:
  FeatureConfig config_;
  std::optional<TfidfVocabulary> vocabulary_;
  LexiconBundle bundle_;
  std::string hash_;
};

nlohmann::json to_json(const TfidfVocabulary& vocab);
TfidfVocabulary vocabulary_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const FeatureSpace& space);
FeatureSpace feature_space_from_json(const nlohmann::json& doc);

}  // namespace depscan
