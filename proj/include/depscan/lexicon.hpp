#pragma once

// Lexical categories built on demand from seed terms by nearest-neighbour
// expansion over a static word-embedding table, and frequency-normalized
// category scores for a text.

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depscan/text.hpp"
#include "json.hpp"

namespace depscan {

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  // Returns false (and keeps the existing entry) when `word` is already
  // present. Throws dimension-mismatch or invalid-argument (non-finite).
  bool insert(std::string word, std::span<const double> values);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return words_.size(); }

  const std::string& word(std::size_t i) const { return words_[i]; }
  // Tokenizer-normalized form of word(i); empty for pure punctuation.
  const std::string& term(std::size_t i) const { return terms_[i]; }
  std::span<const double> vector(std::size_t i) const;
  double norm(std::size_t i) const { return norms_[i]; }

  std::optional<std::size_t> find(std::string_view word) const;

 private:
  std::size_t dimension_;
  std::vector<std::string> words_;
  std::vector<std::string> terms_;
  std::vector<double> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses the plain-text word-vector format (`word v1 ... vd` per line, blank
// lines ignored). The first vector fixes the dimension; later lines with a
// different component count raise dimension-mismatch with the line number.
EmbeddingTable load_embeddings(std::istream& in);

struct LexiconTerm {
  std::string term;
  double similarity = 0.0;

  bool operator==(const LexiconTerm&) const = default;
};

// Terms are held sorted by similarity descending, then lexicographically.
// Every seed is present with similarity exactly 1.0.
class LexiconCategory {
 public:
  LexiconCategory(std::string name, std::vector<std::string> seeds,
                  std::vector<LexiconTerm> terms);

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& seeds() const noexcept { return seeds_; }
  const std::vector<LexiconTerm>& terms() const noexcept { return terms_; }
  // Token sequence of each term, parallel to terms().
  const std::vector<std::vector<std::string>>& phrases() const noexcept {
    return phrases_;
  }

  bool contains(std::string_view term) const;

  bool operator==(const LexiconCategory& other) const {
    return name_ == other.name_ && seeds_ == other.seeds_ &&
           terms_ == other.terms_;
  }

 private:
  std::string name_;
  std::vector<std::string> seeds_;
  std::vector<LexiconTerm> terms_;
  std::vector<std::vector<std::string>> phrases_;
};

struct ExpansionParams {
  int top_k = 50;
  double min_sim = 0.5;

  bool operator==(const ExpansionParams&) const = default;
};

// Seeds plus, for each seed with an embedding, its top_k most cosine-similar
// vocabulary words with similarity >= min_sim. Multiword seeds use the mean
// of their in-vocabulary token vectors. Throws empty-seeds.
LexiconCategory expand_category(std::string name,
                                std::span<const std::string> seeds,
                                const EmbeddingTable& table, int top_k,
                                double min_sim);

// Category holding only its seeds.
LexiconCategory seed_category(std::string name,
                              std::span<const std::string> seeds);

// (sum over category terms of their occurrence counts) / token count;
// 0 for an empty stream.
double analyze(const TokenStream& stream, const LexiconCategory& category);
double analyze(const TokenIndex& index, const LexiconCategory& category);

struct SeedGroup {
  std::string name;
  std::vector<std::string> seeds;
};

struct SeedConfig {
  std::vector<SeedGroup> symptoms;
  std::vector<std::string> positive;
  std::vector<std::string> negative;
  ExpansionParams expansion;
};

// Stand-in seed lists, one symptom group per questionnaire item family.
// Editable configuration, not a reproduction of any published list.
SeedConfig default_seed_config();

nlohmann::json to_json(const SeedConfig& config);
SeedConfig seed_config_from_json(const nlohmann::json& doc);

class LexiconBundle {
 public:
  // Throws invalid-argument without symptom categories and
  // overlapping-lexicons when positive and negative share a term.
  LexiconBundle(std::vector<LexiconCategory> symptom_categories,
                LexiconCategory positive, LexiconCategory negative,
                ExpansionParams expansion = {});

  const std::vector<LexiconCategory>& symptom_categories() const noexcept {
    return symptoms_;
  }
  const LexiconCategory& positive() const noexcept { return positive_; }
  const LexiconCategory& negative() const noexcept { return negative_; }
  const ExpansionParams& expansion() const noexcept { return expansion_; }

  // Union of all symptom category terms, deduplicated and sorted.
  const std::vector<std::string>& symptom_terms() const noexcept {
    return symptom_terms_;
  }
  const std::vector<std::vector<std::string>>& symptom_phrases() const noexcept {
    return symptom_phrases_;
  }

  // SHA-256 of the canonical serialized form.
  const std::string& content_hash() const noexcept { return hash_; }

  bool operator==(const LexiconBundle& other) const {
    return hash_ == other.hash_;
  }

 private:
  std::vector<LexiconCategory> symptoms_;
  LexiconCategory positive_;
  LexiconCategory negative_;
  ExpansionParams expansion_;
  std::vector<std::string> symptom_terms_;
  std::vector<std::vector<std::string>> symptom_phrases_;
  std::string hash_;
};

// Expands every seed group. Without a table each category holds only its
// seeds. A term expanded into both positive and negative stays on the side
// where it is more similar (a seed always wins); exact ties drop it from both.
LexiconBundle build_bundle(const SeedConfig& config,
                           const EmbeddingTable* table);

nlohmann::json to_json(const LexiconBundle& bundle);
LexiconBundle lexicon_from_json(const nlohmann::json& doc);

}  // namespace depscan
