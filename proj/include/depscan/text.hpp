#pragma once

// Tokenization, n-gram enumeration and phrase matching shared by every
// scoring and feature module.

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace depscan {

// Ordered lowercase tokens of one text. `source_len()` is the token count and
// is the length used for every density (term frequency) computation.
struct TokenStream {
  std::vector<std::string> tokens;

  std::size_t source_len() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  bool operator==(const TokenStream&) const = default;
};

struct Ngram {
  std::vector<std::string> words;

  std::size_t n() const noexcept { return words.size(); }
  // Words joined by a single space.
  std::string joined() const;

  auto operator<=>(const Ngram&) const = default;
  bool operator==(const Ngram&) const = default;
};

// NFC-normalizes and lowercases `text`, splits on Unicode whitespace and
// strips punctuation from both ends of every token. Tokens that become empty
// are dropped; interior punctuation (apostrophes, hyphens) is kept.
TokenStream tokenize(std::string_view text);

// Tokens joined by a single space; tokenize(join_tokens(s)) == s.
std::string join_tokens(std::span<const std::string> tokens);

// All contiguous n-grams with n in [n_min, n_max]: every bigram in document
// order, then every trigram, and so on. Throws invalid-range.
std::vector<Ngram> ngrams(const TokenStream& stream, int n_min, int n_max);

// Allocation-free variant of ngrams(); same order.
void for_each_ngram(const TokenStream& stream, int n_min, int n_max,
                    const std::function<void(std::span<const std::string>)>& fn);

// Number of (possibly overlapping) positions where `term`'s token sequence
// occurs. Throws empty-term when the term has no tokens.
std::size_t phrase_count(const TokenStream& stream, std::string_view term);
std::size_t phrase_count(const TokenStream& stream,
                         std::span<const std::string> phrase);

// Positions of every token in a stream, for counting many phrases against
// one text.
class TokenIndex {
 public:
  explicit TokenIndex(const TokenStream& stream);

  std::size_t source_len() const noexcept { return stream_->source_len(); }
  std::size_t count(std::span<const std::string> phrase) const;

 private:
  const TokenStream* stream_;
  std::unordered_map<std::string_view, std::vector<std::size_t>> positions_;
};

}  // namespace depscan
