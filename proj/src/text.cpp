#include "depscan/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "depscan/error.hpp"

namespace depscan {
namespace {

void check_range(int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) {
    throw Error(ErrorKind::invalid_range,
                "n-gram range " + std::to_string(n_min) + ":" +
                    std::to_string(n_max) + " is not 1 <= n_min <= n_max");
  }
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t length = 0;
  U8_APPEND_UNSAFE(buf, length, c);
  out.append(buf, static_cast<std::size_t>(length));
}

void flush_token(std::vector<UChar32>& pending, std::vector<std::string>& out) {
  std::size_t first = 0;
  std::size_t last = pending.size();
  while (first < last && u_ispunct(pending[first])) ++first;
  while (last > first && u_ispunct(pending[last - 1])) --last;
  if (first < last) {
    std::string token;
    token.reserve(last - first);
    for (std::size_t i = first; i < last; ++i) append_utf8(token, pending[i]);
    out.push_back(std::move(token));
  }
  pending.clear();
}

}  // namespace

std::string Ngram::joined() const { return join_tokens(words); }

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

TokenStream tokenize(std::string_view text) {
  TokenStream stream;
  if (text.empty()) return stream;

  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString normalized;
  if (U_SUCCESS(status)) normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) normalized = source;

  std::vector<UChar32> pending;
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      flush_token(pending, stream.tokens);
    } else {
      pending.push_back(u_tolower(c));
    }
  }
  flush_token(pending, stream.tokens);
  return stream;
}

void for_each_ngram(const TokenStream& stream, int n_min, int n_max,
                    const std::function<void(std::span<const std::string>)>& fn) {
  check_range(n_min, n_max);
  const std::span<const std::string> tokens(stream.tokens);
  for (int n = n_min; n <= n_max; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t start = 0; start + width <= tokens.size(); ++start) {
      fn(tokens.subspan(start, width));
    }
  }
}

std::vector<Ngram> ngrams(const TokenStream& stream, int n_min, int n_max) {
  std::vector<Ngram> out;
  for_each_ngram(stream, n_min, n_max, [&](std::span<const std::string> words) {
    out.push_back(Ngram{{words.begin(), words.end()}});
  });
  return out;
}

std::size_t phrase_count(const TokenStream& stream,
                         std::span<const std::string> phrase) {
  if (phrase.empty()) {
    throw Error(ErrorKind::empty_term, "phrase has no tokens");
  }
  const auto& tokens = stream.tokens;
  if (phrase.size() > tokens.size()) return 0;
  std::size_t count = 0;
  for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
    bool match = true;
    for (std::size_t k = 0; k < phrase.size() && match; ++k) {
      match = tokens[start + k] == phrase[k];
    }
    if (match) ++count;
  }
  return count;
}

std::size_t phrase_count(const TokenStream& stream, std::string_view term) {
  const TokenStream phrase = tokenize(term);
  if (phrase.empty()) {
    throw Error(ErrorKind::empty_term,
                "term '" + std::string(term) + "' has no tokens");
  }
  return phrase_count(stream, phrase.tokens);
}

TokenIndex::TokenIndex(const TokenStream& stream) : stream_(&stream) {
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    positions_[stream.tokens[i]].push_back(i);
  }
}

std::size_t TokenIndex::count(std::span<const std::string> phrase) const {
  if (phrase.empty()) {
    throw Error(ErrorKind::empty_term, "phrase has no tokens");
  }
  const auto it = positions_.find(phrase.front());
  if (it == positions_.end()) return 0;
  if (phrase.size() == 1) return it->second.size();
  const auto& tokens = stream_->tokens;
  std::size_t count = 0;
  for (const std::size_t start : it->second) {
    if (start + phrase.size() > tokens.size()) break;
    bool match = true;
    for (std::size_t k = 1; k < phrase.size() && match; ++k) {
      match = tokens[start + k] == phrase[k];
    }
    if (match) ++count;
  }
  return count;
}

}  // namespace depscan
