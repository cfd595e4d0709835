#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace depscan {

enum class ErrorKind {
  invalid_argument,
  invalid_range,
  empty_term,
  dimension_mismatch,
  parse_error,
  empty_seeds,
  overlapping_lexicons,
  empty_calibration_set,
  empty_corpus,
  class_missing,
  non_positive_alpha,
  version_unsupported,
  corrupt_payload,
  length_mismatch,
  empty_input,
  feature_hash_mismatch,
  empty_group,
  invalid_window,
  empty_history,
  duplicate_id,
  insufficient_class_support,
  io_error,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type. `line()` is set for
// errors tied to a position in an input file (1-based).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

}  // namespace depscan
