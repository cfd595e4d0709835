#include "depscan/error.hpp"

namespace depscan {
namespace {

std::string format_message(ErrorKind kind, const std::string& message,
                           std::optional<std::size_t> line) {
  std::string out(to_string(kind));
  if (line) out += " at line " + std::to_string(*line);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_range: return "invalid-range";
    case ErrorKind::empty_term: return "empty-term";
    case ErrorKind::dimension_mismatch: return "dimension-mismatch";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::empty_seeds: return "empty-seeds";
    case ErrorKind::overlapping_lexicons: return "overlapping-lexicons";
    case ErrorKind::empty_calibration_set: return "empty-calibration-set";
    case ErrorKind::empty_corpus: return "empty-corpus";
    case ErrorKind::class_missing: return "class-missing";
    case ErrorKind::non_positive_alpha: return "non-positive-alpha";
    case ErrorKind::version_unsupported: return "version-unsupported";
    case ErrorKind::corrupt_payload: return "corrupt-payload";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::feature_hash_mismatch: return "feature-hash-mismatch";
    case ErrorKind::empty_group: return "empty-group";
    case ErrorKind::invalid_window: return "invalid-window";
    case ErrorKind::empty_history: return "empty-history";
    case ErrorKind::duplicate_id: return "duplicate-id";
    case ErrorKind::insufficient_class_support: return "insufficient-class-support";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(format_message(kind, message, line)),
      kind_(kind),
      line_(line) {}

}  // namespace depscan
