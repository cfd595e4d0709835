#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace depscan {

// Depressive is the positive class everywhere (confusion cells, posteriors).
enum class Label { depressive, non_depressive };

inline constexpr std::array<Label, 2> kClassOrder = {Label::depressive,
                                                     Label::non_depressive};

constexpr std::size_t class_index(Label label) {
  return label == Label::depressive ? 0 : 1;
}

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Accepts YYYY-MM-DDTHH:MM:SS with optional fractional seconds (truncated)
// and a `Z` or `+00:00` suffix. Anything else throws parse-error.
Timestamp parse_timestamp(std::string_view text);

// Formats as YYYY-MM-DDTHH:MM:SSZ.
std::string format_timestamp(Timestamp ts);

// Midnight UTC of the day containing `ts`.
Timestamp utc_midnight(Timestamp ts);

}  // namespace depscan
