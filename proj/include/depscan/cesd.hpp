#pragma once

// Comment-level CES-D density score, per-video aggregation and the
// depressive/non-depressive threshold.
//
// For one comment:
//   term_freq   = matched symptom terms / token count
//   connotation = analyze(negative) - analyze(positive)
//   score       = max(0, term_freq * connotation)

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depscan/lexicon.hpp"
#include "depscan/text.hpp"
#include "depscan/types.hpp"
#include "json.hpp"

namespace depscan {

// presence: each symptom term counts once if it occurs at all.
// occurrence: every occurrence counts.
enum class Counting { presence, occurrence };

// Per-comment basis summed into the video score.
enum class AggregateMode { connotation_weighted, density_only };

std::string_view to_string(Counting counting);
std::string_view to_string(AggregateMode mode);
Counting parse_counting(std::string_view text);
AggregateMode parse_aggregate_mode(std::string_view text);

struct CommentScore {
  std::string comment_id;
  double term_freq = 0.0;
  double negative = 0.0;
  double positive = 0.0;
  double connotation = 0.0;
  double score = 0.0;
};

struct CommentText {
  std::string id;
  TokenStream tokens;
};

CommentScore comment_cesd(const TokenStream& stream, const LexiconBundle& bundle,
                          Counting counting = Counting::presence,
                          std::string comment_id = {});

struct CesdReport {
  std::string video_id;
  std::vector<CommentScore> comment_scores;  // sorted by comment_id
  AggregateMode aggregate_mode = AggregateMode::connotation_weighted;
  Counting counting = Counting::presence;
  double video_score = 0.0;
  std::size_t n_comments = 0;
  std::size_t zero_comments = 0;
  double zero_fraction = 0.0;
  std::string lexicon_hash;
};

// Scores every comment and averages the per-comment basis. Comments are
// reduced in comment_id order so the sum is independent of input order.
CesdReport video_cesd(std::string video_id, std::span<const CommentText> comments,
                      const LexiconBundle& bundle,
                      AggregateMode mode = AggregateMode::connotation_weighted,
                      Counting counting = Counting::presence);

struct CesdThreshold {
  enum class Provenance { fixed, calibrated };

  double value = 0.0;
  Provenance provenance = Provenance::fixed;
  std::size_t calibration_set_size = 0;
};

std::string_view to_string(CesdThreshold::Provenance provenance);

// Threshold used when no calibration data is available.
inline constexpr double kDefaultFixedThreshold = 20.0;

CesdThreshold fixed_threshold(double value);

// Mean video score of depressive-labeled training videos.
// Throws empty-calibration-set.
CesdThreshold calibrate_threshold(std::span<const CesdReport> training_reports);

// Depressive iff video_score > threshold (strict).
Label label_by_threshold(const CesdReport& report, const CesdThreshold& threshold);

nlohmann::json to_json(const CommentScore& score);
nlohmann::json to_json(const CesdReport& report);
CesdReport cesd_report_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CesdThreshold& threshold);

}  // namespace depscan
