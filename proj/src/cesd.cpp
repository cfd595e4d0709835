#include "depscan/cesd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depscan/error.hpp"
#include "json_util.hpp"

namespace depscan {

using nlohmann::json;

std::string_view to_string(Counting counting) {
  return counting == Counting::presence ? "presence" : "occurrence";
}

std::string_view to_string(AggregateMode mode) {
  return mode == AggregateMode::connotation_weighted ? "connotation_weighted"
                                                     : "density_only";
}

Counting parse_counting(std::string_view text) {
  if (text == "presence") return Counting::presence;
  if (text == "occurrence") return Counting::occurrence;
  throw Error(ErrorKind::invalid_argument,
              "unknown counting mode '" + std::string(text) + "'");
}

AggregateMode parse_aggregate_mode(std::string_view text) {
  if (text == "connotation_weighted") return AggregateMode::connotation_weighted;
  if (text == "density_only") return AggregateMode::density_only;
  throw Error(ErrorKind::invalid_argument,
              "unknown aggregate mode '" + std::string(text) + "'");
}

std::string_view to_string(CesdThreshold::Provenance provenance) {
  return provenance == CesdThreshold::Provenance::fixed ? "fixed" : "calibrated";
}

CommentScore comment_cesd(const TokenStream& stream, const LexiconBundle& bundle,
                          Counting counting, std::string comment_id) {
  CommentScore out;
  out.comment_id = std::move(comment_id);
  if (stream.empty()) return out;

  const TokenIndex index(stream);
  const double length = static_cast<double>(stream.source_len());
  std::size_t matched = 0;
  for (const auto& phrase : bundle.symptom_phrases()) {
    const std::size_t hits = index.count(phrase);
    matched += counting == Counting::presence ? (hits > 0 ? 1 : 0) : hits;
  }
  out.term_freq = static_cast<double>(matched) / length;
  out.negative = analyze(index, bundle.negative());
  out.positive = analyze(index, bundle.positive());
  out.connotation = out.negative - out.positive;
  out.score = out.connotation > 0.0 ? out.term_freq * out.connotation : 0.0;
  return out;
}

CesdReport video_cesd(std::string video_id, std::span<const CommentText> comments,
                      const LexiconBundle& bundle, AggregateMode mode,
                      Counting counting) {
  CesdReport report;
  report.video_id = std::move(video_id);
  report.aggregate_mode = mode;
  report.counting = counting;
  report.lexicon_hash = bundle.content_hash();
  report.n_comments = comments.size();

  std::vector<std::size_t> order(comments.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return comments[a].id < comments[b].id;
  });

  double total = 0.0;
  for (const std::size_t i : order) {
    CommentScore score =
        comment_cesd(comments[i].tokens, bundle, counting, comments[i].id);
    total += mode == AggregateMode::connotation_weighted ? score.score
                                                         : score.term_freq;
    if (score.score == 0.0) ++report.zero_comments;
    report.comment_scores.push_back(std::move(score));
  }
  if (report.n_comments > 0) {
    const double n = static_cast<double>(report.n_comments);
    report.video_score = total / n;
    report.zero_fraction = static_cast<double>(report.zero_comments) / n;
  }
  return report;
}

CesdThreshold fixed_threshold(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::invalid_argument,
                "threshold must be a finite value >= 0");
  }
  return {value, CesdThreshold::Provenance::fixed, 0};
}

CesdThreshold calibrate_threshold(std::span<const CesdReport> training_reports) {
  if (training_reports.empty()) {
    throw Error(ErrorKind::empty_calibration_set,
                "no depressive training videos to calibrate from");
  }
  double total = 0.0;
  for (const auto& report : training_reports) total += report.video_score;
  return {total / static_cast<double>(training_reports.size()),
          CesdThreshold::Provenance::calibrated, training_reports.size()};
}

Label label_by_threshold(const CesdReport& report,
                         const CesdThreshold& threshold) {
  return report.video_score > threshold.value ? Label::depressive
                                              : Label::non_depressive;
}

json to_json(const CommentScore& score) {
  return json{{"comment_id", score.comment_id},
              {"term_freq", score.term_freq},
              {"negative", score.negative},
              {"positive", score.positive},
              {"connotation", score.connotation},
              {"score", score.score}};
}

json to_json(const CesdReport& report) {
  json comments = json::array();
  for (const auto& c : report.comment_scores) comments.push_back(to_json(c));
  return json{{"video_id", report.video_id},
              {"aggregate_mode", to_string(report.aggregate_mode)},
              {"counting", to_string(report.counting)},
              {"video_score", report.video_score},
              {"n_comments", report.n_comments},
              {"zero_comments", report.zero_comments},
              {"zero_fraction", report.zero_fraction},
              {"lexicon_hash", report.lexicon_hash},
              {"comment_scores", std::move(comments)}};
}

CesdReport cesd_report_from_json(const json& doc) {
  CesdReport report;
  report.video_id = detail::require_as<std::string>(doc, "video_id");
  report.aggregate_mode = parse_aggregate_mode(
      detail::require_as<std::string>(doc, "aggregate_mode"));
  report.counting =
      parse_counting(detail::require_as<std::string>(doc, "counting"));
  report.video_score = detail::require_as<double>(doc, "video_score");
  report.n_comments = detail::require_as<std::size_t>(doc, "n_comments");
  report.zero_comments = detail::require_as<std::size_t>(doc, "zero_comments");
  report.zero_fraction = detail::require_as<double>(doc, "zero_fraction");
  report.lexicon_hash = detail::require_as<std::string>(doc, "lexicon_hash");
  for (const auto& c : detail::require(doc, "comment_scores")) {
    report.comment_scores.push_back(
        {detail::require_as<std::string>(c, "comment_id"),
         detail::require_as<double>(c, "term_freq"),
         detail::require_as<double>(c, "negative"),
         detail::require_as<double>(c, "positive"),
         detail::require_as<double>(c, "connotation"),
         detail::require_as<double>(c, "score")});
  }
  return report;
}

json to_json(const CesdThreshold& threshold) {
  return json{{"value", threshold.value},
              {"provenance", to_string(threshold.provenance)},
              {"calibration_set_size", threshold.calibration_set_size}};
}

}  // namespace depscan
