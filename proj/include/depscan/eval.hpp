#pragma once

// Confusion matrices, the comment-based proxy evaluation of transcript
// classifications, and per-category CES-D statistics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "depscan/cesd.hpp"
#include "depscan/features.hpp"
#include "depscan/naive_bayes.hpp"
#include "depscan/text.hpp"
#include "depscan/types.hpp"
#include "json.hpp"

namespace depscan {

// Depressive is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  // 0 for an empty matrix.
  double accuracy() const noexcept;

  void add(Label predicted, Label reference);
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws length-mismatch, empty-input.
ConfusionMatrix confusion(std::span<const Label> predicted,
                          std::span<const Label> reference);

struct VideoSample {
  std::string video_id;
  TokenStream transcript;
  std::vector<CommentText> comments;
};

struct ProxyOptions {
  AggregateMode aggregate_mode = AggregateMode::connotation_weighted;
  Counting counting = Counting::presence;
};

struct ProxyRecord {
  std::string video_id;
  Label predicted = Label::non_depressive;
  double posterior_depressive = 0.0;
  std::size_t n_comments = 0;
  double video_score = 0.0;
  std::optional<Label> reference;  // empty when excluded
  bool excluded = false;
};

struct ProxyEvaluation {
  ConfusionMatrix matrix;
  std::vector<ProxyRecord> records;
  std::size_t excluded = 0;
};

// Reference label per video comes from its comments' CES-D score against
// `threshold`; the prediction comes from the transcript. Videos without
// comments are excluded from the matrix and counted. Throws
// feature-hash-mismatch.
ProxyEvaluation proxy_evaluate(const NbModel& model, const FeatureSpace& space,
                               std::span<const VideoSample> videos,
                               const LexiconBundle& bundle,
                               const CesdThreshold& threshold,
                               const ProxyOptions& options = {});

struct CategoryStats {
  std::string category;
  std::size_t n_videos = 0;
  double mean_score = 0.0;
  double min_score = 0.0;
  double max_score = 0.0;
  double score_range = 0.0;
  // Zero-score comments over all comments of the group's videos.
  double zero_comment_fraction = 0.0;
};

struct CategoryGroup {
  std::string category;
  std::vector<CesdReport> reports;
};

// Throws empty-group.
std::vector<CategoryStats> category_stats(std::span<const CategoryGroup> groups);

// Tab-separated rows `category video_id video_score zero_fraction n_comments`
// with a header line.
std::string plot_table(std::span<const CategoryGroup> groups);

nlohmann::json to_json(const ConfusionMatrix& matrix);
nlohmann::json to_json(const ProxyEvaluation& evaluation);
nlohmann::json to_json(const CategoryStats& stats);

}  // namespace depscan
