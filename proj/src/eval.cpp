#include "depscan/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "depscan/error.hpp"

namespace depscan {

using nlohmann::json;

double ConfusionMatrix::accuracy() const noexcept {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(n);
}

void ConfusionMatrix::add(Label predicted, Label reference) {
  const bool p = predicted == Label::depressive;
  const bool r = reference == Label::depressive;
  if (p && r) ++tp;
  else if (p) ++fp;
  else if (r) ++fn;
  else ++tn;
}

ConfusionMatrix confusion(std::span<const Label> predicted,
                          std::span<const Label> reference) {
  if (predicted.size() != reference.size()) {
    throw Error(ErrorKind::length_mismatch,
                std::to_string(predicted.size()) + " predictions vs " +
                    std::to_string(reference.size()) + " references");
  }
  if (predicted.empty()) {
    throw Error(ErrorKind::empty_input, "nothing to evaluate");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted.size(); ++i) m.add(predicted[i], reference[i]);
  return m;
}

ProxyEvaluation proxy_evaluate(const NbModel& model, const FeatureSpace& space,
                               std::span<const VideoSample> videos,
                               const LexiconBundle& bundle,
                               const CesdThreshold& threshold,
                               const ProxyOptions& options) {
  check_compatible(model, space);
  ProxyEvaluation out;
  for (const auto& video : videos) {
    ProxyRecord record;
    record.video_id = video.video_id;
    const Prediction prediction = predict(model, space.vectorize(video.transcript));
    record.predicted = prediction.label;
    record.posterior_depressive = prediction.posterior[class_index(Label::depressive)];
    record.n_comments = video.comments.size();
    if (video.comments.empty()) {
      record.excluded = true;
      ++out.excluded;
    } else {
      const CesdReport report =
          video_cesd(video.video_id, video.comments, bundle,
                     options.aggregate_mode, options.counting);
      record.video_score = report.video_score;
      record.reference = label_by_threshold(report, threshold);
      out.matrix.add(record.predicted, *record.reference);
    }
    out.records.push_back(std::move(record));
  }
  return out;
}

std::vector<CategoryStats> category_stats(std::span<const CategoryGroup> groups) {
  std::vector<CategoryStats> out;
  for (const auto& group : groups) {
    if (group.reports.empty()) {
      throw Error(ErrorKind::empty_group,
                  "category '" + group.category + "' has no videos");
    }
    // Sorted copy so the mean does not depend on report order.
    std::vector<double> scores;
    std::size_t comments = 0;
    std::size_t zero = 0;
    for (const auto& r : group.reports) {
      scores.push_back(r.video_score);
      comments += r.n_comments;
      zero += r.zero_comments;
    }
    std::sort(scores.begin(), scores.end());
    CategoryStats s;
    s.category = group.category;
    s.n_videos = scores.size();
    double total = 0.0;
    for (const double v : scores) total += v;
    s.mean_score = total / static_cast<double>(scores.size());
    s.min_score = scores.front();
    s.max_score = scores.back();
    s.score_range = s.max_score - s.min_score;
    s.zero_comment_fraction =
        comments == 0 ? 0.0
                      : static_cast<double>(zero) / static_cast<double>(comments);
    out.push_back(std::move(s));
  }
  return out;
}

std::string plot_table(std::span<const CategoryGroup> groups) {
  std::string out = "category\tvideo_id\tvideo_score\tzero_fraction\tn_comments\n";
  char buf[64];
  for (const auto& group : groups) {
    for (const auto& r : group.reports) {
      out += group.category;
      out += '\t';
      out += r.video_id;
      std::snprintf(buf, sizeof buf, "\t%.17g\t%.17g\t%zu\n", r.video_score,
                    r.zero_fraction, r.n_comments);
      out += buf;
    }
  }
  return out;
}

json to_json(const ConfusionMatrix& m) {
  return json{{"tp", m.tp}, {"fp", m.fp},         {"tn", m.tn},
              {"fn", m.fn}, {"total", m.total()}, {"accuracy", m.accuracy()}};
}

json to_json(const ProxyEvaluation& evaluation) {
  json records = json::array();
  for (const auto& r : evaluation.records) {
    records.push_back(
        {{"video_id", r.video_id},
         {"predicted", to_string(r.predicted)},
         {"posterior_depressive", r.posterior_depressive},
         {"n_comments", r.n_comments},
         {"video_score", r.video_score},
         {"reference", r.reference ? json(to_string(*r.reference)) : json(nullptr)},
         {"excluded", r.excluded}});
  }
  return json{{"matrix", to_json(evaluation.matrix)},
              {"excluded_videos", evaluation.excluded},
              {"records", std::move(records)}};
}

json to_json(const CategoryStats& s) {
  return json{{"category", s.category},
              {"n_videos", s.n_videos},
              {"mean_score", s.mean_score},
              {"min_score", s.min_score},
              {"max_score", s.max_score},
              {"score_range", s.score_range},
              {"zero_comment_fraction", s.zero_comment_fraction}};
}

}  // namespace depscan
