#include "depscan/patterns.hpp"

#include <algorithm>
#include <cmath>

#include "depscan/error.hpp"

namespace depscan {
namespace {

using nlohmann::json;

bool event_order(const WatchEvent& a, const WatchEvent& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.video_id < b.video_id;
}

double depressive_fraction(std::span<const WatchEvent> events) {
  if (events.empty()) return 0.0;
  const auto depressive = std::count_if(events.begin(), events.end(), [](const auto& e) {
    return e.label == Label::depressive;
  });
  return static_cast<double>(depressive) / static_cast<double>(events.size());
}

}  // namespace

std::vector<WatchWindow> windows(std::vector<WatchEvent> history,
                                 const WindowParams& params) {
  if (params.overlap_days < 0 || params.window_days <= params.overlap_days) {
    throw Error(ErrorKind::invalid_window,
                "window of " + std::to_string(params.window_days) +
                    " days must exceed overlap of " +
                    std::to_string(params.overlap_days) + " days (>= 0)");
  }
  if (history.empty()) {
    throw Error(ErrorKind::empty_history, "watch history has no events");
  }
  std::sort(history.begin(), history.end(), event_order);

  const std::chrono::seconds length{params.window_days * kSecondsPerDay};
  const std::chrono::seconds step{(params.window_days - params.overlap_days) *
                                  kSecondsPerDay};
  const Timestamp last = history.back().timestamp;

  std::vector<WatchWindow> out;
  for (Timestamp start = utc_midnight(history.front().timestamp);; start += step) {
    WatchWindow window{start, start + length, {}, 0.0};
    const auto first = std::lower_bound(
        history.begin(), history.end(), start,
        [](const WatchEvent& e, Timestamp t) { return e.timestamp < t; });
    for (auto it = first; it != history.end() && it->timestamp < window.end; ++it) {
      window.events.push_back(*it);
    }
    window.depressive_fraction = depressive_fraction(window.events);
    const bool covers_last = window.end > last;
    out.push_back(std::move(window));
    if (covers_last) break;
  }
  return out;
}

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::decline: return "decline";
    case PatternKind::rumination: return "rumination";
    case PatternKind::high_frequency: return "high_frequency";
  }
  return "unknown";
}

double least_squares_slope(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  const double mean_x = static_cast<double>(n - 1) / 2.0;
  double mean_y = 0.0;
  for (const double v : y) mean_y += v;
  mean_y /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (y[i] - mean_y);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

PatternDetection detect_decline(std::span<const WatchWindow> series,
                                const DeclineParams& params) {
  std::vector<double> fractions;
  for (const auto& w : series) fractions.push_back(w.depressive_fraction);
  DeclineEvidence evidence;
  evidence.n_windows = fractions.size();
  evidence.slope = least_squares_slope(fractions);
  if (!fractions.empty()) {
    evidence.first_fraction = fractions.front();
    evidence.last_fraction = fractions.back();
  }
  PatternDetection out;
  out.kind = PatternKind::decline;
  out.fired = fractions.size() >= params.min_windows &&
              evidence.slope >= params.slope_threshold &&
              evidence.last_fraction > evidence.first_fraction;
  out.evidence = evidence;
  out.parameters = {{"min_windows", static_cast<double>(params.min_windows)},
                    {"slope_threshold", params.slope_threshold}};
  return out;
}

PatternDetection detect_rumination(std::span<const WatchEvent> history,
                                   const RuminationParams& params) {
  if (params.min_run < 2) {
    throw Error(ErrorKind::invalid_argument, "min_run must be at least 2");
  }
  std::vector<WatchEvent> sorted(history.begin(), history.end());
  std::sort(sorted.begin(), sorted.end(), event_order);

  RuminationEvidence best;
  std::size_t run = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    run = sorted[i].label == Label::depressive ? run + 1 : 0;
    if (run > best.run_length) {
      best.run_length = run;
      best.run_start = sorted[i + 1 - run].timestamp;
      best.run_end = sorted[i].timestamp;
    }
  }
  PatternDetection out;
  out.kind = PatternKind::rumination;
  out.fired = best.run_length >= params.min_run;
  out.evidence = best;
  out.parameters = {{"min_run", static_cast<double>(params.min_run)}};
  return out;
}

PatternDetection detect_high_frequency(std::span<const WatchWindow> series,
                                       const FrequencyParams& params) {
  if (!(params.fraction_threshold >= 0.0 && params.fraction_threshold <= 1.0)) {
    throw Error(ErrorKind::invalid_argument,
                "fraction_threshold must lie in [0, 1]");
  }
  FrequencyEvidence evidence;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& w = series[i];
    evidence.fractions.push_back(w.depressive_fraction);
    if (w.events.size() >= params.min_events &&
        w.depressive_fraction >= params.fraction_threshold) {
      evidence.qualifying.push_back(
          {i, w.start, w.events.size(), w.depressive_fraction});
    }
  }
  PatternDetection out;
  out.kind = PatternKind::high_frequency;
  out.fired = !evidence.qualifying.empty();
  out.evidence = std::move(evidence);
  out.parameters = {{"fraction_threshold", params.fraction_threshold},
                    {"min_events", static_cast<double>(params.min_events)}};
  return out;
}

json to_json(const WatchWindow& window) {
  std::size_t depressive = 0;
  for (const auto& e : window.events) depressive += e.label == Label::depressive;
  return json{{"start", format_timestamp(window.start)},
              {"end", format_timestamp(window.end)},
              {"n_events", window.events.size()},
              {"n_depressive", depressive},
              {"depressive_fraction", window.depressive_fraction},
              {"empty", window.empty()}};
}

json to_json(const PatternDetection& detection) {
  json evidence;
  if (const auto* d = std::get_if<DeclineEvidence>(&detection.evidence)) {
    evidence = {{"slope", d->slope},
                {"first_fraction", d->first_fraction},
                {"last_fraction", d->last_fraction},
                {"n_windows", d->n_windows}};
  } else if (const auto* r = std::get_if<RuminationEvidence>(&detection.evidence)) {
    evidence = {{"run_length", r->run_length},
                {"run_start", r->run_start ? json(format_timestamp(*r->run_start))
                                           : json(nullptr)},
                {"run_end", r->run_end ? json(format_timestamp(*r->run_end))
                                       : json(nullptr)}};
  } else {
    const auto& f = std::get<FrequencyEvidence>(detection.evidence);
    json qualifying = json::array();
    for (const auto& q : f.qualifying) {
      qualifying.push_back({{"window_index", q.window_index},
                            {"start", format_timestamp(q.start)},
                            {"n_events", q.n_events},
                            {"depressive_fraction", q.depressive_fraction}});
    }
    evidence = {{"fractions", f.fractions}, {"qualifying", std::move(qualifying)}};
  }
  json parameters = json::object();
  for (const auto& [name, value] : detection.parameters) parameters[name] = value;
  return json{{"kind", to_string(detection.kind)},
              {"fired", detection.fired},
              {"parameters", std::move(parameters)},
              {"evidence", std::move(evidence)}};
}

}  // namespace depscan
