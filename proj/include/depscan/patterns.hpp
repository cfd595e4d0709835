#pragma once

// Sliding-window analysis of a classified watch history: gradual decline,
// rumination runs and high frequency of depressive videos.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "depscan/types.hpp"
#include "json.hpp"

namespace depscan {

struct WatchEvent {
  std::string video_id;
  Timestamp timestamp;
  Label label = Label::non_depressive;
  std::optional<double> score;  // posterior for depressive, when known
};

struct WatchWindow {
  Timestamp start;
  Timestamp end;  // exclusive
  std::vector<WatchEvent> events;
  double depressive_fraction = 0.0;

  bool empty() const noexcept { return events.empty(); }
};

struct WindowParams {
  int window_days = 24;
  int overlap_days = 10;
};

// Windows start at midnight UTC of the earliest event's day and advance by
// window_days - overlap_days. Generation stops at the first window reaching
// past the last event, so every event is covered. Empty windows are kept.
// Throws invalid-window, empty-history.
std::vector<WatchWindow> windows(std::vector<WatchEvent> history,
                                 const WindowParams& params = {});

enum class PatternKind { decline, rumination, high_frequency };

std::string_view to_string(PatternKind kind);

struct DeclineEvidence {
  double slope = 0.0;
  double first_fraction = 0.0;
  double last_fraction = 0.0;
  std::size_t n_windows = 0;
};

struct RuminationEvidence {
  std::size_t run_length = 0;
  std::optional<Timestamp> run_start;
  std::optional<Timestamp> run_end;
};

struct QualifyingWindow {
  std::size_t window_index = 0;
  Timestamp start;
  std::size_t n_events = 0;
  double depressive_fraction = 0.0;
};

struct FrequencyEvidence {
  std::vector<double> fractions;  // every window, in order
  std::vector<QualifyingWindow> qualifying;
};

struct PatternDetection {
  PatternKind kind = PatternKind::decline;
  bool fired = false;
  std::variant<DeclineEvidence, RuminationEvidence, FrequencyEvidence> evidence;
  std::vector<std::pair<std::string, double>> parameters;
};

struct DeclineParams {
  std::size_t min_windows = 3;
  double slope_threshold = 0.05;
};

struct RuminationParams {
  std::size_t min_run = 5;
};

struct FrequencyParams {
  double fraction_threshold = 0.5;
  std::size_t min_events = 5;
};

// Least-squares slope of y over x = 0, 1, ..., n-1; 0 for fewer than two
// points.
double least_squares_slope(std::span<const double> y);

// Fires when there are at least min_windows windows, the slope of the
// depressive fraction over window index reaches slope_threshold, and the
// last window's fraction exceeds the first's.
PatternDetection detect_decline(std::span<const WatchWindow> series,
                                const DeclineParams& params = {});

// Fires when the longest run of consecutive depressive events (ordered by
// timestamp, then video id) reaches min_run. Throws invalid-argument when
// min_run < 2.
PatternDetection detect_rumination(std::span<const WatchEvent> history,
                                   const RuminationParams& params = {});

// Fires when any window holding at least min_events events has a depressive
// fraction >= fraction_threshold.
PatternDetection detect_high_frequency(std::span<const WatchWindow> series,
                                       const FrequencyParams& params = {});

nlohmann::json to_json(const WatchWindow& window);
nlohmann::json to_json(const PatternDetection& detection);

}  // namespace depscan
