#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnsasm/execution.hpp"
#include "dnsasm/model.hpp"
#include "dnsasm/predictor.hpp"

namespace dnsasm {

struct DetectorConfig {
  std::size_t k = 10;            ///< pattern length, minutes
  std::size_t h = 10;            ///< observed window length, minutes
  std::size_t lookback = 1440;   ///< history length, minutes
  double epsilon = 0.1;          ///< log base is 10 - epsilon; also scales alpha
  double cos_threshold = 0.9;    ///< cosine below this counts as dissimilar
  int score_threshold = 4;       ///< aggregate score must exceed this
  std::size_t stride = 10;       ///< minutes between evaluations
  double cold_start_factor = 10.0;
  double restart_multiple = 2.0;  ///< growth bound for IncrementalMatcher
  double threshold_floor = 1.0;   ///< lower clamp for error_threshold

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
  /// Smallest series length detect_series accepts.
  std::size_t minimum_series_length() const noexcept { return k + h + 1; }
};

struct ThresholdSet {
  double error_threshold = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Mean squared error. Throws std::invalid_argument on empty or mismatched input.
double mse(std::span<const double> pred, std::span<const double> observed);

/// Cosine similarity. A zero observed vector yields 0; a zero prediction is a
/// precondition violation (std::invalid_argument).
double cosine(std::span<const double> pred, std::span<const double> observed);

/// error_threshold = (log_{10-eps} maxvalue)^2, never below floor;
/// alpha = error_threshold * (1 + eps) * mean(P) / |P|; beta = error_threshold * mean(P).
ThresholdSet compute_thresholds(const SeriesStats& stats, std::span<const double> pattern,
                                double epsilon, double floor = 1.0);

struct WindowRecord {
  std::int64_t window_start = 0;  ///< epoch minute of the first observed minute
  bool flagged = false;
  double mse = 0.0;
  std::optional<double> cosine;   ///< absent on the cold-start path
  bool cold_start = false;

  friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

struct SeriesDetection {
  SeriesKey key;
  std::size_t horizon = 0;
  std::vector<WindowRecord> windows;

  friend bool operator==(const SeriesDetection&, const SeriesDetection&) = default;
};

/// Offsets t (relative to the series start) at which E = values[t, t+h) is judged.
/// They lie on the stride grid, start no earlier than k, and end where E would
/// run past the data.
std::vector<std::size_t> evaluation_offsets(std::size_t series_length, const DetectorConfig& cfg);

/// Shared decision step: cold start, zero-E rule, then MSE and cosine tests.
WindowRecord decide_window(std::span<const double> pattern, std::span<const double> observed,
                           const Prediction& pred, const ThresholdSet& thresholds,
                           const DetectorConfig& cfg);

/// Approximate-matching detector over one series. Throws std::invalid_argument
/// when the series is shorter than cfg.minimum_series_length().
SeriesDetection detect_series(const MinuteSeries& series, const DetectorConfig& cfg,
                              Execution exec = Execution::parallel);

struct AnomalyEvent {
  std::optional<SeriesKey> key;  ///< empty for cross-feature aggregate events
  std::int64_t start_minute = 0;
  std::int64_t end_minute = 0;   ///< inclusive
  double mse = 0.0;              ///< largest window MSE among contributors
  std::optional<double> cosine;  ///< smallest non-cold-start cosine among contributors
  std::vector<FeatureKind> features;
  int score = 0;

  std::string key_string() const { return key ? key->to_string() : std::string("aggregate"); }
  friend bool operator==(const AnomalyEvent&, const AnomalyEvent&) = default;
};

/// Merge flagged windows of all series into cross-feature events. A feature is
/// triggered at minute t when any of its series has a flagged window covering t;
/// an event is each maximal run of minutes whose score exceeds score_threshold.
std::vector<AnomalyEvent> score_aggregate(std::span<const SeriesDetection> detections,
                                          int score_threshold);

/// Runs of consecutive flagged minutes of a single series.
std::vector<AnomalyEvent> series_events(const SeriesDetection& detection);

}  // namespace dnsasm
