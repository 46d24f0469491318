#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnsasm/detector.hpp"
#include "dnsasm/execution.hpp"
#include "dnsasm/ingest.hpp"

namespace dnsasm {

enum class Method { asm_match, autoregression };

std::string_view method_name(Method m) noexcept;  // "asm" / "ar"
Method parse_method(std::string_view name);       // throws std::invalid_argument

/// Runs the chosen detector over every series, ordered by key.
std::vector<SeriesDetection> detect_all(const SeriesMap& series, const DetectorConfig& cfg,
                                        Method method, Execution exec = Execution::parallel);

/// Inclusive minute range.
struct MinuteRange {
  std::int64_t first = 0;
  std::int64_t last = -1;
  std::int64_t length() const noexcept { return last - first + 1; }
};

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Interval-overlap accounting: a detection touching any truth interval is a
/// TP, otherwise an FP; a truth interval touched by no detection is an FN. TN
/// counts the window-sized tiles of the timeline touched by neither.
ConfusionCounts confusion(std::span<const AnomalyEvent> detected,
                          std::span<const GroundTruthInterval> truth, MinuteRange timeline,
                          std::int64_t window);

struct Metrics {
  double tpr = 0.0;
  double fnr = 1.0;
  double precision = 1.0;
  double f1 = 0.0;
};

Metrics metrics(const ConfusionCounts& c);

struct SweepConfig {
  std::vector<Method> methods{Method::asm_match, Method::autoregression};
  std::vector<std::size_t> lookbacks;  ///< minutes
  std::vector<int> score_thresholds{4, 5};
  DetectorConfig detector;             ///< lookback and score_threshold are overridden per cell
  std::int64_t tn_window = 0;          ///< 0 means the detector stride
};

/// Lookbacks used in the evaluation grid, in days.
inline constexpr double kDefaultLookbackDays[] = {0.04, 0.08, 0.25, 0.5, 0.75, 1, 2, 3, 4, 5};
std::vector<std::size_t> lookback_minutes(std::span<const double> days);

struct SweepRow {
  Method method = Method::asm_match;
  std::size_t lookback_minutes = 0;
  int score_threshold = 0;
  ConfusionCounts counts;
  Metrics m;
  double mean_fp = 0.0;  ///< per day of timeline
  double mean_fn = 0.0;
};

/// Full cross product, rows ordered by (method, lookback, threshold) as given.
std::vector<SweepRow> sweep(const SeriesMap& series, std::span<const GroundTruthInterval> truth,
                            const SweepConfig& cfg, Execution exec = Execution::parallel);

/// Minute span shared by all series in the map.
MinuteRange series_timeline(const SeriesMap& series);

inline constexpr std::string_view kSweepHeader =
    "method,lookback_min,score_gt,tpr,fnr,precision,f1,mean_fp,mean_fn";
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace dnsasm
