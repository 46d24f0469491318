#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dnsasm/detector.hpp"
#include "dnsasm/execution.hpp"
#include "dnsasm/model.hpp"

namespace dnsasm {

/// y_t = coefficients[0] + sum_i coefficients[i] * y_{t-i}, i = 1..lag.
struct ArModel {
  std::size_t lag = 0;
  std::vector<double> coefficients;
  std::size_t training_window = 0;
  double rss = 0.0;
  double aic = 0.0;
};

/// Lagged sums and cross-products of a whole series, built once so that any
/// window of it can be fitted without touching the raw values again.
class LagMoments {
 public:
  LagMoments(std::span<const double> series, std::size_t max_lag);

  /// Least-squares AR fit over series[offset, offset + length), choosing the lag
  /// in 1..max_lag by AIC on the common sample t = max_lag .. length-1.
  /// Throws std::invalid_argument if length < 2 * max_lag + 2 or max_lag exceeds
  /// the lag this object was built for.
  ArModel fit(std::size_t offset, std::size_t length, std::size_t max_lag) const;

  std::size_t max_lag() const noexcept { return cross_.empty() ? 0 : cross_.size() - 1; }

 private:
  double range_sum(std::size_t from, std::size_t to) const { return sum_[to] - sum_[from]; }
  double range_cross(std::size_t d, std::size_t from, std::size_t to) const {
    return cross_[d][to] - cross_[d][from];
  }

  std::vector<double> sum_;                 // sum_[u] = sum_{v<u} y_v
  std::vector<std::vector<double>> cross_;  // cross_[d][u] = sum_{v<u} y_v * y_{v+d}
};

ArModel fit_ar(std::span<const double> history, std::size_t max_lag);

/// Iterated one-step forecasts; earlier forecasts feed later ones.
std::vector<double> forecast_ar(const ArModel& model, std::span<const double> history,
                                std::size_t h);

/// min(60, text_length / 4), at least 1.
std::size_t default_max_lag(std::size_t text_length) noexcept;

/// Same windows, thresholds and decision as detect_series with the prediction
/// replaced by an AR forecast fitted on the lookback window. Negative forecasts
/// are clipped to zero.
SeriesDetection detect_series_ar(const MinuteSeries& series, const DetectorConfig& cfg,
                                 Execution exec = Execution::parallel);

}  // namespace dnsasm
