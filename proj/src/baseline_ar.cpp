#include "dnsasm/baseline_ar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace dnsasm {

namespace {

constexpr double kRidge = 1e-9;
constexpr std::size_t kLagCap = 60;

// In-place lower Cholesky factor of a symmetric positive definite matrix.
void cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    d = std::sqrt(std::max(d, std::numeric_limits<double>::min()));
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
}

}  // namespace

LagMoments::LagMoments(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  sum_.assign(n + 1, 0.0);
  for (std::size_t v = 0; v < n; ++v) sum_[v + 1] = sum_[v] + series[v];
  cross_.resize(max_lag + 1);
  for (std::size_t d = 0; d <= max_lag; ++d) {
    auto& c = cross_[d];
    const std::size_t len = n > d ? n - d : 0;
    c.assign(len + 1, 0.0);
    for (std::size_t v = 0; v < len; ++v) c[v + 1] = c[v] + series[v] * series[v + d];
  }
}

ArModel LagMoments::fit(std::size_t offset, std::size_t length, std::size_t max_lag) const {
  if (max_lag < 1) throw std::invalid_argument("fit_ar: max_lag must be at least 1");
  if (max_lag > this->max_lag()) {
    throw std::invalid_argument(
        fmt::format("fit_ar: max_lag {} exceeds prepared lag {}", max_lag, this->max_lag()));
  }
  if (length < 2 * max_lag + 2) {
    throw std::invalid_argument(fmt::format(
        "fit_ar: history of {} values is too short for max_lag {} (need {})", length, max_lag,
        2 * max_lag + 2));
  }
  if (offset + length + 1 > sum_.size()) throw std::out_of_range("fit_ar: window out of range");

  const std::size_t P = max_lag;
  const std::size_t dim = P + 1;
  const double N = static_cast<double>(length - P);
  const double mu = range_sum(offset, offset + length) / static_cast<double>(length);

  // Responses are t in [P, length); lag i of t reads index offset + t - i.
  std::vector<double> lag_sum(dim);
  for (std::size_t i = 0; i <= P; ++i) {
    lag_sum[i] = range_sum(offset + P - i, offset + length - i) - N * mu;
  }
  auto centered_cross = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    const std::size_t d = j - i;
    const double raw = range_cross(d, offset + P - j, offset + length - j);
    const double si = lag_sum[i] + N * mu;
    const double sj = lag_sum[j] + N * mu;
    return raw - mu * (si + sj) + N * mu * mu;
  };

  // Columns: intercept, lag 1 .. lag P. Right-hand side uses lag 0 (the response).
  std::vector<double> a(dim * dim, 0.0);
  std::vector<double> b(dim, 0.0);
  a[0] = N;
  b[0] = lag_sum[0];
  for (std::size_t i = 1; i <= P; ++i) {
    a[i] = a[i * dim] = lag_sum[i];
    b[i] = centered_cross(0, i);
    for (std::size_t j = i; j <= P; ++j) a[i * dim + j] = a[j * dim + i] = centered_cross(i, j);
  }
  const double yy = std::max(centered_cross(0, 0), 0.0);

  double diag_max = 1.0;
  for (std::size_t i = 0; i < dim; ++i) diag_max = std::max(diag_max, a[i * dim + i]);
  for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] += kRidge * diag_max;

  // Nested models share the leading block of one Cholesky factor, so a single
  // forward solve gives the residual sum of squares of every lag.
  cholesky(a, dim);
  std::vector<double> z(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * dim + k] * z[k];
    z[i] = s / a[i * dim + i];
  }

  const double rss_floor = std::max(yy * 1e-10, std::numeric_limits<double>::min());
  double explained = z[0] * z[0];
  std::size_t best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  double best_rss = 0.0;
  for (std::size_t p = 1; p <= P; ++p) {
    explained += z[p] * z[p];
    const double rss = std::max(yy - explained, 0.0);
    const double aic = N * std::log(std::max(rss, rss_floor) / N) + 2.0 * static_cast<double>(p + 1);
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = p;
      best_rss = rss;
    }
  }

  // Back substitution on the leading block of the chosen lag.
  const std::size_t m = best_lag + 1;
  std::vector<double> beta(m, 0.0);
  for (std::size_t ii = m; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= a[k * dim + ii] * beta[k];
    beta[ii] = s / a[ii * dim + ii];
  }

  ArModel model;
  model.lag = best_lag;
  model.training_window = length;
  model.rss = best_rss;
  model.aic = best_aic;
  model.coefficients = beta;
  double phi_sum = 0.0;
  for (std::size_t i = 1; i < m; ++i) phi_sum += beta[i];
  model.coefficients[0] = beta[0] + mu * (1.0 - phi_sum);
  return model;
}

ArModel fit_ar(std::span<const double> history, std::size_t max_lag) {
  if (max_lag < 1 || history.size() < 2 * max_lag + 2) {
    throw std::invalid_argument(fmt::format(
        "fit_ar: history of {} values is too short for max_lag {} (need {})", history.size(),
        max_lag, 2 * max_lag + 2));
  }
  return LagMoments(history, max_lag).fit(0, history.size(), max_lag);
}

std::vector<double> forecast_ar(const ArModel& model, std::span<const double> history,
                                std::size_t h) {
  if (history.size() < model.lag) {
    throw std::invalid_argument(fmt::format("forecast_ar: need {} history values, got {}",
                                            model.lag, history.size()));
  }
  std::vector<double> window(history.end() - static_cast<std::ptrdiff_t>(model.lag), history.end());
  std::vector<double> out;
  out.reserve(h);
  for (std::size_t step = 0; step < h; ++step) {
    double y = model.coefficients[0];
    for (std::size_t i = 1; i <= model.lag; ++i) y += model.coefficients[i] * window[window.size() - i];
    out.push_back(y);
    window.push_back(y);
  }
  return out;
}

std::size_t default_max_lag(std::size_t text_length) noexcept {
  return std::max<std::size_t>(1, std::min(kLagCap, text_length / 4));
}

namespace {

WindowRecord evaluate_ar(const LagMoments& moments, std::span<const double> values,
                         std::span<const double> prefix_max, std::size_t t,
                         const DetectorConfig& cfg) {
  const std::size_t from = t > cfg.lookback ? t - cfg.lookback : 0;
  const auto text = values.subspan(from, t - from);
  const auto pattern = values.subspan(t - cfg.k, cfg.k);
  const auto observed = values.subspan(t, cfg.h);

  const SeriesStats stats{prefix_max[t], t};
  const ThresholdSet th = compute_thresholds(stats, pattern, cfg.epsilon, cfg.threshold_floor);

  Prediction pred;
  const std::size_t lag = default_max_lag(text.size());
  if (text.size() >= 2 * lag + 2) {
    const ArModel model = moments.fit(from, text.size(), lag);
    pred.values = forecast_ar(model, text, cfg.h);
    for (double& v : pred.values) v = std::max(v, 0.0);
    pred.contributor_count = 1;
  }
  return decide_window(pattern, observed, pred, th, cfg);
}

}  // namespace

SeriesDetection detect_series_ar(const MinuteSeries& series, const DetectorConfig& cfg,
                                 Execution exec) {
  cfg.validate();
  if (series.size() < cfg.minimum_series_length()) {
    throw std::invalid_argument(
        fmt::format("series {} has {} minutes; at least {} (k + h + 1) are required",
                    series.key().to_string(), series.size(), cfg.minimum_series_length()));
  }
  const auto values = series.values();
  const std::vector<double> pmax = prefix_maxima(values);
  const std::vector<std::size_t> offsets = evaluation_offsets(values.size(), cfg);
  const LagMoments moments(values, default_max_lag(cfg.lookback));

  SeriesDetection out;
  out.key = series.key();
  out.horizon = cfg.h;
  out.windows.resize(offsets.size());

  const auto n = static_cast<std::ptrdiff_t>(offsets.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t w = 0; w < n; ++w) {
      out.windows[w] = evaluate_ar(moments, values, pmax, offsets[w], cfg);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t w = 0; w < n; ++w) {
      out.windows[w] = evaluate_ar(moments, values, pmax, offsets[w], cfg);
    }
  }
  for (std::size_t w = 0; w < offsets.size(); ++w) {
    out.windows[w].window_start = series.start_minute() + static_cast<std::int64_t>(offsets[w]);
  }
  return out;
}

}  // namespace dnsasm
