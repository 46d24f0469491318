#include "dnsasm/detector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "dnsasm/approx_match.hpp"

namespace dnsasm {

void DetectorConfig::validate() const {
  auto fail = [](std::string msg) { throw std::invalid_argument(std::move(msg)); };
  if (k < 1) fail("k must be at least 1");
  if (h < 1) fail("h must be at least 1");
  if (lookback < k + h) fail(fmt::format("lookback {} must be at least k + h = {}", lookback, k + h));
  if (stride < 1) fail("stride must be at least 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail(fmt::format("epsilon {} not in [0, 1)", epsilon));
  if (!(cos_threshold > 0.0 && cos_threshold <= 1.0)) {
    fail(fmt::format("cos_threshold {} not in (0, 1]", cos_threshold));
  }
  if (!(cold_start_factor > 0.0)) fail("cold_start_factor must be positive");
  if (!(restart_multiple > 1.0)) fail("restart_multiple must exceed 1");
  if (!(threshold_floor >= 0.0)) fail("threshold_floor must be non-negative");
}

double mse(std::span<const double> pred, std::span<const double> observed) {
  if (pred.empty() || pred.size() != observed.size()) {
    throw std::invalid_argument(
        fmt::format("mse: lengths {} and {} must match and be non-zero", pred.size(), observed.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - observed[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

double cosine(std::span<const double> pred, std::span<const double> observed) {
  if (pred.empty() || pred.size() != observed.size()) {
    throw std::invalid_argument(fmt::format("cosine: lengths {} and {} must match and be non-zero",
                                            pred.size(), observed.size()));
  }
  double dot = 0.0, pp = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    dot += pred[i] * observed[i];
    pp += pred[i] * pred[i];
    ee += observed[i] * observed[i];
  }
  if (pp == 0.0) throw std::invalid_argument("cosine: prediction is the zero vector");
  if (ee == 0.0) return 0.0;
  return dot / (std::sqrt(pp) * std::sqrt(ee));
}

ThresholdSet compute_thresholds(const SeriesStats& stats, std::span<const double> pattern,
                                double epsilon, double floor) {
  if (pattern.empty()) throw std::invalid_argument("compute_thresholds: empty pattern");
  const double base = 10.0 - epsilon;
  double et = floor;
  if (stats.maxvalue > base) {
    const double lg = std::log(stats.maxvalue) / std::log(base);
    et = std::max(floor, lg * lg);
  }
  const double mean_p = mean_of(pattern);
  ThresholdSet t;
  t.error_threshold = et;
  t.alpha = et * (1.0 + epsilon) * mean_p / static_cast<double>(pattern.size());
  t.beta = et * mean_p;
  return t;
}

std::vector<std::size_t> evaluation_offsets(std::size_t series_length, const DetectorConfig& cfg) {
  std::vector<std::size_t> out;
  std::size_t t = (cfg.k + cfg.stride - 1) / cfg.stride * cfg.stride;
  for (; t + cfg.h <= series_length; t += cfg.stride) out.push_back(t);
  return out;
}

namespace {

bool all_zero(std::span<const double> v) {
  return std::ranges::all_of(v, [](double x) { return x == 0.0; });
}

}  // namespace

WindowRecord decide_window(std::span<const double> pattern, std::span<const double> observed,
                           const Prediction& pred, const ThresholdSet& thresholds,
                           const DetectorConfig& cfg) {
  WindowRecord rec;
  if (pred.cold_start() || all_zero(pred.values)) {
    // Nothing usable to compare against: judge E against the level of P.
    rec.cold_start = true;
    const std::vector<double> level(observed.size(), mean_of(pattern));
    rec.mse = mse(level, observed);
    rec.flagged = cold_start_decision(pattern, observed, cfg.cold_start_factor);
    return rec;
  }
  rec.mse = mse(pred.values, observed);
  if (all_zero(observed)) {
    rec.cosine = 0.0;
    rec.flagged = false;
    return rec;
  }
  rec.cosine = cosine(pred.values, observed);
  rec.flagged = rec.mse > thresholds.error_threshold && *rec.cosine < cfg.cos_threshold;
  return rec;
}

namespace {

WindowRecord evaluate_asm(std::span<const double> values, std::span<const double> prefix_max,
                          std::size_t t, const DetectorConfig& cfg) {
  const std::size_t from = t > cfg.lookback ? t - cfg.lookback : 0;
  const auto text = values.subspan(from, t - from);
  const auto pattern = values.subspan(t - cfg.k, cfg.k);
  const auto observed = values.subspan(t, cfg.h);

  const SeriesStats stats{prefix_max[t], t};
  const ThresholdSet th = compute_thresholds(stats, pattern, cfg.epsilon, cfg.threshold_floor);
  const MatchSet matches = search(text, pattern, Tolerance(th.alpha, th.beta));
  const Prediction pred = predict(text, matches, cfg.k, cfg.h);
  return decide_window(pattern, observed, pred, th, cfg);
}

}  // namespace

SeriesDetection detect_series(const MinuteSeries& series, const DetectorConfig& cfg,
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

  SeriesDetection out;
  out.key = series.key();
  out.horizon = cfg.h;
  out.windows.resize(offsets.size());

  const auto n = static_cast<std::ptrdiff_t>(offsets.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t w = 0; w < n; ++w) {
      out.windows[w] = evaluate_asm(values, pmax, offsets[w], cfg);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t w = 0; w < n; ++w) {
      out.windows[w] = evaluate_asm(values, pmax, offsets[w], cfg);
    }
  }
  for (std::size_t w = 0; w < offsets.size(); ++w) {
    out.windows[w].window_start = series.start_minute() + static_cast<std::int64_t>(offsets[w]);
  }
  return out;
}

namespace {

struct MinuteState {
  unsigned mask = 0;
  double mse = 0.0;
  std::optional<double> cosine;
};

unsigned feature_bit(FeatureKind f) { return 1u << static_cast<unsigned>(f); }

void absorb(MinuteState& st, unsigned bit, const WindowRecord& w) {
  st.mask |= bit;
  st.mse = std::max(st.mse, w.mse);
  if (w.cosine) st.cosine = st.cosine ? std::min(*st.cosine, *w.cosine) : *w.cosine;
}

int mask_score(unsigned mask) {
  int s = 0;
  for (const FeatureKind f : kAllFeatures) {
    if (mask & feature_bit(f)) s += feature_score(f);
  }
  return s;
}

std::vector<FeatureKind> mask_features(unsigned mask) {
  std::vector<FeatureKind> out;
  for (const FeatureKind f : kAllFeatures) {
    if (mask & feature_bit(f)) out.push_back(f);
  }
  return out;
}

// Walk minutes in order, closing an event whenever the run is broken.
std::vector<AnomalyEvent> runs_to_events(const std::map<std::int64_t, MinuteState>& minutes,
                                         int score_threshold, const std::optional<SeriesKey>& key) {
  std::vector<AnomalyEvent> events;
  std::optional<AnomalyEvent> open;
  unsigned open_mask = 0;
  auto close = [&] {
    if (!open) return;
    open->features = mask_features(open_mask);
    open->score = mask_score(open_mask);
    events.push_back(std::move(*open));
    open.reset();
    open_mask = 0;
  };
  for (const auto& [minute, st] : minutes) {
    if (mask_score(st.mask) <= score_threshold) {
      close();
      continue;
    }
    if (open && minute != open->end_minute + 1) close();
    if (!open) {
      open = AnomalyEvent{};
      open->key = key;
      open->start_minute = minute;
      open->mse = st.mse;
      open->cosine = st.cosine;
    } else {
      open->mse = std::max(open->mse, st.mse);
      if (st.cosine) open->cosine = open->cosine ? std::min(*open->cosine, *st.cosine) : *st.cosine;
    }
    open->end_minute = minute;
    open_mask |= st.mask;
  }
  close();
  return events;
}

}  // namespace

std::vector<AnomalyEvent> score_aggregate(std::span<const SeriesDetection> detections,
                                          int score_threshold) {
  std::map<std::int64_t, MinuteState> minutes;
  for (const SeriesDetection& d : detections) {
    const unsigned bit = feature_bit(d.key.feature);
    for (const WindowRecord& w : d.windows) {
      if (!w.flagged) continue;
      for (std::size_t i = 0; i < d.horizon; ++i) {
        absorb(minutes[w.window_start + static_cast<std::int64_t>(i)], bit, w);
      }
    }
  }
  return runs_to_events(minutes, score_threshold, std::nullopt);
}

std::vector<AnomalyEvent> series_events(const SeriesDetection& detection) {
  std::map<std::int64_t, MinuteState> minutes;
  const unsigned bit = feature_bit(detection.key.feature);
  for (const WindowRecord& w : detection.windows) {
    if (!w.flagged) continue;
    for (std::size_t i = 0; i < detection.horizon; ++i) {
      absorb(minutes[w.window_start + static_cast<std::int64_t>(i)], bit, w);
    }
  }
  return runs_to_events(minutes, 0, detection.key);
}

}  // namespace dnsasm
