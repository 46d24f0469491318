#include "dnsasm/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include <fmt/format.h>

#include "dnsasm/baseline_ar.hpp"

namespace dnsasm {

std::string_view method_name(Method m) noexcept {
  return m == Method::asm_match ? "asm" : "ar";
}

Method parse_method(std::string_view name) {
  if (name == "asm") return Method::asm_match;
  if (name == "ar") return Method::autoregression;
  throw std::invalid_argument(fmt::format("unknown method '{}' (expected asm or ar)", name));
}

std::vector<SeriesDetection> detect_all(const SeriesMap& series, const DetectorConfig& cfg,
                                        Method method, Execution exec) {
  std::vector<SeriesDetection> out;
  out.reserve(series.size());
  for (const auto& [key, s] : series) {
    out.push_back(method == Method::asm_match ? detect_series(s, cfg, exec)
                                              : detect_series_ar(s, cfg, exec));
  }
  return out;
}

namespace {

bool overlaps(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
  return a0 <= b1 && b0 <= a1;
}

}  // namespace

ConfusionCounts confusion(std::span<const AnomalyEvent> detected,
                          std::span<const GroundTruthInterval> truth, MinuteRange timeline,
                          std::int64_t window) {
  if (window < 1) throw std::invalid_argument("confusion: window must be positive");
  ConfusionCounts c;
  std::vector<bool> hit(truth.size(), false);
  for (const AnomalyEvent& ev : detected) {
    bool any = false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (overlaps(ev.start_minute, ev.end_minute, truth[i].start_minute, truth[i].end_minute)) {
        hit[i] = true;
        any = true;
      }
    }
    ++(any ? c.tp : c.fp);
  }
  c.fn = std::ranges::count(hit, false);

  if (timeline.length() > 0) {
    const std::int64_t tiles = (timeline.length() + window - 1) / window;
    std::vector<bool> busy(static_cast<std::size_t>(tiles), false);
    auto mark = [&](std::int64_t a, std::int64_t b) {
      a = std::max(a, timeline.first);
      b = std::min(b, timeline.last);
      if (a > b) return;
      for (std::int64_t t = (a - timeline.first) / window; t <= (b - timeline.first) / window; ++t) {
        busy[static_cast<std::size_t>(t)] = true;
      }
    };
    for (const auto& ev : detected) mark(ev.start_minute, ev.end_minute);
    for (const auto& g : truth) mark(g.start_minute, g.end_minute);
    c.tn = std::ranges::count(busy, false);
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  m.tpr = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  m.fnr = 1.0 - m.tpr;
  m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 1.0;
  m.f1 = m.precision + m.tpr > 0.0 ? 2.0 * m.precision * m.tpr / (m.precision + m.tpr) : 0.0;
  return m;
}

std::vector<std::size_t> lookback_minutes(std::span<const double> days) {
  std::vector<std::size_t> out;
  for (const double d : days) {
    if (!(d > 0.0)) throw std::invalid_argument(fmt::format("lookback {} days must be positive", d));
    out.push_back(static_cast<std::size_t>(std::llround(d * 1440.0)));
  }
  return out;
}

MinuteRange series_timeline(const SeriesMap& series) {
  MinuteRange r;
  bool first = true;
  for (const auto& [key, s] : series) {
    if (s.size() == 0) continue;
    const std::int64_t a = s.start_minute();
    const std::int64_t b = a + static_cast<std::int64_t>(s.size()) - 1;
    r.first = first ? a : std::min(r.first, a);
    r.last = first ? b : std::max(r.last, b);
    first = false;
  }
  return r;
}

std::vector<SweepRow> sweep(const SeriesMap& series, std::span<const GroundTruthInterval> truth,
                            const SweepConfig& cfg, Execution exec) {
  struct Cell {
    Method method;
    std::size_t lookback;
  };
  std::vector<Cell> cells;
  for (const Method m : cfg.methods) {
    for (const std::size_t lb : cfg.lookbacks) cells.push_back({m, lb});
  }
  const MinuteRange timeline = series_timeline(series);
  const std::int64_t tn_window =
      cfg.tn_window > 0 ? cfg.tn_window : static_cast<std::int64_t>(cfg.detector.stride);
  const double days = std::max(1.0, std::ceil(static_cast<double>(timeline.length()) / 1440.0));
  const std::size_t per_cell = cfg.score_thresholds.size();

  std::vector<SweepRow> rows(cells.size() * per_cell);
  auto run_cell = [&](std::size_t c) {
    DetectorConfig dc = cfg.detector;
    dc.lookback = cells[c].lookback;
    const auto detections = detect_all(series, dc, cells[c].method, Execution::serial);
    for (std::size_t t = 0; t < per_cell; ++t) {
      SweepRow& row = rows[c * per_cell + t];
      row.method = cells[c].method;
      row.lookback_minutes = cells[c].lookback;
      row.score_threshold = cfg.score_thresholds[t];
      const auto events = score_aggregate(detections, row.score_threshold);
      row.counts = confusion(events, truth, timeline, tn_window);
      row.m = metrics(row.counts);
      row.mean_fp = static_cast<double>(row.counts.fp) / days;
      row.mean_fn = static_cast<double>(row.counts.fn) / days;
    }
  };

  const auto n = static_cast<std::ptrdiff_t>(cells.size());
  if (exec == Execution::serial) {
    for (std::ptrdiff_t c = 0; c < n; ++c) run_cell(static_cast<std::size_t>(c));
  } else {
    // Propagate the first failure rather than letting it escape the region.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
      try {
        run_cell(static_cast<std::size_t>(c));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const SweepRow& r : rows) {
    out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", method_name(r.method),
                       r.lookback_minutes, r.score_threshold, r.m.tpr, r.m.fnr, r.m.precision, r.m.f1,
                       r.mean_fp, r.mean_fn);
  }
}

}  // namespace dnsasm
