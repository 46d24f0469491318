#include "dnsasm/report.hpp"

#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "dnsasm/ingest.hpp"

namespace dnsasm {

using nlohmann::json;

namespace {

std::string feature_string(const std::vector<FeatureKind>& features) {
  std::string s;
  for (const FeatureKind f : features) s.push_back(feature_letter(f));
  return s;
}

}  // namespace

void write_report_json(std::ostream& out, std::span<const AnomalyEvent> events) {
  json doc = json::array();
  for (const AnomalyEvent& ev : events) {
    json features = json::array();
    for (const FeatureKind f : ev.features) features.push_back(std::string(1, feature_letter(f)));
    doc.push_back({{"key", ev.key_string()},
                   {"start_minute", ev.start_minute},
                   {"end_minute", ev.end_minute},
                   {"mse", ev.mse},
                   {"cosine", ev.cosine ? json(*ev.cosine) : json(nullptr)},
                   {"features", features},
                   {"score", ev.score}});
  }
  out << doc.dump(2) << '\n';
}

std::vector<AnomalyEvent> parse_report_json(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(0, fmt::format("report is not valid JSON: {}", e.what()));
  }
  if (!doc.is_array()) throw ParseError(0, "report must be a JSON array");
  std::vector<AnomalyEvent> out;
  std::size_t idx = 0;
  for (const json& item : doc) {
    ++idx;
    try {
      AnomalyEvent ev;
      const std::string key = item.at("key").get<std::string>();
      if (key != "aggregate") ev.key = SeriesKey::parse(key);
      ev.start_minute = item.at("start_minute").get<std::int64_t>();
      ev.end_minute = item.at("end_minute").get<std::int64_t>();
      ev.mse = item.at("mse").get<double>();
      if (!item.at("cosine").is_null()) ev.cosine = item.at("cosine").get<double>();
      for (const json& f : item.at("features")) {
        const std::string letter = f.get<std::string>();
        if (letter.size() != 1) throw std::invalid_argument("feature must be one letter");
        ev.features.push_back(parse_feature(letter[0]));
      }
      ev.score = item.at("score").get<int>();
      if (ev.end_minute < ev.start_minute) throw std::invalid_argument("end_minute before start_minute");
      out.push_back(std::move(ev));
    } catch (const std::exception& e) {
      throw ParseError(idx, fmt::format("report entry {}: {}", idx, e.what()));
    }
  }
  return out;
}

void write_report_csv(std::ostream& out, std::span<const AnomalyEvent> events) {
  out << kReportCsvHeader << '\n';
  for (const AnomalyEvent& ev : events) {
    out << fmt::format("{},{},{},{},{},{},{}\n", ev.key_string(), ev.start_minute, ev.end_minute,
                       ev.mse, ev.cosine ? fmt::format("{}", *ev.cosine) : std::string(),
                       feature_string(ev.features), ev.score);
  }
}

void write_windows_csv(std::ostream& out, std::span<const SeriesDetection> detections) {
  out << kWindowsHeader << '\n';
  for (const SeriesDetection& d : detections) {
    const std::string key = d.key.to_string();
    for (const WindowRecord& w : d.windows) {
      out << fmt::format("{},{},{},{},{},{}\n", key, w.window_start, w.flagged ? 1 : 0, w.mse,
                         w.cosine ? fmt::format("{}", *w.cosine) : std::string(),
                         w.cold_start ? 1 : 0);
    }
  }
}

void write_metrics_json(std::ostream& out, const ConfusionCounts& c, const Metrics& m) {
  const json doc = {{"tp", c.tp},     {"fp", c.fp},   {"fn", c.fn},
                    {"tn", c.tn},     {"tpr", m.tpr}, {"fnr", m.fnr},
                    {"precision", m.precision},        {"f1", m.f1}};
  out << doc.dump(2) << '\n';
}

void write_metrics_csv(std::ostream& out, const ConfusionCounts& c, const Metrics& m) {
  out << "tp,fp,fn,tn,tpr,fnr,precision,f1\n";
  out << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", c.tp, c.fp, c.fn, c.tn, m.tpr,
                     m.fnr, m.precision, m.f1);
}

}  // namespace dnsasm
