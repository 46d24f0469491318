#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "dnsasm/detector.hpp"
#include "dnsasm/evalharness.hpp"

namespace dnsasm {

/// Report JSON: an array of {key, start_minute, end_minute, mse, cosine, features, score}
/// with cosine null for cold-start detections and features as letters.
void write_report_json(std::ostream& out, std::span<const AnomalyEvent> events);
/// Throws ParseError on malformed input.
std::vector<AnomalyEvent> parse_report_json(std::istream& in);

inline constexpr std::string_view kReportCsvHeader =
    "key,start_minute,end_minute,mse,cosine,features,score";
void write_report_csv(std::ostream& out, std::span<const AnomalyEvent> events);

inline constexpr std::string_view kWindowsHeader =
    "series_key,window_start,flagged,mse,cosine,cold_start";
/// Per-window flags of every detection; cosine is left empty when absent.
void write_windows_csv(std::ostream& out, std::span<const SeriesDetection> detections);

void write_metrics_json(std::ostream& out, const ConfusionCounts& c, const Metrics& m);
void write_metrics_csv(std::ostream& out, const ConfusionCounts& c, const Metrics& m);

}  // namespace dnsasm
