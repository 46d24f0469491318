#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dnsasm/model.hpp"

namespace dnsasm {

/// Direction relative to the monitored subnet.
enum class Direction : std::uint8_t { tx, rx };

struct DnsEventRecord {
  std::int64_t ts = 0;  ///< epoch seconds
  std::string src_ip;
  std::string dst_ip;
  Direction direction = Direction::tx;
  bool malformed = false;

  friend bool operator==(const DnsEventRecord&, const DnsEventRecord&) = default;
};

struct GroundTruthInterval {
  std::int64_t start_minute = 0;
  std::int64_t end_minute = 0;  ///< inclusive
  std::string label;

  friend bool operator==(const GroundTruthInterval&, const GroundTruthInterval&) = default;
};

/// Input that does not follow one of the CSV formats. The message carries the
/// line number and, where relevant, the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kEventsHeader = "ts_epoch_s,src_ip,dst_ip,direction,malformed";
inline constexpr std::string_view kTruthHeader = "start_minute,end_minute,label";
inline constexpr std::string_view kSeriesHeader = "series_key,minute,value";

/// Single-pass reader for the events CSV.
class EventReader {
 public:
  explicit EventReader(std::istream& in);
  /// False at end of input. Throws ParseError.
  bool next(DnsEventRecord& out);

 private:
  std::istream* in_;
  std::size_t line_no_ = 0;
  std::string line_;
};

std::vector<DnsEventRecord> parse_events(std::istream& in);
void write_events_header(std::ostream& out);
void write_event(std::ostream& out, const DnsEventRecord& rec);

std::vector<GroundTruthInterval> parse_ground_truth(std::istream& in);
void write_ground_truth(std::ostream& out, const std::vector<GroundTruthInterval>& truth);

/// Which address a per-IP feature is keyed on.
enum class IpSide : std::uint8_t { src, dst };

struct IpKeying {
  IpSide malformed_received = IpSide::dst;
  IpSide transmitted = IpSide::src;
};

using SeriesMap = std::map<SeriesKey, MinuteSeries>;

/// Streaming per-minute counter for all three features. Minutes are
/// floor(ts / 60); every series is zero-filled over the overall minute range.
class FeatureAggregator {
 public:
  explicit FeatureAggregator(IpKeying keying = {});
  void add(const DnsEventRecord& rec);
  /// Series of the requested feature, or of all features when none is given.
  SeriesMap finish(std::optional<FeatureKind> feature = std::nullopt) const;

  std::size_t record_count() const noexcept { return records_; }
  std::int64_t first_minute() const noexcept { return first_; }
  std::int64_t last_minute() const noexcept { return last_; }

 private:
  using Counts = std::unordered_map<std::int64_t, double>;
  IpKeying keying_;
  std::size_t records_ = 0;
  std::int64_t first_ = 0;
  std::int64_t last_ = -1;
  Counts total_;
  std::map<std::string, Counts> malformed_;
  std::map<std::string, Counts> transmitted_;
};

SeriesMap aggregate(const std::vector<DnsEventRecord>& records, FeatureKind feature,
                    IpKeying keying = {});

/// Long-format series CSV: one row per (series, minute). A file may hold any
/// number of series; rows of one series must be contiguous minutes.
void write_series(std::ostream& out, const MinuteSeries& series, bool header = true);
std::vector<MinuteSeries> parse_series(std::istream& in);

/// epoch seconds -> epoch minute (floor division).
constexpr std::int64_t minute_of(std::int64_t ts) noexcept {
  return ts >= 0 ? ts / 60 : -((-ts + 59) / 60);
}

}  // namespace dnsasm
