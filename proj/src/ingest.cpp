#include "dnsasm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

namespace dnsasm {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

std::int64_t parse_int(std::string_view text, std::size_t line, std::string_view field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(line, fmt::format("field '{}': '{}' is not an integer", field, text));
  }
  return v;
}

double parse_double(std::string_view text, std::size_t line, std::string_view field) {
  // from_chars for double is not available in every libstdc++ we target.
  std::string buf(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (buf.empty() || used != buf.size()) {
    throw ParseError(line, fmt::format("field '{}': '{}' is not a number", field, text));
  }
  return v;
}

// First line must match the header exactly. An empty stream is a bad header too.
std::size_t expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, fmt::format("missing header '{}'", header));
  strip_cr(line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != header) {
    throw ParseError(1, fmt::format("bad header '{}', expected '{}'", line, header));
  }
  return 1;
}

}  // namespace

EventReader::EventReader(std::istream& in) : in_(&in) { line_no_ = expect_header(in, kEventsHeader); }

bool EventReader::next(DnsEventRecord& out) {
  while (std::getline(*in_, line_)) {
    ++line_no_;
    strip_cr(line_);
    if (line_.empty()) continue;
    const auto f = split_csv(line_);
    if (f.size() != 5) {
      throw ParseError(line_no_, fmt::format("expected 5 fields, got {}", f.size()));
    }
    out.ts = parse_int(f[0], line_no_, "ts_epoch_s");
    if (out.ts < 0) throw ParseError(line_no_, "field 'ts_epoch_s': negative timestamp");
    if (f[1].empty()) throw ParseError(line_no_, "field 'src_ip': empty");
    if (f[2].empty()) throw ParseError(line_no_, "field 'dst_ip': empty");
    out.src_ip.assign(f[1]);
    out.dst_ip.assign(f[2]);
    if (f[3] == "tx") {
      out.direction = Direction::tx;
    } else if (f[3] == "rx") {
      out.direction = Direction::rx;
    } else {
      throw ParseError(line_no_, fmt::format("field 'direction': '{}' is not tx or rx", f[3]));
    }
    if (f[4] == "0") {
      out.malformed = false;
    } else if (f[4] == "1") {
      out.malformed = true;
    } else {
      throw ParseError(line_no_, fmt::format("field 'malformed': '{}' is not 0 or 1", f[4]));
    }
    return true;
  }
  return false;
}

std::vector<DnsEventRecord> parse_events(std::istream& in) {
  EventReader reader(in);
  std::vector<DnsEventRecord> out;
  DnsEventRecord rec;
  while (reader.next(rec)) out.push_back(rec);
  return out;
}

void write_events_header(std::ostream& out) { out << kEventsHeader << '\n'; }

void write_event(std::ostream& out, const DnsEventRecord& rec) {
  out << rec.ts << ',' << rec.src_ip << ',' << rec.dst_ip << ','
      << (rec.direction == Direction::tx ? "tx" : "rx") << ',' << (rec.malformed ? '1' : '0')
      << '\n';
}

std::vector<GroundTruthInterval> parse_ground_truth(std::istream& in) {
  std::size_t line_no = expect_header(in, kTruthHeader);
  std::vector<GroundTruthInterval> out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    // The label is the remainder of the line after the second comma.
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw ParseError(line_no, "expected 3 fields");
    const std::string_view view(line);
    GroundTruthInterval g;
    g.start_minute = parse_int(view.substr(0, c1), line_no, "start_minute");
    g.end_minute = parse_int(view.substr(c1 + 1, c2 - c1 - 1), line_no, "end_minute");
    g.label.assign(view.substr(c2 + 1));
    if (g.end_minute < g.start_minute) {
      throw ParseError(line_no, fmt::format("end_minute {} is before start_minute {}", g.end_minute,
                                            g.start_minute));
    }
    out.push_back(std::move(g));
  }
  return out;
}

void write_ground_truth(std::ostream& out, const std::vector<GroundTruthInterval>& truth) {
  out << kTruthHeader << '\n';
  for (const auto& g : truth) out << g.start_minute << ',' << g.end_minute << ',' << g.label << '\n';
}

FeatureAggregator::FeatureAggregator(IpKeying keying) : keying_(keying) {}

void FeatureAggregator::add(const DnsEventRecord& rec) {
  const std::int64_t m = minute_of(rec.ts);
  if (records_ == 0) {
    first_ = last_ = m;
  } else {
    first_ = std::min(first_, m);
    last_ = std::max(last_, m);
  }
  ++records_;
  total_[m] += 1.0;
  if (rec.direction == Direction::rx && rec.malformed) {
    const auto& ip = keying_.malformed_received == IpSide::dst ? rec.dst_ip : rec.src_ip;
    malformed_[ip][m] += 1.0;
  }
  if (rec.direction == Direction::tx) {
    const auto& ip = keying_.transmitted == IpSide::src ? rec.src_ip : rec.dst_ip;
    transmitted_[ip][m] += 1.0;
  }
}

SeriesMap FeatureAggregator::finish(std::optional<FeatureKind> feature) const {
  SeriesMap out;
  if (records_ == 0) return out;
  const auto length = static_cast<std::size_t>(last_ - first_ + 1);
  auto densify = [&](const Counts& counts) {
    std::vector<double> v(length, 0.0);
    for (const auto& [m, c] : counts) v[static_cast<std::size_t>(m - first_)] = c;
    return v;
  };
  auto want = [&](FeatureKind f) { return !feature || *feature == f; };
  if (want(FeatureKind::total_packets)) {
    SeriesKey key(FeatureKind::total_packets, std::nullopt);
    out.emplace(key, MinuteSeries(key, first_, densify(total_)));
  }
  if (want(FeatureKind::malformed_received)) {
    for (const auto& [ip, counts] : malformed_) {
      SeriesKey key(FeatureKind::malformed_received, ip);
      out.emplace(key, MinuteSeries(key, first_, densify(counts)));
    }
  }
  if (want(FeatureKind::transmitted)) {
    for (const auto& [ip, counts] : transmitted_) {
      SeriesKey key(FeatureKind::transmitted, ip);
      out.emplace(key, MinuteSeries(key, first_, densify(counts)));
    }
  }
  return out;
}

SeriesMap aggregate(const std::vector<DnsEventRecord>& records, FeatureKind feature,
                    IpKeying keying) {
  FeatureAggregator agg(keying);
  for (const auto& r : records) agg.add(r);
  return agg.finish(feature);
}

void write_series(std::ostream& out, const MinuteSeries& series, bool header) {
  if (header) out << kSeriesHeader << '\n';
  const std::string key = series.key().to_string();
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << key << ',' << series.start_minute() + static_cast<std::int64_t>(i) << ','
        << fmt::format("{}", series[i]) << '\n';
  }
}

std::vector<MinuteSeries> parse_series(std::istream& in) {
  std::size_t line_no = expect_header(in, kSeriesHeader);
  struct Pending {
    SeriesKey key;
    std::int64_t start = 0;
    std::vector<double> values;
  };
  std::vector<Pending> pending;
  std::map<SeriesKey, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 3) throw ParseError(line_no, fmt::format("expected 3 fields, got {}", f.size()));
    SeriesKey key;
    try {
      key = SeriesKey::parse(f[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, fmt::format("field 'series_key': {}", e.what()));
    }
    const std::int64_t minute = parse_int(f[1], line_no, "minute");
    const double value = parse_double(f[2], line_no, "value");
    if (!(value >= 0.0)) throw ParseError(line_no, "field 'value': negative count");
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, pending.size());
      pending.push_back({key, minute, {value}});
      continue;
    }
    Pending& p = pending[it->second];
    const std::int64_t expected = p.start + static_cast<std::int64_t>(p.values.size());
    if (minute != expected) {
      throw ParseError(line_no, fmt::format("field 'minute': series {} expected minute {}, got {}",
                                            key.to_string(), expected, minute));
    }
    p.values.push_back(value);
  }
  std::vector<MinuteSeries> out;
  out.reserve(pending.size());
  for (auto& p : pending) out.emplace_back(p.key, p.start, std::move(p.values));
  return out;
}

}  // namespace dnsasm
