#include "dnsasm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dnsasm {

FeatureKind parse_feature(char letter) {
  switch (letter) {
    case 'A': case 'a': return FeatureKind::total_packets;
    case 'B': case 'b': return FeatureKind::malformed_received;
    case 'C': case 'c': return FeatureKind::transmitted;
    default: break;
  }
  throw std::invalid_argument(fmt::format("unknown feature '{}'", letter));
}

SeriesKey::SeriesKey(FeatureKind f, std::optional<std::string> address)
    : feature(f), ip(std::move(address)) {
  if (f == FeatureKind::total_packets && ip) {
    throw std::invalid_argument("feature A is global and takes no ip");
  }
  if (f != FeatureKind::total_packets && (!ip || ip->empty())) {
    throw std::invalid_argument(
        fmt::format("feature {} requires an ip", feature_letter(f)));
  }
}

std::string SeriesKey::to_string() const {
  if (!ip) return std::string(1, feature_letter(feature));
  return fmt::format("{}:{}", feature_letter(feature), *ip);
}

SeriesKey SeriesKey::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty series key");
  const FeatureKind f = parse_feature(text.front());
  if (text.size() == 1) return SeriesKey(f, std::nullopt);
  if (text[1] != ':' || text.size() == 2) {
    throw std::invalid_argument(fmt::format("malformed series key '{}'", text));
  }
  return SeriesKey(f, std::string(text.substr(2)));
}

MinuteSeries::MinuteSeries(SeriesKey key, std::int64_t start_minute, std::vector<double> values)
    : key_(std::move(key)), start_minute_(start_minute), values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw std::invalid_argument(
          fmt::format("series {} has invalid value {} at index {}", key_.to_string(), values_[i], i));
    }
  }
}

WindowSlice::WindowSlice(const MinuteSeries& parent, std::size_t offset, std::size_t length)
    : parent_(&parent), offset_(offset), length_(length) {
  if (offset > parent.size() || length > parent.size() - offset) {
    throw std::out_of_range(fmt::format("window [{}, {}) exceeds series of length {}", offset,
                                        offset + length, parent.size()));
  }
}

WindowSlice slice(const MinuteSeries& series, std::size_t offset, std::size_t length) {
  return WindowSlice(series, offset, length);
}

WindowSlice slice(const WindowSlice& window, std::size_t offset, std::size_t length) {
  if (offset > window.length() || length > window.length() - offset) {
    throw std::out_of_range(fmt::format("sub-window [{}, {}) exceeds window of length {}", offset,
                                        offset + length, window.length()));
  }
  return WindowSlice(window.parent(), window.offset() + offset, length);
}

SeriesStats running_stats(const MinuteSeries& series, std::size_t upto) {
  if (upto > series.size()) {
    throw std::out_of_range(
        fmt::format("running_stats upto {} exceeds series length {}", upto, series.size()));
  }
  const auto prefix = series.values().first(upto);
  SeriesStats stats;
  stats.count = upto;
  if (!prefix.empty()) stats.maxvalue = *std::ranges::max_element(prefix);
  return stats;
}

std::vector<double> prefix_maxima(std::span<const double> values) {
  std::vector<double> out(values.size() + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) out[i + 1] = std::max(out[i], values[i]);
  return out;
}

}  // namespace dnsasm
