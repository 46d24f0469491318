#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnsasm {

/// Traffic features tracked by the detector.
///   total_packets       (A) every DNS packet, one global series
///   malformed_received  (B) malformed packets received, one series per IP
///   transmitted         (C) packets transmitted, one series per IP
enum class FeatureKind : std::uint8_t { total_packets, malformed_received, transmitted };

inline constexpr FeatureKind kAllFeatures[] = {
    FeatureKind::total_packets, FeatureKind::malformed_received, FeatureKind::transmitted};

/// Fixed score weights 1 / 2 / 4 for A / B / C.
constexpr int feature_score(FeatureKind f) noexcept {
  switch (f) {
    case FeatureKind::total_packets: return 1;
    case FeatureKind::malformed_received: return 2;
    case FeatureKind::transmitted: return 4;
  }
  return 0;
}

constexpr char feature_letter(FeatureKind f) noexcept {
  switch (f) {
    case FeatureKind::total_packets: return 'A';
    case FeatureKind::malformed_received: return 'B';
    case FeatureKind::transmitted: return 'C';
  }
  return '?';
}

/// Throws std::invalid_argument for anything other than A, B or C.
FeatureKind parse_feature(char letter);

struct SeriesKey {
  FeatureKind feature = FeatureKind::total_packets;
  std::optional<std::string> ip;

  SeriesKey() = default;
  /// Feature A takes no ip; B and C require one.
  SeriesKey(FeatureKind f, std::optional<std::string> address);

  /// "A", "B:10.0.0.1", "C:10.0.0.1".
  std::string to_string() const;
  static SeriesKey parse(std::string_view text);

  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
  friend bool operator==(const SeriesKey&, const SeriesKey&) = default;
};

/// One non-negative count per minute, gap free from start_minute onwards.
class MinuteSeries {
 public:
  MinuteSeries() = default;
  MinuteSeries(SeriesKey key, std::int64_t start_minute, std::vector<double> values);

  const SeriesKey& key() const noexcept { return key_; }
  std::int64_t start_minute() const noexcept { return start_minute_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const MinuteSeries&, const MinuteSeries&) = default;

 private:
  SeriesKey key_;
  std::int64_t start_minute_ = 0;
  std::vector<double> values_;
};

/// Non-owning view over a contiguous run of minutes of a parent series.
class WindowSlice {
 public:
  WindowSlice(const MinuteSeries& parent, std::size_t offset, std::size_t length);

  const MinuteSeries& parent() const noexcept { return *parent_; }
  std::size_t offset() const noexcept { return offset_; }
  std::size_t length() const noexcept { return length_; }
  std::span<const double> values() const noexcept {
    return parent_->values().subspan(offset_, length_);
  }
  std::int64_t start_minute() const noexcept {
    return parent_->start_minute() + static_cast<std::int64_t>(offset_);
  }

 private:
  const MinuteSeries* parent_;
  std::size_t offset_;
  std::size_t length_;
};

struct SeriesStats {
  double maxvalue = 0.0;
  std::size_t count = 0;
};

/// Throws std::out_of_range when offset + length exceeds the series.
WindowSlice slice(const MinuteSeries& series, std::size_t offset, std::size_t length);
/// Offsets are relative to the window; the result still refers to the parent series.
WindowSlice slice(const WindowSlice& window, std::size_t offset, std::size_t length);

/// Statistics over values[0, upto). Throws std::out_of_range if upto > size.
SeriesStats running_stats(const MinuteSeries& series, std::size_t upto);

/// prefix_max[i] = max of values[0, i), with prefix_max[0] = 0. Size is n + 1.
std::vector<double> prefix_maxima(std::span<const double> values);

}  // namespace dnsasm
