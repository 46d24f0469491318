#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dnsasm/ingest.hpp"
#include "dnsasm/model.hpp"

namespace dnsasm {

struct AttackSpec {
  std::int64_t start_minute = 0;  ///< minutes since the profile start
  std::int64_t duration_minutes = 30;
  double magnitude = 10.0;        ///< multiplier on the whole minute's traffic
  std::vector<FeatureKind> targets{FeatureKind::total_packets, FeatureKind::transmitted};
  std::size_t target_host = 0;    ///< index into the internal host pool
};

/// Two-level diurnal traffic with uniform multiplicative noise and injected
/// volume attacks.
struct SynthProfile {
  int days = 10;
  std::int64_t high_rate = 200000;  ///< packets per hour inside the high window
  std::int64_t low_rate = 75000;    ///< packets per hour outside it
  int high_start_hour = 14;         ///< [start, end) in hours of the day
  int high_end_hour = 24;
  double noise_fraction = 0.05;
  double tx_fraction = 0.5;         ///< share of normal packets leaving the subnet
  double malformed_fraction = 0.1; ///< share of received packets flagged malformed
  std::vector<AttackSpec> attacks;
  std::uint64_t seed = 7;
  std::int64_t epoch_start_minute = 20953440;  ///< 2009-11-03 00:00 UTC

  /// Throws std::invalid_argument.
  void validate() const;
  std::int64_t total_minutes() const noexcept { return static_cast<std::int64_t>(days) * 1440; }

  /// Ten days with five 10x / 30 minute attacks; attacks outside a shorter
  /// span are dropped.
  static SynthProfile default_profile(int days = 10);
};

/// Monitored hosts (sources of transmitted traffic) and outside resolvers.
const std::vector<std::string>& internal_hosts();
const std::vector<std::string>& external_hosts();

/// Packets in minute m before noise: the hourly rate spread over the hour with
/// carried remainders, so every hour sums exactly to its rate.
std::int64_t base_count(const SynthProfile& profile, std::int64_t minute);
bool in_attack(const SynthProfile& profile, std::int64_t minute);

/// Ground truth in epoch minutes, one interval per attack, inclusive ends.
std::vector<GroundTruthInterval> ground_truth(const SynthProfile& profile);

/// Emits records in timestamp order. Fully determined by the profile and its seed.
void generate(const SynthProfile& profile, const std::function<void(const DnsEventRecord&)>& sink);

struct SynthOutput {
  std::vector<DnsEventRecord> events;
  std::vector<GroundTruthInterval> truth;
};
SynthOutput generate(const SynthProfile& profile);

/// Aggregated series of a generated profile, without materialising the events.
SeriesMap generate_series(const SynthProfile& profile, IpKeying keying = {});

}  // namespace dnsasm
