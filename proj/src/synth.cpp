#include "dnsasm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace dnsasm {

void SynthProfile::validate() const {
  auto fail = [](std::string msg) { throw std::invalid_argument(std::move(msg)); };
  if (days < 1) fail("days must be at least 1");
  if (high_rate <= 0 || low_rate <= 0) fail("rates must be positive");
  if (high_start_hour < 0 || high_end_hour > 24 || high_start_hour > high_end_hour) {
    fail(fmt::format("high window [{}, {}) is not a valid hour range", high_start_hour, high_end_hour));
  }
  if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) fail("noise_fraction must be in [0, 1)");
  if (!(tx_fraction >= 0.0 && tx_fraction <= 1.0)) fail("tx_fraction must be in [0, 1]");
  if (!(malformed_fraction >= 0.0 && malformed_fraction <= 1.0)) {
    fail("malformed_fraction must be in [0, 1]");
  }
  for (const auto& a : attacks) {
    if (a.start_minute < 0 || a.duration_minutes < 1 ||
        a.start_minute + a.duration_minutes > total_minutes()) {
      fail(fmt::format("attack at minute {} (+{}) lies outside [0, {})", a.start_minute,
                       a.duration_minutes, total_minutes()));
    }
    if (!(a.magnitude >= 1.0)) fail("attack magnitude must be at least 1");
    if (a.targets.empty()) fail("attack needs at least one target feature");
    if (a.target_host >= internal_hosts().size()) fail("attack target host out of range");
  }
}

SynthProfile SynthProfile::default_profile(int days) {
  SynthProfile p;
  p.days = days;
  const std::vector<AttackSpec> canned = {
      {1 * 1440 + 9 * 60 + 13, 30, 10.0, {FeatureKind::total_packets, FeatureKind::transmitted}, 0},
      {3 * 1440 + 15 * 60 + 47, 30, 10.0, {FeatureKind::total_packets, FeatureKind::transmitted}, 1},
      {5 * 1440 + 2 * 60 + 21, 30, 10.0,
       {FeatureKind::total_packets, FeatureKind::malformed_received, FeatureKind::transmitted}, 2},
      {7 * 1440 + 20 * 60 + 5, 30, 10.0,
       {FeatureKind::total_packets, FeatureKind::malformed_received, FeatureKind::transmitted}, 3},
      {9 * 1440 + 17 * 60 + 33, 30, 10.0, {FeatureKind::total_packets, FeatureKind::transmitted}, 0},
  };
  for (const auto& a : canned) {
    if (a.start_minute + a.duration_minutes <= p.total_minutes()) p.attacks.push_back(a);
  }
  return p;
}

const std::vector<std::string>& internal_hosts() {
  static const std::vector<std::string> hosts = {"172.28.10.6", "172.28.10.7", "172.28.108.88",
                                                 "172.28.20.3"};
  return hosts;
}

const std::vector<std::string>& external_hosts() {
  static const std::vector<std::string> hosts = {"198.51.100.1", "198.51.100.2", "203.0.113.5",
                                                 "203.0.113.9"};
  return hosts;
}

namespace {

std::int64_t hourly_rate(const SynthProfile& p, std::int64_t minute) {
  const auto hour = static_cast<int>((minute % 1440) / 60);
  return hour >= p.high_start_hour && hour < p.high_end_hour ? p.high_rate : p.low_rate;
}

}  // namespace

std::int64_t base_count(const SynthProfile& p, std::int64_t minute) {
  // Within an hour the rate is constant, so the carried remainder restarts on
  // every hour boundary and the hour sums exactly to its rate.
  const std::int64_t rate = hourly_rate(p, minute);
  const std::int64_t in_hour = minute % 60;
  return rate * (in_hour + 1) / 60 - rate * in_hour / 60;
}

bool in_attack(const SynthProfile& p, std::int64_t minute) {
  return std::ranges::any_of(p.attacks, [minute](const AttackSpec& a) {
    return minute >= a.start_minute && minute < a.start_minute + a.duration_minutes;
  });
}

std::vector<GroundTruthInterval> ground_truth(const SynthProfile& p) {
  std::vector<GroundTruthInterval> out;
  std::size_t n = 0;
  for (const auto& a : p.attacks) {
    std::string targets;
    for (const FeatureKind f : a.targets) targets.push_back(feature_letter(f));
    out.push_back({p.epoch_start_minute + a.start_minute,
                   p.epoch_start_minute + a.start_minute + a.duration_minutes - 1,
                   fmt::format("attack-{} {} {}", ++n, targets, internal_hosts()[a.target_host])});
  }
  return out;
}

void generate(const SynthProfile& p, const std::function<void(const DnsEventRecord&)>& sink) {
  p.validate();
  const auto& inside = internal_hosts();
  const auto& outside = external_hosts();
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_in(0, inside.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_out(0, outside.size() - 1);

  DnsEventRecord rec;
  std::vector<DnsEventRecord> batch;
  for (std::int64_t m = 0; m < p.total_minutes(); ++m) {
    const double noisy =
        static_cast<double>(base_count(p, m)) * (1.0 + (2.0 * unit(rng) - 1.0) * p.noise_fraction);
    const auto normal = static_cast<std::int64_t>(std::floor(noisy));

    const AttackSpec* attack = nullptr;
    for (const auto& a : p.attacks) {
      if (m >= a.start_minute && m < a.start_minute + a.duration_minutes) attack = &a;
    }
    const std::int64_t total =
        attack ? static_cast<std::int64_t>(std::ceil(attack->magnitude * noisy)) : normal;

    batch.clear();
    for (std::int64_t e = 0; e < normal; ++e) {
      if (unit(rng) < p.tx_fraction) {
        rec.src_ip = inside[pick_in(rng)];
        rec.dst_ip = outside[pick_out(rng)];
        rec.direction = Direction::tx;
        rec.malformed = false;
      } else {
        rec.src_ip = outside[pick_out(rng)];
        rec.dst_ip = inside[pick_in(rng)];
        rec.direction = Direction::rx;
        rec.malformed = unit(rng) < p.malformed_fraction;
      }
      batch.push_back(rec);
    }
    if (attack) {
      // Extra packets go round-robin to the per-host features the attack
      // targets; an attack on A alone adds ordinary-looking traffic.
      std::vector<FeatureKind> per_host;
      for (const FeatureKind f : attack->targets) {
        if (f != FeatureKind::total_packets) per_host.push_back(f);
      }
      const std::string& victim = inside[attack->target_host];
      for (std::int64_t e = 0; e < total - normal; ++e) {
        const FeatureKind f = per_host.empty()
                                  ? FeatureKind::total_packets
                                  : per_host[static_cast<std::size_t>(e) % per_host.size()];
        if (f == FeatureKind::transmitted) {
          rec.src_ip = victim;
          rec.dst_ip = outside[pick_out(rng)];
          rec.direction = Direction::tx;
          rec.malformed = false;
        } else if (f == FeatureKind::malformed_received) {
          rec.src_ip = outside[pick_out(rng)];
          rec.dst_ip = victim;
          rec.direction = Direction::rx;
          rec.malformed = true;
        } else {
          rec.src_ip = outside[pick_out(rng)];
          rec.dst_ip = inside[pick_in(rng)];
          rec.direction = Direction::rx;
          rec.malformed = false;
        }
        batch.push_back(rec);
      }
    }
    const std::int64_t minute_ts = (p.epoch_start_minute + m) * 60;
    const auto count = static_cast<std::int64_t>(batch.size());
    for (std::int64_t e = 0; e < count; ++e) {
      DnsEventRecord& r = batch[static_cast<std::size_t>(e)];
      r.ts = minute_ts + e * 60 / count;
      sink(r);
    }
  }
}

SynthOutput generate(const SynthProfile& p) {
  SynthOutput out;
  generate(p, [&out](const DnsEventRecord& r) { out.events.push_back(r); });
  out.truth = ground_truth(p);
  return out;
}

SeriesMap generate_series(const SynthProfile& p, IpKeying keying) {
  FeatureAggregator agg(keying);
  generate(p, [&agg](const DnsEventRecord& r) { agg.add(r); });
  return agg.finish();
}

}  // namespace dnsasm
