#include "dnsasm/approx_match.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dnsasm {

Tolerance::Tolerance(double a, double b) : alpha(a), beta(b) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw std::invalid_argument(fmt::format("tolerance must be non-negative, got ({}, {})", a, b));
  }
}

PrefixTable prefix_function(std::span<const double> pattern, double alpha) {
  if (pattern.empty()) throw std::invalid_argument("prefix_function: empty pattern");
  PrefixTable ret(pattern.size(), 0);
  for (std::size_t i = 1; i < pattern.size(); ++i) {
    std::size_t j = ret[i - 1];
    while (j > 0 && std::abs(pattern[j] - pattern[i]) > alpha) j = ret[j - 1];
    ret[i] = std::abs(pattern[j] - pattern[i]) <= alpha ? j + 1 : j;
  }
  return ret;
}

double total_error(std::span<const double> pattern, std::span<const double> text,
                   std::size_t offset) {
  if (offset > text.size() || pattern.size() > text.size() - offset) {
    throw std::out_of_range(fmt::format("total_error: window [{}, {}) exceeds text of length {}",
                                        offset, offset + pattern.size(), text.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pattern.size(); ++i) total += std::abs(pattern[i] - text[offset + i]);
  return total;
}

MatchSet search(std::span<const double> text, std::span<const double> pattern, Tolerance tol) {
  if (pattern.empty()) throw std::invalid_argument("search: empty pattern");
  MatchSet ret;
  if (pattern.size() > text.size()) return ret;

  const PrefixTable pi = prefix_function(pattern, tol.alpha);
  const std::size_t m = pattern.size();
  std::size_t j = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    while (j > 0 && std::abs(text[i] - pattern[j]) > tol.alpha) j = pi[j - 1];
    if (std::abs(text[i] - pattern[j]) <= tol.alpha) ++j;
    if (j == m) {
      const std::size_t start = i + 1 - m;
      if (total_error(pattern, text, start) <= tol.beta) ret.push_back(start);
      j = 0;
    }
  }
  return ret;
}

IncrementalMatcher::IncrementalMatcher(std::span<const double> initial_pattern, Tolerance tol,
                                       double restart_multiple)
    : grown_(initial_pattern.begin(), initial_pattern.end()),
      initial_length_(initial_pattern.size()),
      tol_(tol) {
  if (initial_pattern.empty()) throw std::invalid_argument("incremental matcher: empty pattern");
  if (!(restart_multiple > 1.0)) {
    throw std::invalid_argument(
        fmt::format("restart multiple must exceed 1, got {}", restart_multiple));
  }
  const auto bound = static_cast<std::size_t>(
      std::ceil(restart_multiple * static_cast<double>(initial_length_)));
  restart_length_ = std::max(bound, initial_length_ + 1);
  table_ = prefix_function(grown_, tol_.alpha);
}

bool IncrementalMatcher::matches(std::size_t pattern_index, double value) const {
  return pattern_index < ignored_ || std::abs(value - grown_[pattern_index]) <= tol_.alpha;
}

void IncrementalMatcher::extend_table() {
  // One more step of the prefix recurrence for the last element. Earlier
  // entries are kept as they were computed.
  const std::size_t i = grown_.size() - 1;
  const double v = grown_[i];
  std::size_t j = table_[i - 1];
  while (j > 0 && !matches(j, v)) j = table_[j - 1];
  table_.push_back(matches(j, v) ? j + 1 : j);
}

void IncrementalMatcher::advance(double value) {
  grown_.push_back(value);
  ++ignored_;
  if (grown_.size() >= restart_length_) {
    grown_.erase(grown_.begin(), grown_.end() - static_cast<std::ptrdiff_t>(initial_length_));
    ignored_ = 0;
    table_ = prefix_function(grown_, tol_.alpha);
    ++restarts_;
    return;
  }
  extend_table();
}

MatchSet IncrementalMatcher::search(std::span<const double> text) const {
  MatchSet ret;
  const std::size_t m = grown_.size();
  if (m > text.size()) return ret;
  const auto effective = effective_pattern();
  std::size_t j = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    while (j > 0 && !matches(j, text[i])) j = table_[j - 1];
    if (matches(j, text[i])) ++j;
    if (j == m) {
      const std::size_t start = i + 1 - effective.size();
      if (total_error(effective, text, start) <= tol_.beta) ret.push_back(start);
      j = 0;
    }
  }
  return ret;
}

bool IncrementalMatcher::same_state(const IncrementalMatcher& other) const {
  return grown_ == other.grown_ && ignored_ == other.ignored_ &&
         initial_length_ == other.initial_length_ && restart_length_ == other.restart_length_ &&
         tol_.alpha == other.tol_.alpha && tol_.beta == other.tol_.beta && table_ == other.table_;
}

IncrementalMatcher incremental_new(std::span<const double> initial_pattern, Tolerance tol,
                                   double restart_multiple) {
  return IncrementalMatcher(initial_pattern, tol, restart_multiple);
}

IncrementalMatcher incremental_advance(IncrementalMatcher m, double value) {
  m.advance(value);
  return m;
}

MatchSet incremental_search(const IncrementalMatcher& m, std::span<const double> text) {
  return m.search(text);
}

}  // namespace dnsasm
