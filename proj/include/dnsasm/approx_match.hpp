#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dnsasm {

/// alpha bounds each per-element difference seen by the KMP scan, beta bounds the
/// summed absolute difference of an accepted window.
struct Tolerance {
  double alpha = 0.0;
  double beta = 0.0;

  Tolerance() = default;
  Tolerance(double a, double b);  // throws std::invalid_argument on negative or NaN
};

using PrefixTable = std::vector<std::size_t>;

/// Sorted start indices into the text, consecutive entries at least |P| apart.
using MatchSet = std::vector<std::size_t>;

/// Tolerant KMP prefix function. With alpha == 0 this is the classical table.
/// Throws std::invalid_argument for an empty pattern.
PrefixTable prefix_function(std::span<const double> pattern, double alpha);

/// Sum of |pattern[i] - text[offset + i]|. Throws std::out_of_range if the window
/// runs past the end of the text.
double total_error(std::span<const double> pattern, std::span<const double> text,
                   std::size_t offset);

/// Non-overlapping approximate occurrences of pattern in text.
///
/// The scan advances with the tolerant prefix function; every time a full
/// alpha-match is reached the candidate window is checked against beta and the
/// automaton is reset to the empty state, whether or not the candidate was
/// accepted. A pattern longer than the text yields an empty set.
/// Throws std::invalid_argument for an empty pattern.
MatchSet search(std::span<const double> text, std::span<const double> pattern, Tolerance tol);

/// Sliding-pattern matcher that avoids recomputing the prefix table on every
/// step. New measurements are appended to the pattern while the oldest leading
/// elements are turned into wildcards, so the effective pattern (the non-wildcard
/// suffix) always has the initial length. Once the grown pattern reaches
/// restart_multiple times the initial length the matcher rebuilds itself from
/// the effective pattern.
class IncrementalMatcher {
 public:
  /// Throws std::invalid_argument for an empty pattern or restart_multiple <= 1.
  IncrementalMatcher(std::span<const double> initial_pattern, Tolerance tol,
                     double restart_multiple = 2.0);

  /// Append one measurement; the table is extended by a single entry.
  void advance(double value);

  /// search() with wildcard semantics for the ignored prefix. Starts are
  /// reported for the effective pattern, and beta applies to it alone.
  MatchSet search(std::span<const double> text) const;

  std::span<const double> grown_pattern() const noexcept { return grown_; }
  std::span<const double> effective_pattern() const noexcept {
    return std::span<const double>(grown_).subspan(ignored_);
  }
  std::size_t ignored_prefix() const noexcept { return ignored_; }
  std::size_t initial_length() const noexcept { return initial_length_; }
  std::size_t restart_length() const noexcept { return restart_length_; }
  std::size_t restart_count() const noexcept { return restarts_; }
  const PrefixTable& prefix_table() const noexcept { return table_; }
  Tolerance tolerance() const noexcept { return tol_; }

  /// State equality, ignoring the restart counter.
  bool same_state(const IncrementalMatcher& other) const;

 private:
  bool matches(std::size_t pattern_index, double value) const;
  void extend_table();

  std::vector<double> grown_;
  std::size_t ignored_ = 0;
  std::size_t initial_length_ = 0;
  std::size_t restart_length_ = 0;
  std::size_t restarts_ = 0;
  Tolerance tol_;
  PrefixTable table_;
};

IncrementalMatcher incremental_new(std::span<const double> initial_pattern, Tolerance tol,
                                   double restart_multiple = 2.0);
IncrementalMatcher incremental_advance(IncrementalMatcher m, double value);
MatchSet incremental_search(const IncrementalMatcher& m, std::span<const double> text);

}  // namespace dnsasm
