#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dnsasm/approx_match.hpp"

namespace dnsasm {

/// Mean of the windows that follow each usable match, or a cold start when no
/// match has a complete following window.
struct Prediction {
  std::vector<double> values;
  std::size_t contributor_count = 0;

  bool cold_start() const noexcept { return contributor_count == 0; }
};

/// Only matches s with s + k + h <= |text| contribute. The occurrence of the
/// pattern at the very end of the text never does.
Prediction predict(std::span<const double> text, const MatchSet& matches, std::size_t k,
                   std::size_t h);

/// Order-of-magnitude rule used when there is nothing to predict from:
/// mean(observed) >= factor * max(mean(pattern), 1).
bool cold_start_decision(std::span<const double> pattern, std::span<const double> observed,
                         double factor = 10.0);

double mean_of(std::span<const double> values) noexcept;

}  // namespace dnsasm
