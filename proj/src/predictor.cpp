#include "dnsasm/predictor.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dnsasm {

double mean_of(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Prediction predict(std::span<const double> text, const MatchSet& matches, std::size_t k,
                   std::size_t h) {
  if (k == 0 || h == 0) throw std::invalid_argument("predict: k and h must be positive");
  Prediction out;
  std::vector<double> sums(h, 0.0);
  for (const std::size_t s : matches) {
    if (s + k + h > text.size()) continue;
    for (std::size_t i = 0; i < h; ++i) sums[i] += text[s + k + i];
    ++out.contributor_count;
  }
  if (out.contributor_count == 0) return out;
  const auto n = static_cast<double>(out.contributor_count);
  out.values.resize(h);
  std::ranges::transform(sums, out.values.begin(), [n](double s) { return s / n; });
  return out;
}

bool cold_start_decision(std::span<const double> pattern, std::span<const double> observed,
                         double factor) {
  if (pattern.empty() || observed.empty()) {
    throw std::invalid_argument("cold_start_decision: empty window");
  }
  if (!(factor > 0.0)) throw std::invalid_argument("cold_start_decision: factor must be positive");
  return mean_of(observed) >= factor * std::max(mean_of(pattern), 1.0);
}

}  // namespace dnsasm
