#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace dnsasm {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// History length l, pattern length k, d decimal digits per letter (alphabet
/// of 10^d letters) and integer tolerances.
struct ColdStartParams {
  std::int64_t l = 1440;
  std::int64_t k = 5;
  std::int64_t d = 3;
  std::int64_t alpha = 100;
  std::int64_t beta = 250;
  /// Power of ten the alignment count is divided by. Defaults to 2k, giving
  /// 1436 * 2e7 / 1e10 ≈ 3 for the default parameters.
  std::optional<std::int64_t> denominator_exponent;

  std::int64_t effective_denominator_exponent() const { return denominator_exponent.value_or(2 * k); }
  /// l >= k >= 1, d >= 1, alpha >= 1, beta >= alpha. Throws std::invalid_argument.
  void validate() const;
};

enum class CountMode { lower, inclusion_exclusion };

/// C(n, r), zero when n < 0, r < 0 or n < r.
BigInt binomial(std::int64_t n, std::int64_t r);

/// C(k, q) * (2 alpha + 1)^q * max(1, beta mod alpha) with q = floor(beta / alpha).
/// Throws std::invalid_argument when alpha == 0.
BigInt choice_count_lower(std::int64_t k, std::int64_t alpha, std::int64_t beta);

/// sum_{i=0}^{floor(beta/alpha)} (-1)^i C(k, i) C(beta - i alpha - 1, k - 1):
/// the number of compositions of beta into k parts, each in [1, alpha].
BigInt choice_count_ie(std::int64_t k, std::int64_t alpha, std::int64_t beta);

/// (l - k + 1) * choice_count / 10^denominator_exponent, exact.
BigRational expected_matches_exact(const ColdStartParams& p, CountMode mode);
double expected_matches(const ColdStartParams& p, CountMode mode);

/// Fixed-point rendering with `decimals` places (rounded half up).
std::string format_decimal(const BigRational& value, int decimals = 4);

struct MonteCarloResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::int64_t trials = 0;
};

/// Draws a pattern of k letters and a history of l letters uniformly from
/// [0, 10^d) and counts alignments whose one-sided differences
/// (y - x) mod 10^d are all <= alpha and sum to at most beta. Trial t uses its
/// own generator seeded from (seed, t), so the result does not depend on the
/// number of threads.
MonteCarloResult monte_carlo_matches(const ColdStartParams& p, std::int64_t trials,
                                     std::uint64_t seed);

}  // namespace dnsasm
