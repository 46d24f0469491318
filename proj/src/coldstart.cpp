#include "dnsasm/coldstart.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace dnsasm {

void ColdStartParams::validate() const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (l < k) throw std::invalid_argument(fmt::format("l = {} must be at least k = {}", l, k));
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  if (alpha < 1) throw std::invalid_argument("alpha must be at least 1");
  if (beta < alpha) throw std::invalid_argument("beta must be at least alpha");
  if (effective_denominator_exponent() < 0) {
    throw std::invalid_argument("denominator exponent must be non-negative");
  }
}

BigInt binomial(std::int64_t n, std::int64_t r) {
  if (n < 0 || r < 0 || n < r) return 0;
  r = std::min(r, n - r);
  BigInt out = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    out *= n - r + i;
    out /= i;
  }
  return out;
}

BigInt choice_count_lower(std::int64_t k, std::int64_t alpha, std::int64_t beta) {
  if (alpha <= 0) throw std::invalid_argument("choice_count_lower: alpha must be positive");
  const std::int64_t q = beta / alpha;
  const std::int64_t r = beta % alpha;
  BigInt out = binomial(k, q);
  out *= boost::multiprecision::pow(BigInt(2 * alpha + 1), static_cast<unsigned>(q));
  out *= std::max<std::int64_t>(1, r);
  return out;
}

BigInt choice_count_ie(std::int64_t k, std::int64_t alpha, std::int64_t beta) {
  if (alpha <= 0) throw std::invalid_argument("choice_count_ie: alpha must be positive");
  if (k <= 0) throw std::invalid_argument("choice_count_ie: k must be positive");
  BigInt total = 0;
  for (std::int64_t i = 0; i <= beta / alpha; ++i) {
    BigInt term = binomial(k, i) * binomial(beta - i * alpha - 1, k - 1);
    if (i % 2 == 0) {
      total += term;
    } else {
      total -= term;
    }
  }
  return total;
}

BigRational expected_matches_exact(const ColdStartParams& p, CountMode mode) {
  p.validate();
  const BigInt choices = mode == CountMode::lower ? choice_count_lower(p.k, p.alpha, p.beta)
                                                 : choice_count_ie(p.k, p.alpha, p.beta);
  const BigInt alignments = p.l - p.k + 1;
  const BigInt denom =
      boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(p.effective_denominator_exponent()));
  return BigRational(alignments * choices, denom);
}

double expected_matches(const ColdStartParams& p, CountMode mode) {
  return static_cast<double>(expected_matches_exact(p, mode));
}

std::string format_decimal(const BigRational& value, int decimals) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(decimals));
  BigInt num = numerator(value);
  const BigInt den = denominator(value);
  const bool negative = num < 0;
  if (negative) num = -num;
  const BigInt scaled = (num * scale * 2 + den) / (den * 2);
  const BigInt whole = scaled / scale;
  std::string frac = BigInt(scaled % scale).str();
  if (decimals > 0) frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  std::string out = (negative ? "-" : "") + whole.str();
  if (decimals > 0) out += "." + frac;
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t one_trial(const ColdStartParams& p, std::int64_t alphabet, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> letter(0, alphabet - 1);
  std::vector<std::int64_t> x(static_cast<std::size_t>(p.k));
  std::vector<std::int64_t> y(static_cast<std::size_t>(p.l));
  for (auto& v : x) v = letter(rng);
  for (auto& v : y) v = letter(rng);
  std::int64_t count = 0;
  for (std::int64_t i = 0; i + p.k <= p.l; ++i) {
    std::int64_t total = 0;
    bool ok = true;
    for (std::int64_t j = 0; j < p.k && ok; ++j) {
      const std::int64_t diff = ((y[i + j] - x[j]) % alphabet + alphabet) % alphabet;
      total += diff;
      ok = diff <= p.alpha && total <= p.beta;
    }
    count += ok ? 1 : 0;
  }
  return count;
}

}  // namespace

MonteCarloResult monte_carlo_matches(const ColdStartParams& p, std::int64_t trials,
                                     std::uint64_t seed) {
  if (p.k < 1 || p.l < p.k || p.d < 1 || p.d > 6 || p.alpha < 0 || p.beta < 0) {
    throw std::invalid_argument("monte_carlo_matches: invalid parameters");
  }
  if (trials < 1) throw std::invalid_argument("monte_carlo_matches: trials must be positive");
  std::int64_t alphabet = 1;
  for (std::int64_t i = 0; i < p.d; ++i) alphabet *= 10;

  // Integer reductions keep the result independent of the thread schedule.
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
#pragma omp parallel for reduction(+ : sum, sum_sq) schedule(static)
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::int64_t c = one_trial(p, alphabet, splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(t))));
    sum += c;
    sum_sq += c * c;
  }
  MonteCarloResult r;
  r.trials = trials;
  const double n = static_cast<double>(trials);
  r.mean = static_cast<double>(sum) / n;
  if (trials > 1) {
    const double var = (static_cast<double>(sum_sq) - n * r.mean * r.mean) / (n - 1.0);
    r.standard_error = std::sqrt(std::max(var, 0.0) / n);
  }
  return r;
}

}  // namespace dnsasm
