#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "dnsasm/coldstart.hpp"

using namespace dnsasm;

namespace {

// Vectors (x_1..x_k) with 1 <= x_i <= alpha and sum beta, by enumeration.
long long brute_compositions(int k, int alpha, int beta) {
  std::function<long long(int, int)> rec = [&](int left, int rest) -> long long {
    if (left == 0) return rest == 0 ? 1 : 0;
    long long n = 0;
    for (int x = 1; x <= alpha && x <= rest; ++x) n += rec(left - 1, rest - x);
    return n;
  };
  return rec(k, beta);
}

ColdStartParams reference_params() { return ColdStartParams{1440, 5, 3, 100, 250, std::nullopt}; }

}  // namespace

TEST(Binomial, EdgeCases) {
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(0, 0), 1);
  EXPECT_EQ(binomial(3, 5), 0);
  EXPECT_EQ(binomial(-1, 0), 0);
  EXPECT_EQ(binomial(4, -1), 0);
  EXPECT_EQ(binomial(100, 50).str(), "100891344545564193334812497256");
}

TEST(ChoiceCountLower, Examples) {
  EXPECT_EQ(choice_count_lower(5, 100, 250), 20200500);
  EXPECT_EQ(choice_count_lower(5, 100, 70), 70);
  EXPECT_EQ(choice_count_lower(5, 100, 0), 1);
  EXPECT_EQ(choice_count_lower(2, 1, 2), 9);
  EXPECT_THROW(choice_count_lower(2, 0, 2), std::invalid_argument);
}

TEST(ChoiceCountLower, NotMonotoneInAlpha) {
  // The remainder factor drops from 50 to 48 while the other factors barely grow.
  EXPECT_EQ(choice_count_lower(5, 101, 250), 19780320);
  EXPECT_LT(choice_count_lower(5, 101, 250), choice_count_lower(5, 100, 250));
}

TEST(ChoiceCountIe, Examples) {
  EXPECT_EQ(choice_count_ie(3, 2, 4), 3);
  EXPECT_EQ(choice_count_ie(1, 5, 3), 1);
  EXPECT_EQ(choice_count_ie(4, 3, 3), 0);
  EXPECT_EQ(choice_count_ie(5, 100, 250), 59859381);
}

TEST(ChoiceCountIe, ExhaustiveAgainstEnumeration) {
  for (int k = 1; k <= 4; ++k) {
    for (int alpha = 1; alpha <= 3; ++alpha) {
      for (int beta = 0; beta <= 10; ++beta) {
        ASSERT_EQ(choice_count_ie(k, alpha, beta), brute_compositions(k, alpha, beta))
            << "k=" << k << " alpha=" << alpha << " beta=" << beta;
      }
    }
  }
}

TEST(ChoiceCountIe, LargerCasesAgainstEnumeration) {
  EXPECT_EQ(choice_count_ie(6, 7, 20), brute_compositions(6, 7, 20));
  EXPECT_EQ(choice_count_ie(5, 12, 31), brute_compositions(5, 12, 31));
}

TEST(ExpectedMatches, PaperExample) {
  const auto p = reference_params();
  EXPECT_EQ(format_decimal(expected_matches_exact(p, CountMode::lower)), "2.9008");
  EXPECT_NEAR(expected_matches(p, CountMode::lower), 2.9008, 1e-4);
  const double ie = expected_matches(p, CountMode::inclusion_exclusion);
  EXPECT_GE(ie, 8.5);
  EXPECT_LE(ie, 9.5);
  EXPECT_EQ(expected_matches_exact(p, CountMode::inclusion_exclusion),
            BigRational(BigInt(1436) * 59859381, BigInt(10000000000LL)));
}

TEST(ExpectedMatches, SingleAlignment) {
  ColdStartParams p{5, 5, 3, 100, 250, std::nullopt};
  EXPECT_EQ(expected_matches_exact(p, CountMode::lower),
            BigRational(BigInt(20200500), BigInt(10000000000LL)));
}

TEST(ExpectedMatches, DenominatorOverride) {
  ColdStartParams p = reference_params();
  p.denominator_exponent = 15;
  EXPECT_EQ(expected_matches_exact(p, CountMode::lower) * BigRational(100000),
            expected_matches_exact(reference_params(), CountMode::lower));
  EXPECT_EQ(reference_params().effective_denominator_exponent(), 10);
}

TEST(ExpectedMatches, MonotoneInHistoryLength) {
  for (CountMode mode : {CountMode::lower, CountMode::inclusion_exclusion}) {
    BigRational prev = 0;
    for (std::int64_t l = 5; l <= 3000; l += 37) {
      ColdStartParams p = reference_params();
      p.l = l;
      const auto v = expected_matches_exact(p, mode);
      ASSERT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(ExpectedMatches, InclusionExclusionMonotoneInAlpha) {
  for (std::int64_t beta : {5, 12, 40, 250}) {
    BigRational prev = 0;
    for (std::int64_t alpha = 1; alpha <= beta; ++alpha) {
      ColdStartParams p{1440, 5, 3, alpha, beta, std::nullopt};
      const auto v = expected_matches_exact(p, CountMode::inclusion_exclusion);
      ASSERT_GE(v, prev) << "alpha=" << alpha << " beta=" << beta;
      prev = v;
    }
  }
}

TEST(ColdStartParams, Validation) {
  EXPECT_NO_THROW(reference_params().validate());
  auto bad = [](ColdStartParams p) { EXPECT_THROW(p.validate(), std::invalid_argument); };
  auto p = reference_params();
  p.l = 4;
  bad(p);
  p = reference_params();
  p.k = 0;
  bad(p);
  p = reference_params();
  p.d = 0;
  bad(p);
  p = reference_params();
  p.alpha = 0;
  bad(p);
  p = reference_params();
  p.beta = 99;
  bad(p);
}

TEST(FormatDecimal, Rounding) {
  EXPECT_EQ(format_decimal(BigRational(1, 3)), "0.3333");
  EXPECT_EQ(format_decimal(BigRational(2, 3)), "0.6667");
  EXPECT_EQ(format_decimal(BigRational(5)), "5.0000");
  EXPECT_EQ(format_decimal(BigRational(12345, 100000)), "0.1235");
  EXPECT_EQ(format_decimal(BigRational(7, 2), 0), "4");
}

TEST(MonteCarlo, SaturatedToleranceMatchesEverywhere) {
  ColdStartParams p{30, 3, 1, 10, 30, std::nullopt};
  const auto r = monte_carlo_matches(p, 200, 1);
  EXPECT_EQ(r.mean, 28.0);
  EXPECT_EQ(r.standard_error, 0.0);
}

TEST(MonteCarlo, ExactOccurrences) {
  ColdStartParams p{20, 2, 1, 0, 0, std::nullopt};
  const auto r = monte_carlo_matches(p, 40000, 3);
  const double expected = 19.0 / 100.0;
  EXPECT_NEAR(r.mean, expected, 3.0 * r.standard_error);
  EXPECT_GT(r.standard_error, 0.0);
}

TEST(MonteCarlo, MatchesEnumeratedProbability) {
  const int alpha = 3, beta = 4;
  long long hits = 0;
  for (int x1 = 0; x1 < 10; ++x1)
    for (int x2 = 0; x2 < 10; ++x2)
      for (int y1 = 0; y1 < 10; ++y1)
        for (int y2 = 0; y2 < 10; ++y2) {
          const int d1 = ((y1 - x1) % 10 + 10) % 10, d2 = ((y2 - x2) % 10 + 10) % 10;
          if (d1 <= alpha && d2 <= alpha && d1 + d2 <= beta) ++hits;
        }
  const double expected = 19.0 * static_cast<double>(hits) / 10000.0;
  ColdStartParams p{20, 2, 1, alpha, beta, std::nullopt};
  const auto r = monte_carlo_matches(p, 20000, 11);
  EXPECT_NEAR(r.mean, expected, 3.0 * r.standard_error);
}

TEST(MonteCarlo, SeededAndReproducible) {
  ColdStartParams p{100, 3, 1, 2, 4, std::nullopt};
  const auto a = monte_carlo_matches(p, 500, 42);
  const auto b = monte_carlo_matches(p, 500, 42);
  const auto c = monte_carlo_matches(p, 500, 43);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_NE(a.mean, c.mean);
  EXPECT_THROW(monte_carlo_matches(p, 0, 1), std::invalid_argument);
}
