#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dnsasm/approx_match.hpp"

using namespace dnsasm;
using V = std::vector<double>;

namespace {

// Longest proper prefix that is also a suffix, by direct comparison.
PrefixTable brute_prefix(const V& p) {
  PrefixTable out(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t len = i; len > 0; --len) {
      if (std::equal(p.begin(), p.begin() + len, p.begin() + (i + 1 - len))) {
        out[i] = len;
        break;
      }
    }
  }
  return out;
}

// Leftmost exact occurrences, skipping |P| after each.
MatchSet greedy_exact(const V& t, const V& p) {
  MatchSet out;
  std::size_t s = 0;
  while (s + p.size() <= t.size()) {
    if (std::equal(p.begin(), p.end(), t.begin() + s)) {
      out.push_back(s);
      s += p.size();
    } else {
      ++s;
    }
  }
  return out;
}

double recheck(const V& p, const V& t, std::size_t s) {
  double e = 0;
  for (std::size_t i = 0; i < p.size(); ++i) e += std::fabs(p[i] - t[s + i]);
  return e;
}

V random_vec(std::mt19937_64& rng, std::size_t n, int alphabet) {
  V v(n);
  for (auto& x : v) x = static_cast<double>(rng() % alphabet);
  return v;
}

}  // namespace

TEST(Tolerance, RejectsNegative) {
  EXPECT_THROW(Tolerance(-1, 0), std::invalid_argument);
  EXPECT_THROW(Tolerance(0, -0.5), std::invalid_argument);
  EXPECT_THROW(Tolerance(NAN, 0), std::invalid_argument);
}

TEST(PrefixFunction, Examples) {
  EXPECT_EQ(prefix_function(V{1, 2, 1, 2}, 0), (PrefixTable{0, 0, 1, 2}));
  EXPECT_EQ(prefix_function(V{5}, 0), (PrefixTable{0}));
  EXPECT_EQ(prefix_function(V{5}, 100), (PrefixTable{0}));
  EXPECT_EQ(prefix_function(V{1, 2, 3}, 1), (PrefixTable{0, 1, 2}));
  EXPECT_THROW(prefix_function(V{}, 0), std::invalid_argument);
}

TEST(PrefixFunction, ExactEqualsClassical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const V p = random_vec(rng, 1 + rng() % 30, 1 + static_cast<int>(rng() % 3));
    ASSERT_EQ(prefix_function(p, 0), brute_prefix(p));
  }
}

TEST(PrefixFunction, TableBounds) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const V p = random_vec(rng, 1 + rng() % 40, 10);
    const auto pi = prefix_function(p, static_cast<double>(rng() % 4));
    ASSERT_EQ(pi[0], 0u);
    for (std::size_t i = 0; i < pi.size(); ++i) ASSERT_LE(pi[i], i);
  }
}

TEST(TotalError, Examples) {
  EXPECT_EQ(total_error(V{4, 5}, V{1, 4, 5}, 1), 0.0);
  EXPECT_EQ(total_error(V{1, 2}, V{3, 1}, 0), 3.0);
  EXPECT_EQ(total_error(V{}, V{7}, 0), 0.0);
  EXPECT_THROW(total_error(V{1, 2}, V{3}, 0), std::out_of_range);
}

TEST(Search, Examples) {
  EXPECT_EQ(dnsasm::search(V{1, 2, 1, 2, 1, 2}, V{1, 2}, Tolerance(0, 0)), (MatchSet{0, 2, 4}));
  EXPECT_EQ(dnsasm::search(V{10, 11, 50, 10, 12}, V{10, 11}, Tolerance(2, 3)), (MatchSet{0, 3}));
  EXPECT_TRUE(dnsasm::search(V{9, 9, 9}, V{1, 2, 3, 4}, Tolerance(100, 100)).empty());
  EXPECT_THROW(dnsasm::search(V{1}, V{}, Tolerance{}), std::invalid_argument);
}

TEST(Search, BetaFailureStillConsumesText) {
  // The alpha-match at 0 fails beta; the scan restarts after it, so the
  // overlapping exact window at 1 is never considered.
  EXPECT_EQ(dnsasm::search(V{0, 1, 1, 1}, V{1, 1, 1}, Tolerance(1, 0)), MatchSet{});
  EXPECT_EQ(dnsasm::search(V{0, 1, 1, 1}, V{1, 1, 1}, Tolerance(1, 1)), MatchSet{0});
}

TEST(Search, ExactMatchesGreedyScanner) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int alphabet = 1 + static_cast<int>(rng() % 10);
    const V t = random_vec(rng, rng() % 201, alphabet);
    const V p = random_vec(rng, 1 + rng() % 6, alphabet);
    ASSERT_EQ(dnsasm::search(t, p, Tolerance(0, 0)), greedy_exact(t, p)) << "trial " << trial;
  }
}

TEST(Search, BetaSoundAndSpaced) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const V t = random_vec(rng, rng() % 201, 10);
    const V p = random_vec(rng, 1 + rng() % 8, 10);
    const Tolerance tol(static_cast<double>(rng() % 6), static_cast<double>(rng() % 21));
    const auto s = dnsasm::search(t, p, tol);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_LE(recheck(p, t, s[i]), tol.beta);
      if (i > 0) ASSERT_GE(s[i] - s[i - 1], p.size());
    }
  }
}

TEST(Search, SaturatedToleranceTilesText) {
  const V t(23, 1.0);
  const V p{100, 0, 50};
  const auto s = dnsasm::search(t, p, Tolerance(1000, 1e9));
  ASSERT_EQ(s.size(), 7u);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s[i], 3 * i);
}

TEST(Incremental, Construction) {
  const V p0{1, 2, 3};
  const Tolerance tol(1, 2);
  const auto m = incremental_new(p0, tol);
  EXPECT_EQ(V(m.effective_pattern().begin(), m.effective_pattern().end()), p0);
  EXPECT_EQ(m.ignored_prefix(), 0u);
  EXPECT_EQ(m.grown_pattern().size() - m.ignored_prefix(), m.initial_length());
  EXPECT_EQ(m.prefix_table(), prefix_function(p0, tol.alpha));
  EXPECT_THROW(incremental_new(V{}, tol), std::invalid_argument);
  EXPECT_THROW(incremental_new(p0, tol, 1.0), std::invalid_argument);
}

TEST(Incremental, OneRestartAfterKAdvances) {
  const V p0{4, 8, 15, 16, 23};
  auto m = incremental_new(p0, Tolerance(1, 3));
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(m.restart_count(), 0u);
    m = incremental_advance(m, 40.0 + i);
    EXPECT_EQ(m.grown_pattern().size() - m.ignored_prefix(), 5u);
    EXPECT_LE(m.grown_pattern().size(), 10u);
  }
  EXPECT_EQ(m.restart_count(), 1u);
  const auto fresh = incremental_new(V{40, 41, 42, 43, 44}, Tolerance(1, 3));
  EXPECT_TRUE(m.same_state(fresh));
}

TEST(Incremental, NoAdvanceEqualsSearch) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const V t = random_vec(rng, rng() % 150, 6);
    const V p = random_vec(rng, 1 + rng() % 6, 6);
    const Tolerance tol(static_cast<double>(rng() % 3), static_cast<double>(rng() % 8));
    ASSERT_EQ(incremental_search(incremental_new(p, tol), t), dnsasm::search(t, p, tol));
  }
}

TEST(Incremental, TableGrowsByOneEntry) {
  auto m = incremental_new(V{1, 2, 3, 4}, Tolerance(0, 0), 3.0);
  for (int i = 0; i < 7; ++i) {
    const std::size_t before = m.prefix_table().size();
    const std::size_t restarts = m.restart_count();
    m.advance(static_cast<double>(i % 3));
    if (m.restart_count() == restarts) {
      ASSERT_EQ(m.prefix_table().size(), before + 1);
      ASSERT_EQ(m.prefix_table().size(), m.grown_pattern().size());
      for (std::size_t j = 0; j < m.prefix_table().size(); ++j) ASSERT_LE(m.prefix_table()[j], j);
    }
  }
}

TEST(Incremental, WildcardsMatchAnything) {
  // Pattern [1,2] advanced by 3: grown [1,2,3] with the leading 1 ignored.
  auto m = incremental_new(V{1, 2}, Tolerance(0, 0), 3.0);
  m.advance(3);
  ASSERT_EQ(m.ignored_prefix(), 1u);
  const V text{9, 2, 3, 7, 2, 3};
  EXPECT_EQ(m.search(text), (MatchSet{1, 4}));
}

TEST(Incremental, SearchAfterRestartEqualsFresh) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 5;
    const Tolerance tol(static_cast<double>(rng() % 3), static_cast<double>(rng() % 10));
    auto m = incremental_new(random_vec(rng, k, 5), tol);
    V tail;
    while (m.restart_count() == 0) {
      const double v = static_cast<double>(rng() % 5);
      m.advance(v);
      tail.push_back(v);
    }
    const V last(tail.end() - static_cast<std::ptrdiff_t>(std::min(k, tail.size())), tail.end());
    const V text = random_vec(rng, rng() % 120, 5);
    const auto eff = m.effective_pattern();
    ASSERT_EQ(m.search(text), dnsasm::search(text, eff, tol));
    if (last.size() == k) ASSERT_EQ(V(eff.begin(), eff.end()), last);
  }
}
