#include <collab/stats.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace collab;

namespace {

// Reference p-value: enumerate every way of drawing |a| ranks from the
// pooled midranks and count rank sums on each side of the observed one.
double enumerated_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (double x : pooled) {
      less += x < pooled[i];
      equal += x == pooled[i];
    }
    rank[i] = less + (equal + 1) / 2;
  }
  double observed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) observed += rank[i];

  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(a.size()), true);
  std::sort(pick.begin(), pick.end());
  double total = 0, le = 0, ge = 0;
  do {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) s += rank[i];
    }
    total += 1;
    le += s <= observed + 1e-9;
    ge += s >= observed - 1e-9;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return std::min(1.0, 2 * std::min(le, ge) / total);
}

std::vector<double> distinct_sample(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

std::vector<double> tied_sample(std::mt19937_64& gen, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(gen() % 5) / 4.0;
  return v;
}

}  // namespace

TEST(MannWhitney, SmallestSeparatedCase) {
  std::vector<double> a{1, 2}, b{3, 4};
  auto r = mann_whitney(a, b);
  EXPECT_EQ(r.method, PMethod::Exact);
  EXPECT_DOUBLE_EQ(r.u, 0.0);
  EXPECT_NEAR(r.p_value, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.sign, Sign::Minus);
  EXPECT_EQ(r.stars, "");
}

TEST(MannWhitney, IdenticalSingletons) {
  std::vector<double> a{5}, b{5};
  auto r = mann_whitney(a, b);
  EXPECT_EQ(r.sign, Sign::Zero);
  EXPECT_DOUBLE_EQ(r.u, 0.5);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(MannWhitney, InterleavedMatchesEnumeration) {
  std::vector<double> a{1, 3, 5}, b{2, 4, 6};
  auto r = mann_whitney(a, b);
  EXPECT_DOUBLE_EQ(r.u, 3.0);
  EXPECT_NEAR(r.p_value, enumerated_p(a, b), 1e-12);
  EXPECT_NEAR(r.p_value, 0.7, 1e-12);
}

TEST(MannWhitney, ExactEqualsEnumerationForSmallSamples) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = distinct_sample(gen, 1 + gen() % 6);
    auto b = distinct_sample(gen, 1 + gen() % 6);
    auto r = mann_whitney(a, b);
    ASSERT_EQ(r.method, PMethod::Exact);
    EXPECT_NEAR(r.p_value, enumerated_p(a, b), 1e-12);
  }
}

TEST(MannWhitney, EmptySampleRejected) {
  std::vector<double> a{1.0}, none;
  EXPECT_THROW(mann_whitney(a, none), DataError);
}

TEST(MannWhitney, SwappingGroupsFlipsSign) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = trial % 2 ? tied_sample(gen, 1 + gen() % 30) : distinct_sample(gen, 1 + gen() % 12);
    auto b = trial % 2 ? tied_sample(gen, 1 + gen() % 30) : distinct_sample(gen, 1 + gen() % 12);
    auto ab = mann_whitney(a, b);
    auto ba = mann_whitney(b, a);
    EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
    EXPECT_DOUBLE_EQ(ab.u + ba.u, static_cast<double>(a.size() * b.size()));
    if (ab.sign == Sign::Plus) {
      EXPECT_EQ(ba.sign, Sign::Minus);
    }
    if (ab.sign == Sign::Zero) {
      EXPECT_EQ(ba.sign, Sign::Zero);
    }
  }
}

TEST(MannWhitney, InvariantUnderIncreasingTransform) {
  std::mt19937_64 gen(3);
  auto f = [](double x) { return std::exp(3 * x) + x * x * x; };
  for (int trial = 0; trial < 300; ++trial) {
    auto a = tied_sample(gen, 1 + gen() % 25);
    auto b = distinct_sample(gen, 1 + gen() % 25);
    auto fa = a, fb = b;
    std::transform(fa.begin(), fa.end(), fa.begin(), f);
    std::transform(fb.begin(), fb.end(), fb.begin(), f);
    auto r = mann_whitney(a, b);
    auto s = mann_whitney(fa, fb);
    EXPECT_DOUBLE_EQ(r.u, s.u);
    EXPECT_DOUBLE_EQ(r.p_value, s.p_value);
    EXPECT_EQ(r.sign, s.sign);
  }
}

TEST(MannWhitney, NormalApproximationCloseToExact) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 6 + gen() % 3, n = 8 + gen() % 12;
    auto a = distinct_sample(gen, m);
    auto b = distinct_sample(gen, n);
    auto r = mann_whitney(a, b);
    ASSERT_EQ(r.method, PMethod::Exact);
    const double mn = static_cast<double>(m * n);
    const double sd = std::sqrt(mn * static_cast<double>(m + n + 1) / 12.0);
    const double diff = r.u - mn / 2;
    const double z = diff == 0 ? 0 : (std::fabs(diff) - 0.5) / sd;
    const double approx = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    EXPECT_NEAR(r.p_value, approx, 0.05);
  }
}

TEST(MannWhitney, LargeSamplesUseNormalApproximation) {
  std::vector<double> a(50), b(50);
  std::iota(a.begin(), a.end(), 0.0);
  std::iota(b.begin(), b.end(), 25.0);
  auto r = mann_whitney(a, b);
  EXPECT_EQ(r.method, PMethod::Normal);
  EXPECT_EQ(r.sign, Sign::Minus);
  EXPECT_LT(r.p_value, 0.001);
  EXPECT_EQ(r.stars, "***");
}

// The rank sign and the sign of the mean difference can disagree.
TEST(MannWhitney, RankSignCanOpposeMeanDifference) {
  std::vector<double> a{0.3, 0.3, 0.3, 0.3}, b{0, 0, 0, 1, 1};
  auto r = mann_whitney(a, b);
  const double mean_a = 0.3, mean_b = 0.4;
  EXPECT_LT(mean_a, mean_b);
  EXPECT_EQ(r.sign, Sign::Plus);
  EXPECT_DOUBLE_EQ(r.u, 12.0);
}

TEST(MannWhitney, AllTiedGivesPValueOne) {
  std::vector<double> a(10, 0.5), b(12, 0.5);
  auto r = mann_whitney(a, b);
  EXPECT_EQ(r.method, PMethod::Normal);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.sign, Sign::Zero);
}

TEST(Stars, DefaultCutoffs) {
  EXPECT_EQ(stars(0.2), "");
  EXPECT_EQ(stars(0.05), "");
  EXPECT_EQ(stars(0.049), "*");
  EXPECT_EQ(stars(0.01), "*");
  EXPECT_EQ(stars(0.0099), "**");
  EXPECT_EQ(stars(0.0001), "***");
}

TEST(Stars, CustomCutoffs) {
  auto t = StarThresholds::parse("0.1, 0.05");
  EXPECT_EQ(stars(0.07, t), "*");
  EXPECT_EQ(stars(0.001, t), "**");
  EXPECT_THROW(StarThresholds::parse("0.01,0.05"), ConfigError);
  EXPECT_THROW(StarThresholds::parse("0.5,x"), ConfigError);
  EXPECT_THROW(StarThresholds::parse("1.5"), ConfigError);
}

TEST(CompareRanks, OrderAndEmptyCohorts) {
  std::array<std::vector<double>, 3> cohorts{std::vector<double>{0.9, 1.0, 0.8}, std::vector<double>{},
                                             std::vector<double>{0.1, 0.2}};
  auto cells = compare_ranks(cohorts);
  EXPECT_EQ(cells[0].a, Rank::Full);
  EXPECT_EQ(cells[0].b, Rank::Associate);
  EXPECT_FALSE(cells[0].result);
  EXPECT_FALSE(cells[1].result);
  ASSERT_TRUE(cells[2].result);
  EXPECT_EQ(cells[2].a, Rank::Assistant);
  EXPECT_EQ(cells[2].result->group_a, "Assistant");
  EXPECT_EQ(cells[2].result->sign, Sign::Minus);
}
