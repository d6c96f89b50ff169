#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "shiftval/error.hpp"
#include "shiftval/evalmetrics.hpp"

using namespace shiftval;

TEST(Brier, DirectFormula) {
  EXPECT_EQ(brier(std::vector<double>{1, 0}, std::vector<int>{1, 0}).value, 0.0);
  EXPECT_EQ(brier(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}).value, 0.25);
  EXPECT_NEAR(brier(std::vector<double>{0.8, 0.2, 0.6}, std::vector<int>{1, 0, 0}).value, 0.44 / 3, 1e-15);
  EXPECT_THROW(brier(std::vector<double>{}, std::vector<int>{}), DataError);
  EXPECT_THROW(brier(std::vector<double>{0.5}, std::vector<int>{2}), DataError);
  EXPECT_THROW(brier(std::vector<double>{1.5}, std::vector<int>{1}), DataError);
}

TEST(WeightedBrier, Examples) {
  std::vector<double> p{0.3, 0.9, 0.1, 0.55};
  std::vector<int> y{0, 1, 1, 0};
  EXPECT_EQ(weighted_brier(p, y, std::vector<double>(4, 1.0)).value, brier(p, y).value);
  EXPECT_DOUBLE_EQ(weighted_brier(p, y, std::vector<double>{0, 0, 1, 0}).value, 0.81);
  EXPECT_NEAR(weighted_brier(std::vector<double>{1, 0.5}, std::vector<int>{1, 0}, std::vector<double>{2, 1}).value,
              0.25 / 3, 1e-15);
  EXPECT_THROW(weighted_brier(p, y, std::vector<double>(4, 0.0)), DataError);
  EXPECT_THROW(weighted_brier(p, y, std::vector<double>{1, 1, -1, 1}), DataError);
}

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}).value, 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.9}, std::vector<int>{1, 0}).value, 0.0);
  EXPECT_EQ(auc(std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<int>{1, 0, 1, 0}).value, 0.5);
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DataError);
}

TEST(Auc, EqualsAllPairsOracleWithTies) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = 2 + gen() % 199;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % 25) / 8.0;
      y[i] = static_cast<int>(gen() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_EQ(auc(s, y).value, oracle::auc_pairs(s, y)) << "rep " << rep;
  }
}

TEST(PartitionBrier, Examples) {
  std::vector<double> p{0.2, 0.7, 0.9, 0.1};
  std::vector<int> y{0, 1, 1, 0};
  auto one = partition_brier(p, y, std::vector<std::size_t>(4, 0));
  EXPECT_EQ(one.recombined, one.global);

  // Subset 0: two rows with brier 0.1; subset 1: six rows with brier 0.3.
  const double a = std::sqrt(0.1), b = std::sqrt(0.3);
  std::vector<double> q{a, a, b, b, b, b, b, b};
  std::vector<int> z(8, 0);
  std::vector<std::size_t> asg{0, 0, 1, 1, 1, 1, 1, 1};
  auto two = partition_brier(q, z, asg);
  EXPECT_NEAR(two.recombined, 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(two.alphas[0], 0.25);
  EXPECT_DOUBLE_EQ(two.alphas[1], 0.75);
  EXPECT_THROW(partition_brier(p, y, std::vector<std::size_t>{0, 0, 2, 2}), DataError);
}

TEST(PartitionBrier, RandomPartitionsRecombine) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t n = 5 + gen() % 300, k = 1 + gen() % 5;
    std::vector<double> p(n);
    std::vector<int> y(n);
    std::vector<std::size_t> asg(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = u(gen);
      y[i] = u(gen) < p[i];
      asg[i] = i < k ? i : gen() % k;
    }
    auto r = partition_brier(p, y, asg);
    double direct = 0;
    for (std::size_t i = 0; i < n; ++i) direct += (p[i] - y[i]) * (p[i] - y[i]);
    direct /= static_cast<double>(n);
    EXPECT_LT(std::abs(r.recombined - direct), 1e-12);
  }
}

TEST(EffectiveSampleSize, Examples) {
  EXPECT_DOUBLE_EQ(effective_sample_size(std::vector<double>(7, 0.3)), 7.0);
  EXPECT_DOUBLE_EQ(effective_sample_size(std::vector<double>{0, 0, 5, 0}), 1.0);
  EXPECT_NEAR(effective_sample_size(std::vector<double>{1, 1, 2}), 16.0 / 6.0, 1e-15);
}

TEST(OutcomeRates, PlainAndWeighted) {
  std::vector<int> y{1, 0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(outcome_rate(y), 0.4);
  EXPECT_DOUBLE_EQ(weighted_outcome_rate(y, std::vector<double>{3, 1, 1, 0, 1}), 0.5);
}
