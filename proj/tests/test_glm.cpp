#include <gtest/gtest.h>

#include <random>

#include "shiftval/error.hpp"
#include "shiftval/glm.hpp"

using namespace shiftval;

namespace {

// Gauss-Jordan inverse for the small information matrices in these tests.
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

}  // namespace

TEST(FitLogistic, NoSignalGivesLogitPrevalence) {
  // Every feature pattern appears once with y = 1 and three times with y = 0.
  Matrix x(80, 2);
  std::vector<int> y(80);
  for (std::size_t g = 0; g < 20; ++g)
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t r = 4 * g + k;
      x(r, 0) = static_cast<double>(g % 5) - 2;
      x(r, 1) = static_cast<double>(g / 5) * 0.5;
      y[r] = k == 0;
    }
  auto m = fit_logistic(x, y);
  EXPECT_TRUE(m.converged);
  EXPECT_NEAR(m.intercept, std::log(0.25 / 0.75), 1e-6);
  EXPECT_NEAR(m.coefficients[0], 0.0, 1e-6);
  EXPECT_NEAR(m.coefficients[1], 0.0, 1e-6);
}

TEST(FitLogistic, SeparableDataStaysFiniteWithRidge) {
  Matrix x = Matrix::from_rows({{-2}, {-1}, {-0.5}, {0.5}, {1}, {2}});
  std::vector<int> y{0, 0, 0, 1, 1, 1};
  GlmSettings s;
  s.ridge = 1e-2;
  auto m = fit_logistic(x, y, s);
  EXPECT_TRUE(std::isfinite(m.coefficients[0]));
  EXPECT_GT(m.coefficients[0], 0);
  EXPECT_TRUE(m.converged);
}

TEST(FitLogistic, RecoversGeneratingCoefficientsWithinThreeStandardErrors) {
  const std::vector<double> beta{1.0, -0.7, 0.4};
  const double b0 = -0.5;
  std::mt19937_64 gen(1234);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x(200, 3);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    double eta = b0;
    for (std::size_t j = 0; j < 3; ++j) {
      x(i, j) = n01(gen);
      eta += beta[j] * x(i, j);
    }
    y[i] = u(gen) < 1 / (1 + std::exp(-eta));
  }
  auto m = fit_logistic(x, y);
  ASSERT_TRUE(m.converged);
  // Standard errors from the observed information at the estimate.
  std::vector<std::vector<double>> info(4, std::vector<double>(4, 0.0));
  auto p = predict_proba(m, x);
  for (std::size_t i = 0; i < 200; ++i) {
    const double row[4] = {1, x(i, 0), x(i, 1), x(i, 2)};
    const double w = p[i] * (1 - p[i]);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) info[a][b] += w * row[a] * row[b];
  }
  auto cov = invert(info);
  EXPECT_LT(std::abs(m.intercept - b0), 3 * std::sqrt(cov[0][0]));
  for (std::size_t j = 0; j < 3; ++j)
    EXPECT_LT(std::abs(m.coefficients[j] - beta[j]), 3 * std::sqrt(cov[j + 1][j + 1])) << "coefficient " << j;
}

TEST(FitLogistic, ScoreEquationsHoldAtTheOptimum) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0, 1);
  Matrix x(500, 4);
  std::vector<int> y(500);
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t j = 0; j < 4; ++j) x(i, j) = 3 * n01(gen) + j;
    y[i] = u(gen) < 1 / (1 + std::exp(-(0.3 * x(i, 0) - 0.2 * x(i, 2))));
  }
  IrlsTrace trace;
  GlmSettings s;
  s.ridge = 0;
  auto m = fit_logistic_traced(x, y, s, &trace);
  ASSERT_TRUE(m.converged);
  auto p = predict_proba(m, x);
  double g0 = 0;
  std::vector<double> g(4, 0.0);
  for (std::size_t i = 0; i < 500; ++i) {
    g0 += y[i] - p[i];
    for (std::size_t j = 0; j < 4; ++j) g[j] += (y[i] - p[i]) * x(i, j);
  }
  EXPECT_LT(std::abs(g0), 1e-6);
  for (double v : g) EXPECT_LT(std::abs(v), 1e-5);
  for (std::size_t k = 1; k < trace.objective.size(); ++k) EXPECT_GE(trace.objective[k], trace.objective[k - 1]);
}

TEST(FitLogistic, Errors) {
  Matrix x = Matrix::from_rows({{1}, {2}, {3}});
  EXPECT_THROW(fit_logistic(x, std::vector<int>{1, 1, 1}), DataError);
  EXPECT_THROW(fit_logistic(x, std::vector<int>{1, 0}), DataError);
}

TEST(PredictProba, Examples) {
  LogisticModel m;
  m.coefficients = {0, 0};
  Matrix x = Matrix::from_rows({{1, 2}, {-3, 4}});
  for (double p : predict_proba(m, x)) EXPECT_EQ(p, 0.5);
  m.intercept = std::log(0.033 / 0.967);
  for (double p : predict_proba(m, x)) EXPECT_NEAR(p, 0.033, 1e-15);

  m.coefficients = {0.7, -0.2};
  m.intercept = 0.1;
  double prev = 0;
  for (int k = -20; k <= 20; ++k) {
    Matrix row = Matrix::from_rows({{k * 0.5, 1.0}});
    double p = predict_proba(m, row)[0];
    EXPECT_GE(p, prev);
    prev = p;
  }
  m.coefficients = {1e6, 0};
  auto extreme = predict_proba(m, Matrix::from_rows({{1e3, 0}, {-1e3, 0}}));
  EXPECT_EQ(extreme[0], 1 - 1e-12);
  EXPECT_EQ(extreme[1], 1e-12);
}

TEST(LogisticJson, RoundTripIsExact) {
  LogisticModel m;
  m.coefficients = {0.1, -1.0 / 3, 2.5e-17};
  m.intercept = -3.3;
  m.ridge = 1e-6;
  m.converged = true;
  m.iterations = 7;
  m.feature_names = {"a", "b", "c"};
  auto back = logistic_from_json(nlohmann::json::parse(to_json(m).dump()));
  EXPECT_EQ(back.coefficients, m.coefficients);
  EXPECT_EQ(back.intercept, m.intercept);
  EXPECT_EQ(back.feature_names, m.feature_names);
}
