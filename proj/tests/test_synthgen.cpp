#include <gtest/gtest.h>

#include <set>

#include "shiftval/error.hpp"
#include "shiftval/evalmetrics.hpp"
#include "shiftval/simscore.hpp"
#include "shiftval/synthgen.hpp"

using namespace shiftval;

TEST(Gauss2D, SampleMeanWithinCltBound) {
  Gauss2DConfig cfg;
  cfg.n = 4000;
  auto d = gen_gauss2d(cfg);
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0;
    for (std::size_t r = 0; r < d.dev.rows(); ++r) m += d.dev(r, c);
    m /= static_cast<double>(d.dev.rows());
    const double sigma = std::sqrt(cfg.dev_cov(c, c));
    EXPECT_LT(std::abs(m - cfg.dev_mean[c]), 4 * sigma / std::sqrt(4000.0));
  }
}

TEST(Gauss2D, SampleCovarianceWithinTenPercent) {
  Gauss2DConfig cfg;
  cfg.n = 10000;
  auto d = gen_gauss2d(cfg);
  const Matrix* sets[2] = {&d.dev, &d.contrast};
  const Matrix* covs[2] = {&cfg.dev_cov, &cfg.contrast_cov};
  for (int s = 0; s < 2; ++s) {
    const Matrix& x = *sets[s];
    double m[2] = {0, 0};
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < 2; ++c) m[c] += x(r, c) / static_cast<double>(x.rows());
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) {
        double cov = 0;
        for (std::size_t r = 0; r < x.rows(); ++r) cov += (x(r, a) - m[a]) * (x(r, b) - m[b]);
        cov /= static_cast<double>(x.rows());
        EXPECT_NEAR(cov, (*covs[s])(a, b), 0.1 * std::abs((*covs[s])(a, b))) << "set " << s << " entry " << a << b;
      }
  }
}

TEST(Gauss2D, GridAndDeterminism) {
  auto a = gen_gauss2d(Gauss2DConfig{});
  auto b = gen_gauss2d(Gauss2DConfig{});
  EXPECT_EQ(a.dev, b.dev);
  EXPECT_EQ(a.contrast, b.contrast);
  ASSERT_EQ(a.grid.rows(), 41u * 41u);
  EXPECT_EQ(a.grid(0, 0), -6.0);
  EXPECT_EQ(a.grid(0, 1), -6.0);
  EXPECT_EQ(a.grid(1, 1), -5.7);
  EXPECT_EQ(a.grid(41, 0), -5.7);
  EXPECT_EQ(a.grid(41 * 41 - 1, 0), 6.0);
  Gauss2DConfig other;
  other.seed = 8;
  EXPECT_NE(gen_gauss2d(other).dev, a.dev);
}

TEST(Gauss2D, RejectsInvalidConfig) {
  Gauss2DConfig cfg;
  cfg.dev_cov = Matrix::from_rows({{1, 2}, {2, 1}});
  EXPECT_THROW(gen_gauss2d(cfg), NumericError);
  cfg = Gauss2DConfig{};
  cfg.grid_resolution = 5;
  EXPECT_THROW(gen_gauss2d(cfg), DataError);
}

TEST(MultiCenter, CalibratedPrevalenceMatchesTarget) {
  MultiCenterConfig cfg;
  cfg.n_per_center = 20000;
  cfg.coefficients = {0.8, 0.4, 0.0, -0.3, 0.6, 0.0, 0.3, 0.0};
  cfg.intercept = calibrate_intercept(cfg, 0.033);
  Dataset d = gen_multicenter(cfg);
  ASSERT_EQ(d.size(), 100000u);
  EXPECT_NEAR(outcome_rate(d.y), 0.033, 0.005);
}

TEST(MultiCenter, UnshiftedCentersAreIndistinguishable) {
  MultiCenterConfig cfg;
  cfg.coefficients.assign(8, 0.2);
  Dataset d = gen_multicenter(cfg);
  std::vector<std::size_t> c1, c2;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.centers[i] == "C1") c1.push_back(i);
    if (d.centers[i] == "C2") c2.push_back(i);
  }
  ASSERT_EQ(c1.size(), 2000u);
  auto r = score_membership(d.x.select_rows(c1), d.x.select_rows(c2), Matrix(1, 8));
  EXPECT_NEAR(r.membership_auc, 0.5, 0.05);
}

TEST(MultiCenter, ShiftedCenterScoresAsDissimilar) {
  MultiCenterConfig cfg;
  cfg.coefficients.assign(8, 0.2);
  cfg.offsets.assign(5, std::vector<double>(8, 0.0));
  cfg.offsets[4].assign(8, 3.0);
  Dataset d = gen_multicenter(cfg);
  std::vector<std::size_t> dev_rows, ext_rows;
  for (std::size_t i = 0; i < d.size(); ++i) (d.centers[i] == "C5" ? ext_rows : dev_rows).push_back(i);
  TrainConfig tc;
  tc.seed = 1;
  tc.epochs = 200;
  auto ae = train_autoencoder(d.x.select_rows(dev_rows), tc);
  auto dev_scores = score_autoencoder(ae, d.x.select_rows(dev_rows)).values;
  auto ext_scores = score_autoencoder(ae, d.x.select_rows(ext_rows)).values;
  const double m_dev = mean(dev_scores), m_ext = mean(ext_scores);
  double var = 0;
  for (double v : dev_scores) var += (v - m_dev) * (v - m_dev);
  const double sd = std::sqrt(var / static_cast<double>(dev_scores.size()));
  EXPECT_GT(m_ext - m_dev, 2 * sd);
}

TEST(MultiCenter, DeterministicAndLabelled) {
  MultiCenterConfig cfg;
  cfg.n_per_center = 100;
  cfg.coefficients.assign(8, 0.1);
  Dataset a = gen_multicenter(cfg), b = gen_multicenter(cfg);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(std::set<std::string>(a.centers.begin(), a.centers.end()),
            (std::set<std::string>{"C1", "C2", "C3", "C4", "C5"}));
  cfg.seed = 2;
  EXPECT_NE(gen_multicenter(cfg).x, a.x);
}

TEST(MultiCenter, RejectsInconsistentConfig) {
  MultiCenterConfig cfg;
  cfg.coefficients.assign(7, 0.1);
  EXPECT_THROW(gen_multicenter(cfg), DataError);
  cfg.coefficients.assign(8, 0.1);
  cfg.n_per_center = 10;
  EXPECT_THROW(gen_multicenter(cfg), DataError);
}

TEST(Presets, FourNamedRegimes) {
  auto presets = scenario_presets(1);
  ASSERT_EQ(presets.size(), 4u);
  EXPECT_EQ(presets[0].name, "null");
  EXPECT_EQ(presets[1].name, "covariate-shift");
  EXPECT_EQ(presets[2].name, "concept-drift");
  EXPECT_EQ(presets[3].name, "prevalence-shift");
  // Covariate shift leaves the outcome mechanism alone; concept drift leaves
  // the covariates alone.
  EXPECT_TRUE(presets[1].config.coefficient_deltas.empty());
  EXPECT_TRUE(presets[2].config.offsets.empty());
  EXPECT_THROW(find_preset("nope"), DataError);
}
