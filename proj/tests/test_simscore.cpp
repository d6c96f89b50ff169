#include <gtest/gtest.h>

#include <random>

#include "shiftval/error.hpp"
#include "shiftval/simscore.hpp"
#include "shiftval/synthgen.hpp"

using namespace shiftval;

namespace {

Matrix gaussian(std::size_t n, std::size_t d, std::uint64_t seed, double shift_first = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01;
  Matrix x(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) x(r, c) = n01(gen) + (c == 0 ? shift_first : 0.0);
  return x;
}

}  // namespace

TEST(AutoencoderScore, ShiftedRowsScoreHigher) {
  Matrix dev = gaussian(800, 3, 1);
  TrainConfig cfg;
  cfg.seed = 2;
  auto model = train_autoencoder(dev, cfg);
  Matrix shifted(200, 3);
  Matrix base = gaussian(200, 3, 3);
  for (std::size_t r = 0; r < 200; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      shifted(r, c) = base(r, c) + model.standardizer.means[c] + 5 * model.standardizer.scales[c];
  auto s_dev = score_autoencoder(model, dev);
  auto s_far = score_autoencoder(model, shifted);
  EXPECT_EQ(s_dev.kind, ScorerKind::Autoencoder);
  EXPECT_LT(median(s_dev.values), median(s_far.values));
}

TEST(AutoencoderScore, DeterministicAndPermutationEquivariant) {
  Matrix dev = gaussian(200, 4, 4);
  TrainConfig cfg;
  cfg.epochs = 20;
  auto model = train_autoencoder(dev, cfg);
  Matrix x = gaussian(10, 4, 5);
  Matrix twice = x.vstack(x);
  auto s = score_autoencoder(model, twice).values;
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(s[i], s[i + 10]);
  std::vector<std::size_t> perm{3, 9, 0, 1, 8, 2, 7, 4, 6, 5};
  auto sp = score_autoencoder(model, x.select_rows(perm)).values;
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(sp[i], s[perm[i]]);
}

TEST(MembershipScore, SameDistributionIsUninformative) {
  auto r = score_membership(gaussian(2000, 3, 6), gaussian(2000, 3, 7), gaussian(5, 3, 8));
  EXPECT_NEAR(r.membership_auc, 0.5, 0.05);
  EXPECT_EQ(r.scores.kind, ScorerKind::Membership);
  for (double v : r.scores.values) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(MembershipScore, FarShiftIsSeparable) {
  auto r = score_membership(gaussian(2000, 3, 9), gaussian(2000, 3, 10, 4.0), gaussian(5, 3, 11));
  EXPECT_GT(r.membership_auc, 0.95);
}

TEST(MembershipScore, LinearScorerRanksSomeFarPointsAsSimilar) {
  Gauss2DData data = gen_gauss2d(Gauss2DConfig{});
  auto r = score_membership(data.dev, data.contrast, data.grid);
  auto dev_scores = score_membership(data.dev, data.contrast, data.dev).scores.values;
  auto maha = score_mahalanobis(fit_mahalanobis(data.dev), data.grid).values;
  const double dev_median = median(dev_scores);
  bool witness = false;
  for (std::size_t i = 0; i < maha.size(); ++i) witness |= maha[i] > 4 && r.scores.values[i] < dev_median;
  EXPECT_TRUE(witness);
}

TEST(Mahalanobis, ClosedFormCases) {
  auto ref = make_mahalanobis({1.0, -2.0}, Matrix::from_rows({{2, 0}, {0, 0.5}}));
  Matrix x = Matrix::from_rows({{1.0, -2.0}, {2.0, -1.0}});
  auto s = score_mahalanobis(ref, x).values;
  EXPECT_EQ(s[0], 0.0);
  EXPECT_NEAR(s[1], std::sqrt(2.5), 1e-15);

  auto id = make_mahalanobis({0.0, 0.0, 0.0}, Matrix::identity(3));
  auto e = score_mahalanobis(id, Matrix::from_rows({{3, 4, 12}})).values;
  EXPECT_NEAR(e[0], 13.0, 1e-14);

  EXPECT_THROW(make_mahalanobis({0.0, 0.0}, Matrix::from_rows({{1, 2}, {2, 1}})), NumericError);
}

TEST(Mahalanobis, RidgeHandlesCollinearFeatures) {
  Matrix x = gaussian(100, 2, 12);
  Matrix dup(100, 3);
  for (std::size_t r = 0; r < 100; ++r) {
    dup(r, 0) = x(r, 0);
    dup(r, 1) = x(r, 1);
    dup(r, 2) = x(r, 0);
  }
  auto ref = fit_mahalanobis(dup, 1e-6);
  for (double v : score_mahalanobis(ref, dup).values) EXPECT_TRUE(std::isfinite(v));
}

TEST(PseudoDensity, Examples) {
  auto f = pseudo_density(std::vector<double>{0.0, 0.7, 1.4, 3.0}, 0.7);
  EXPECT_EQ(f[0], 1.0);
  EXPECT_NEAR(f[1], 0.36787944117144233, 1e-15);
  EXPECT_GT(f[1], f[2]);
  EXPECT_GT(f[2], f[3]);
  EXPECT_THROW(pseudo_density(std::vector<double>{1.0}, 0.0), DataError);
}
