#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shiftval/dataset.hpp"
#include "shiftval/numstat.hpp"

namespace shiftval {

// Two-dimensional Gaussian simulation: a development sample, a contrast
// sample for the membership model and a regular evaluation grid.
struct Gauss2DConfig {
  std::vector<double> dev_mean{0.0, 0.0};
  Matrix dev_cov = Matrix::from_rows({{1.0, 0.6}, {0.6, 1.0}});
  std::vector<double> contrast_mean{3.0, 3.0};
  Matrix contrast_cov = Matrix::from_rows({{1.0, -0.4}, {-0.4, 1.0}});
  std::size_t n = 1000;
  double grid_lo = -6.0;
  double grid_hi = 6.0;
  std::size_t grid_resolution = 41;
  std::uint64_t seed = 7;
};

struct Gauss2DData {
  Matrix dev;
  Matrix contrast;
  Matrix grid;  // grid_resolution^2 rows, x1 varying slowest
};

Gauss2DData gen_gauss2d(const Gauss2DConfig& cfg);

// Draws n rows from N(mean, cov) using the given stream.
Matrix sample_gaussian(const std::vector<double>& mean, const Matrix& cov, std::size_t n, RngStream& rng);

// Multi-center cohort with controllable covariate shift (offsets), concept
// drift (coefficient deltas) and prevalence shift (intercept deltas).
//
// Per center c:  x = s_i * offset_c + L f + noise_sd * e,   f ~ N(0, I_k), e ~ N(0, I_d)
//                y ~ Bernoulli(sigmoid(b + b_c + (beta + gamma_c) . x))
// where s_i is 1 for the first round(shift_fraction_c * n_c) rows and 0
// otherwise. With no loadings and noise_sd = 1 the features are N(offset, I).
struct MultiCenterConfig {
  std::size_t n_centers = 5;
  std::size_t n_per_center = 2000;
  std::size_t d = 8;
  std::vector<std::vector<double>> offsets;           // n_centers x d, empty = zeros
  std::vector<std::vector<double>> coefficient_deltas;  // n_centers x d, empty = zeros
  std::vector<double> intercept_deltas;               // n_centers, empty = zeros
  std::vector<double> shift_fractions;                // n_centers, empty = ones
  std::vector<double> coefficients;                   // beta, length d
  double intercept = 0.0;
  Matrix loadings;                                    // d x k, empty = none
  double noise_sd = 1.0;
  std::uint64_t seed = 1;

  std::string center_name(std::size_t c) const { return "C" + std::to_string(c + 1); }
  void check() const;
};

Dataset gen_multicenter(const MultiCenterConfig& cfg);

// Intercept b such that the pooled prevalence over the unshifted base DGP
// equals `target`, found by bisection on a fixed Monte Carlo sample of
// linear predictors.
double calibrate_intercept(const MultiCenterConfig& cfg, double target, std::size_t n_mc = 100000);

struct ScenarioPreset {
  std::string name;
  std::string description;
  MultiCenterConfig config;
  std::string shifted_center;  // the center carrying the shift, empty for "null"
};

// "null", "covariate-shift", "concept-drift", "prevalence-shift".
std::vector<ScenarioPreset> scenario_presets(std::uint64_t seed = 1);
ScenarioPreset find_preset(const std::string& name, std::uint64_t seed = 1);

// Base DGP shared by the presets (two latent factors over eight features).
MultiCenterConfig base_cohort_config(std::uint64_t seed = 1);

}  // namespace shiftval
