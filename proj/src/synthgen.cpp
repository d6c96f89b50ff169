#include "shiftval/synthgen.hpp"

#include <cmath>

#include "shiftval/error.hpp"

namespace shiftval {

namespace {
constexpr std::uint64_t kStreamDev = 11;
constexpr std::uint64_t kStreamContrast = 12;
constexpr std::uint64_t kStreamCalibration = 13;
constexpr std::uint64_t kStreamCenterBase = 1000;
}  // namespace

Matrix sample_gaussian(const std::vector<double>& mean, const Matrix& cov, std::size_t n, RngStream& rng) {
  const std::size_t d = mean.size();
  if (cov.rows() != d || cov.cols() != d) throw DataError("gaussian: covariance shape mismatch");
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (cov(a, b) != cov(b, a)) throw NumericError("covariance not symmetric");
  auto l = cholesky(cov);
  if (!l) throw NumericError("covariance not PD");
  Matrix out(n, d);
  std::vector<double> e(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& v : e) v = rng.normal();
    for (std::size_t a = 0; a < d; ++a) {
      double s = mean[a];
      for (std::size_t b = 0; b <= a; ++b) s += (*l)(a, b) * e[b];
      out(r, a) = s;
    }
  }
  return out;
}

Gauss2DData gen_gauss2d(const Gauss2DConfig& cfg) {
  if (cfg.grid_resolution < 11) throw DataError("gauss2d: grid resolution must be >= 11");
  if (!(cfg.grid_hi > cfg.grid_lo)) throw DataError("gauss2d: empty grid range");
  if (cfg.dev_mean.size() != 2 || cfg.contrast_mean.size() != 2) throw DataError("gauss2d: means must be 2-D");
  Gauss2DData out;
  RngStream dev_rng(cfg.seed, kStreamDev);
  RngStream con_rng(cfg.seed, kStreamContrast);
  out.dev = sample_gaussian(cfg.dev_mean, cfg.dev_cov, cfg.n, dev_rng);
  out.contrast = sample_gaussian(cfg.contrast_mean, cfg.contrast_cov, cfg.n, con_rng);
  const std::size_t g = cfg.grid_resolution;
  out.grid = Matrix(g * g, 2);
  const double step = (cfg.grid_hi - cfg.grid_lo) / static_cast<double>(g - 1);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j) {
      out.grid(i * g + j, 0) = cfg.grid_lo + step * static_cast<double>(i);
      out.grid(i * g + j, 1) = cfg.grid_lo + step * static_cast<double>(j);
    }
  return out;
}

void MultiCenterConfig::check() const {
  if (n_centers == 0 || d == 0) throw DataError("multicenter: need at least one center and one feature");
  if (n_per_center < 50) throw DataError("multicenter: n per center must be >= 50");
  if (coefficients.size() != d) throw DataError("multicenter: coefficient count differs from d");
  auto per_center = [&](const std::vector<std::vector<double>>& v, const char* name) {
    if (v.empty()) return;
    if (v.size() != n_centers) throw DataError(std::string("multicenter: ") + name + " needs one row per center");
    for (const auto& r : v)
      if (r.size() != d) throw DataError(std::string("multicenter: ") + name + " rows must have length d");
  };
  per_center(offsets, "offsets");
  per_center(coefficient_deltas, "coefficient_deltas");
  if (!intercept_deltas.empty() && intercept_deltas.size() != n_centers)
    throw DataError("multicenter: intercept_deltas needs one entry per center");
  if (!shift_fractions.empty() && shift_fractions.size() != n_centers)
    throw DataError("multicenter: shift_fractions needs one entry per center");
  for (double f : shift_fractions)
    if (!(f >= 0.0 && f <= 1.0)) throw DataError("multicenter: shift fractions must lie in [0, 1]");
  if (!loadings.empty() && loadings.rows() != d) throw DataError("multicenter: loadings must have d rows");
  if (!(noise_sd > 0.0)) throw DataError("multicenter: noise_sd must be > 0");
}

namespace {

void draw_features(const MultiCenterConfig& cfg, RngStream& rng, std::span<double> x) {
  const std::size_t k = cfg.loadings.cols();
  std::vector<double> f(k);
  for (auto& v : f) v = rng.normal();
  for (std::size_t a = 0; a < cfg.d; ++a) {
    double s = cfg.noise_sd * rng.normal();
    for (std::size_t j = 0; j < k; ++j) s += cfg.loadings(a, j) * f[j];
    x[a] = s;
  }
}

}  // namespace

Dataset gen_multicenter(const MultiCenterConfig& cfg) {
  cfg.check();
  Dataset out;
  const std::size_t n = cfg.n_centers * cfg.n_per_center;
  out.x = Matrix(n, cfg.d);
  out.y.resize(n);
  out.centers.resize(n);
  for (std::size_t a = 0; a < cfg.d; ++a) out.feature_names.push_back("x" + std::to_string(a + 1));
  out.provenance = "multicenter(seed=" + std::to_string(cfg.seed) + ")";

  // Each center owns an independent stream, so centers can be generated in any order.
  for (std::size_t c = 0; c < cfg.n_centers; ++c) {
    RngStream rng(cfg.seed, kStreamCenterBase + c);
    const double frac = cfg.shift_fractions.empty() ? 1.0 : cfg.shift_fractions[c];
    const auto n_shift = static_cast<std::size_t>(std::llround(frac * static_cast<double>(cfg.n_per_center)));
    const double b = cfg.intercept + (cfg.intercept_deltas.empty() ? 0.0 : cfg.intercept_deltas[c]);
    for (std::size_t i = 0; i < cfg.n_per_center; ++i) {
      const std::size_t r = c * cfg.n_per_center + i;
      auto x = out.x.row(r);
      draw_features(cfg, rng, x);
      if (!cfg.offsets.empty() && i < n_shift)
        for (std::size_t a = 0; a < cfg.d; ++a) x[a] += cfg.offsets[c][a];
      double eta = b;
      for (std::size_t a = 0; a < cfg.d; ++a) {
        double beta = cfg.coefficients[a] + (cfg.coefficient_deltas.empty() ? 0.0 : cfg.coefficient_deltas[c][a]);
        eta += beta * x[a];
      }
      out.y[r] = rng.bernoulli(sigmoid(eta)) ? 1 : 0;
      out.centers[r] = cfg.center_name(c);
    }
  }
  return out;
}

double calibrate_intercept(const MultiCenterConfig& cfg, double target, std::size_t n_mc) {
  if (!(target > 0.0 && target < 1.0)) throw DataError("calibrate_intercept: target must lie in (0, 1)");
  RngStream rng(cfg.seed, kStreamCalibration);
  std::vector<double> eta(n_mc);
  std::vector<double> x(cfg.d);
  for (auto& e : eta) {
    draw_features(cfg, rng, x);
    e = 0.0;
    for (std::size_t a = 0; a < cfg.d; ++a) e += cfg.coefficients[a] * x[a];
  }
  auto prevalence = [&](double b) {
    double s = 0.0;
    for (double e : eta) s += sigmoid(b + e);
    return s / static_cast<double>(n_mc);
  };
  double lo = -30.0, hi = 30.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    (prevalence(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MultiCenterConfig base_cohort_config(std::uint64_t seed) {
  MultiCenterConfig cfg;
  cfg.seed = seed;
  cfg.n_centers = 5;
  cfg.n_per_center = 10000;
  cfg.d = 8;
  cfg.loadings = Matrix(8, 2);
  for (std::size_t a = 0; a < 4; ++a) cfg.loadings(a, 0) = 0.9;
  for (std::size_t a = 4; a < 8; ++a) cfg.loadings(a, 1) = 0.9;
  cfg.noise_sd = 0.45;
  cfg.coefficients = {0.8, 0.4, 0.0, -0.3, 0.6, 0.0, 0.3, 0.0};
  cfg.intercept = calibrate_intercept(cfg, 0.15);
  return cfg;
}

std::vector<ScenarioPreset> scenario_presets(std::uint64_t seed) {
  const MultiCenterConfig base = base_cohort_config(seed);
  const std::size_t last = base.n_centers - 1;
  std::vector<ScenarioPreset> out;

  out.push_back({"null", "identical distributions and outcome mechanism in every center", base, ""});

  {
    MultiCenterConfig cfg = base;
    cfg.offsets.assign(cfg.n_centers, std::vector<double>(cfg.d, 0.0));
    cfg.offsets[last] = {2.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    cfg.shift_fractions.assign(cfg.n_centers, 1.0);
    cfg.shift_fractions[last] = 0.4;
    out.push_back({"covariate-shift", "a subgroup of one center lies off the development manifold; p(y|x) unchanged",
                   cfg, cfg.center_name(last)});
  }
  {
    MultiCenterConfig cfg = base;
    cfg.coefficient_deltas.assign(cfg.n_centers, std::vector<double>(cfg.d, 0.0));
    cfg.coefficient_deltas[last] = {1.25, -1.25, 1.25, -1.25, 1.25, -1.25, 1.25, -1.25};
    out.push_back({"concept-drift", "one center has a different outcome mechanism p(y|x)", cfg, cfg.center_name(last)});
  }
  {
    MultiCenterConfig cfg = base;
    cfg.intercept_deltas.assign(cfg.n_centers, 0.0);
    cfg.intercept_deltas[last] = -0.5;
    out.push_back({"prevalence-shift", "one center has a shifted baseline risk", cfg, cfg.center_name(last)});
  }
  return out;
}

ScenarioPreset find_preset(const std::string& name, std::uint64_t seed) {
  for (auto& p : scenario_presets(seed))
    if (p.name == name) return p;
  throw DataError("unknown preset '" + name + "'");
}

}  // namespace shiftval
