#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftval/numstat.hpp"

namespace shiftval {

struct GlmSettings {
  double ridge = 1e-6;
  std::size_t max_iter = 100;
  double tol = 1e-8;
};

// Binary logistic regression; coefficients are on the raw feature scale.
struct LogisticModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double ridge = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<std::string> feature_names;

  std::size_t dims() const { return coefficients.size(); }
};

// Ridge-penalised maximum likelihood by iteratively reweighted least squares
// with step-halving. Features are standardized internally so the penalty acts
// on standardized coefficients; the intercept is never penalised.
// Non-convergence is reported through `converged`, not thrown.
LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, const GlmSettings& settings = {});

// Probabilities clamped to [1e-12, 1 - 1e-12].
std::vector<double> predict_proba(const LogisticModel& model, const Matrix& x);

// Penalised log-likelihood and its gradient on the standardized scale, as used
// by the fitter; exposed for tests of the monotone-ascent property.
struct IrlsTrace {
  std::vector<double> objective;  // one entry per accepted iterate
  std::vector<double> max_gradient;
};
LogisticModel fit_logistic_traced(const Matrix& x, std::span<const int> y, const GlmSettings& settings,
                                  IrlsTrace* trace);

nlohmann::ordered_json to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const nlohmann::json& j);

}  // namespace shiftval
