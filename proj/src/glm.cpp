#include "shiftval/glm.hpp"

#include <algorithm>
#include <cmath>

#include "shiftval/error.hpp"

namespace shiftval {

namespace {

constexpr double kProbFloor = 1e-12;

double log1pexp(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// Design matrix row i is (1, z_i). beta[0] is the intercept.
struct Problem {
  const Matrix& z;
  std::span<const int> y;
  double ridge;

  double objective(const std::vector<double>& beta) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
      double eta = linear(beta, i);
      ll += y[i] * eta - log1pexp(eta);
    }
    double pen = 0.0;
    for (std::size_t j = 1; j < beta.size(); ++j) pen += beta[j] * beta[j];
    return ll - 0.5 * ridge * pen;
  }

  double linear(const std::vector<double>& beta, std::size_t i) const {
    double eta = beta[0];
    auto r = z.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) eta += beta[j + 1] * r[j];
    return eta;
  }
};

}  // namespace

LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, const GlmSettings& settings) {
  return fit_logistic_traced(x, y, settings, nullptr);
}

LogisticModel fit_logistic_traced(const Matrix& x, std::span<const int> y, const GlmSettings& settings,
                                  IrlsTrace* trace) {
  if (x.rows() != y.size()) throw DataError("fit_logistic: row count does not match label count");
  if (x.rows() == 0) throw DataError("fit_logistic: empty data");
  if (settings.ridge < 0.0) throw DataError("fit_logistic: ridge must be >= 0");
  if (!x.all_finite()) throw DataError("fit_logistic: non-finite features");
  std::size_t positives = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw DataError("fit_logistic: labels must be 0 or 1");
    positives += static_cast<std::size_t>(v);
  }
  if (positives == 0 || positives == y.size()) throw DataError("degenerate labels");

  const Standardizer s = fit_standardizer(x);
  const Matrix z = s.apply(x);
  const std::size_t n = z.rows(), d = z.cols(), k = d + 1;
  Problem prob{z, y, settings.ridge};

  std::vector<double> beta(k, 0.0);
  double prev = static_cast<double>(positives) / static_cast<double>(n);
  beta[0] = std::log(prev / (1.0 - prev));
  double obj = prob.objective(beta);

  LogisticModel model;
  model.ridge = settings.ridge;
  std::vector<double> grad(k);
  Matrix hess(k, k);
  std::vector<double> row(k);

  for (std::size_t iter = 0;; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.values().begin(), hess.values().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      row[0] = 1.0;
      auto zi = z.row(i);
      std::copy(zi.begin(), zi.end(), row.begin() + 1);
      double p = sigmoid(prob.linear(beta, i));
      double w = p * (1.0 - p);
      double r = y[i] - p;
      for (std::size_t a = 0; a < k; ++a) {
        grad[a] += row[a] * r;
        double wa = w * row[a];
        for (std::size_t b = 0; b <= a; ++b) hess(a, b) += wa * row[b];
      }
    }
    for (std::size_t a = 1; a < k; ++a) {
      grad[a] -= settings.ridge * beta[a];
      hess(a, a) += settings.ridge;
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < a; ++b) hess(b, a) = hess(a, b);

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (trace) {
      trace->objective.push_back(obj);
      trace->max_gradient.push_back(gmax);
    }
    model.iterations = iter;
    if (gmax < settings.tol) {
      model.converged = true;
      break;
    }
    if (iter >= settings.max_iter) break;

    auto chol = cholesky(hess);
    if (!chol) throw NumericError("fit_logistic: Hessian not positive definite (try ridge > 0)");
    std::vector<double> step = cholesky_solve(*chol, grad);

    // Step-halving keeps the penalised log-likelihood non-decreasing.
    double t = 1.0;
    bool accepted = false;
    std::vector<double> cand(k);
    for (int h = 0; h < 40; ++h, t *= 0.5) {
      for (std::size_t a = 0; a < k; ++a) cand[a] = beta[a] + t * step[a];
      double c = prob.objective(cand);
      if (std::isfinite(c) && c >= obj) {
        beta = cand;
        obj = c;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent direction left at machine precision
  }

  // Map back to the raw feature scale.
  model.coefficients.resize(d);
  model.intercept = beta[0];
  for (std::size_t j = 0; j < d; ++j) {
    model.coefficients[j] = beta[j + 1] / s.scales[j];
    model.intercept -= model.coefficients[j] * s.means[j];
  }
  for (double c : model.coefficients)
    if (!std::isfinite(c)) throw NumericError("fit_logistic: non-finite coefficients");
  return model;
}

std::vector<double> predict_proba(const LogisticModel& model, const Matrix& x) {
  if (x.cols() != model.dims())
    throw DataError("predict_proba: model expects " + std::to_string(model.dims()) + " features, got " +
                    std::to_string(x.cols()));
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = model.intercept;
    auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) eta += model.coefficients[j] * r[j];
    out[i] = std::clamp(sigmoid(eta), kProbFloor, 1.0 - kProbFloor);
  }
  return out;
}

nlohmann::ordered_json to_json(const LogisticModel& model) {
  nlohmann::ordered_json j;
  j["coefficients"] = model.coefficients;
  j["intercept"] = model.intercept;
  j["ridge"] = model.ridge;
  j["feature_names"] = model.feature_names;
  j["converged"] = model.converged;
  j["iterations"] = model.iterations;
  return j;
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
  LogisticModel m;
  try {
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.ridge = j.value("ridge", 0.0);
    if (j.contains("feature_names")) m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.converged = j.value("converged", true);
    m.iterations = j.value("iterations", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("logistic model: ") + e.what());
  }
  if (!m.feature_names.empty() && m.feature_names.size() != m.coefficients.size())
    throw DataError("logistic model: feature_names and coefficients differ in length");
  return m;
}

}  // namespace shiftval
