#include "shiftval/simscore.hpp"

#include <cmath>

#include "shiftval/error.hpp"
#include "shiftval/evalmetrics.hpp"

namespace shiftval {

std::string to_string(ScorerKind k) {
  switch (k) {
    case ScorerKind::Autoencoder: return "autoencoder";
    case ScorerKind::Membership: return "membership";
    case ScorerKind::Mahalanobis: return "mahalanobis";
  }
  return "unknown";
}

ScorerKind scorer_from_string(const std::string& s) {
  if (s == "autoencoder") return ScorerKind::Autoencoder;
  if (s == "membership") return ScorerKind::Membership;
  if (s == "mahalanobis") return ScorerKind::Mahalanobis;
  throw DataError("unknown scorer kind '" + s + "'");
}

SimilarityScores score_autoencoder(const AutoencoderModel& model, const Matrix& x, const std::string& reference_id) {
  return {reconstruction_error(model, x), ScorerKind::Autoencoder, reference_id};
}

MembershipResult score_membership(const Matrix& dev, const Matrix& ext, const Matrix& x,
                                  const GlmSettings& settings) {
  if (dev.rows() == 0 || ext.rows() == 0) throw DataError("score_membership: empty cohort");
  Matrix both = dev.vstack(ext);
  std::vector<int> label(both.rows(), 0);
  std::fill(label.begin(), label.begin() + static_cast<std::ptrdiff_t>(dev.rows()), 1);
  MembershipResult out;
  out.model = fit_logistic(both, label, settings);
  out.membership_auc = auc(predict_proba(out.model, both), label).value;
  auto p = predict_proba(out.model, x);
  out.scores.kind = ScorerKind::Membership;
  out.scores.reference_id = "membership";
  out.scores.values.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out.scores.values[i] = 1.0 - p[i];
  return out;
}

MahalanobisReference make_mahalanobis(std::vector<double> mean, const Matrix& covariance, double ridge_eps) {
  const std::size_t d = mean.size();
  if (covariance.rows() != d || covariance.cols() != d) throw DataError("mahalanobis: covariance shape mismatch");
  if (ridge_eps < 0.0) throw DataError("mahalanobis: ridge must be >= 0");
  MahalanobisReference ref;
  ref.mean = std::move(mean);
  ref.ridge_eps = ridge_eps;
  ref.covariance = covariance;
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += covariance(i, i);
  for (std::size_t i = 0; i < d; ++i) ref.covariance(i, i) += ridge_eps * trace / static_cast<double>(d);
  auto l = cholesky(ref.covariance);
  if (!l) throw NumericError("covariance not PD");
  ref.cholesky = std::move(*l);
  return ref;
}

MahalanobisReference fit_mahalanobis(const Matrix& dev, double ridge_eps) {
  const std::size_t n = dev.rows(), d = dev.cols();
  if (n <= d) throw DataError("fit_mahalanobis: need more rows than features");
  if (!dev.all_finite()) throw DataError("fit_mahalanobis: non-finite input");
  std::vector<double> mu(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) mu[c] += dev(r, c);
  for (auto& m : mu) m /= static_cast<double>(n);
  Matrix cov(d, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t a = 0; a < d; ++a) {
      double da = dev(r, a) - mu[a];
      for (std::size_t b = 0; b <= a; ++b) cov(a, b) += da * (dev(r, b) - mu[b]);
    }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      cov(a, b) /= static_cast<double>(n);
      cov(b, a) = cov(a, b);
    }
  return make_mahalanobis(std::move(mu), cov, ridge_eps);
}

SimilarityScores score_mahalanobis(const MahalanobisReference& ref, const Matrix& x) {
  const std::size_t d = ref.mean.size();
  if (x.cols() != d) throw DataError("score_mahalanobis: feature count mismatch");
  SimilarityScores s;
  s.kind = ScorerKind::Mahalanobis;
  s.reference_id = "mahalanobis";
  s.values.resize(x.rows());
  std::vector<double> diff(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) diff[c] = x(r, c) - ref.mean[c];
    auto y = forward_substitute(ref.cholesky, diff);
    double q = 0.0;
    for (double v : y) q += v * v;
    s.values[r] = std::sqrt(q);
  }
  return s;
}

std::vector<double> pseudo_density(std::span<const double> dissimilarity, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DataError("pseudo_density: bandwidth must be > 0");
  std::vector<double> out(dissimilarity.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(-dissimilarity[i] / tau);
  return out;
}

std::vector<double> pseudo_density(const SimilarityScores& scores, double tau) {
  return pseudo_density(std::span<const double>(scores.values), tau);
}

}  // namespace shiftval
