#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "shiftval/autoenc.hpp"
#include "shiftval/glm.hpp"
#include "shiftval/numstat.hpp"

namespace shiftval {

enum class ScorerKind { Autoencoder, Membership, Mahalanobis };

std::string to_string(ScorerKind k);
ScorerKind scorer_from_string(const std::string& s);

// Per-instance dissimilarity to a development reference; higher = less similar.
struct SimilarityScores {
  std::vector<double> values;
  ScorerKind kind = ScorerKind::Autoencoder;
  std::string reference_id;

  std::size_t size() const { return values.size(); }
};

// Reconstruction error under a development autoencoder. Only the trained
// artifact is needed; development rows never enter this path.
SimilarityScores score_autoencoder(const AutoencoderModel& model, const Matrix& x,
                                   const std::string& reference_id = "autoencoder");

struct MembershipResult {
  SimilarityScores scores;  // 1 - P(dev | x)
  LogisticModel model;
  double membership_auc = 0.5;
};

// Logistic membership model on dev (label 1) versus ext (label 0), then
// applied to `x`. AUC is computed on the training concatenation.
MembershipResult score_membership(const Matrix& dev, const Matrix& ext, const Matrix& x,
                                  const GlmSettings& settings = {});

struct MahalanobisReference {
  std::vector<double> mean;
  Matrix covariance;   // regularized
  Matrix cholesky;     // lower factor of `covariance`
  double ridge_eps = 0.0;
};

// Population covariance plus ridge_eps * (trace/d) * I.
MahalanobisReference fit_mahalanobis(const Matrix& dev, double ridge_eps = 1e-6);
MahalanobisReference make_mahalanobis(std::vector<double> mean, const Matrix& covariance, double ridge_eps = 0.0);
SimilarityScores score_mahalanobis(const MahalanobisReference& ref, const Matrix& x);

// exp(-e / tau) for each dissimilarity e.
std::vector<double> pseudo_density(std::span<const double> dissimilarity, double tau);
std::vector<double> pseudo_density(const SimilarityScores& scores, double tau);

inline constexpr const char* kPseudoDensityConvention = "pseudo-density convention v1";

}  // namespace shiftval
