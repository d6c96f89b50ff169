#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftval/autoenc.hpp"
#include "shiftval/dataset.hpp"
#include "shiftval/evalmetrics.hpp"
#include "shiftval/glm.hpp"
#include "shiftval/simscore.hpp"

namespace shiftval {

// Matching weights for an external cohort: raw density ratios and the
// clipped, mean-normalised version used by metrics.
struct WeightVector {
  std::vector<double> raw;
  std::vector<double> stabilized;
  double clip_quantile = 99.0;
  double clip_value = 0.0;
  double ess = 0.0;
  bool degenerate = false;
  std::vector<std::string> warnings;

  std::size_t size() const { return raw.size(); }
};

// Clips raw weights at their clip_quantile percentile, divides by the mean and
// attaches the Kish ESS of the result. All-equal raw weights yield exactly 1.
WeightVector stabilize_weights(std::vector<double> raw, double clip_quantile = 99.0);

// raw = f_dev / f_ext per instance.
WeightVector density_ratio_weights(std::span<const double> f_dev, std::span<const double> f_ext,
                                   double clip_quantile = 99.0);

// Weights from two autoencoders: f_D(x) = exp(-e_D(x) / tau_D) with tau_D the
// median training reconstruction error of D's autoencoder. Evaluated in the
// log domain so far-away rows do not underflow.
WeightVector matching_weights(const AutoencoderModel& ae_dev, const AutoencoderModel& ae_ext, const Matrix& x_ext,
                              double clip_quantile = 99.0);

MetricResult matched_evaluation(const LogisticModel& model, const Dataset& ext, const WeightVector& w);

struct ThresholdSpec {
  double percentile = 90.0;
  double value = 0.0;
  std::string source = "dev-holdout";
  ScorerKind kind = ScorerKind::Autoencoder;
};

ThresholdSpec select_threshold(const SimilarityScores& dev_scores, double percentile = 90.0);
// Threshold from the percentile table stored with an autoencoder artifact;
// integer percentiles only.
ThresholdSpec threshold_from_reference(const AutoencoderModel& model, double percentile = 90.0);

struct IdOodSplit {
  std::vector<std::size_t> idlike;
  std::vector<std::size_t> ood;
  double idlike_fraction = 0.0;
  double ood_fraction = 0.0;  // 1 - idlike_fraction, so the pair sums to 1 exactly
};

// ID-like = score <= threshold; OOD = score > threshold.
IdOodSplit split_id_ood(const SimilarityScores& ext_scores, const ThresholdSpec& t);

struct Stratum {
  std::string label;
  std::size_t n = 0;
  double fraction = 0.0;
  std::optional<double> brier;
  std::optional<double> auc;
};

struct StratifiedResult {
  std::vector<Stratum> bins;
  double overall_brier = 0.0;
  // |sum fraction_j * brier_j - overall| over non-empty strata.
  double recombination_error = 0.0;
};

StratifiedResult stratify_id_ood(std::span<const double> p, std::span<const int> y, const IdOodSplit& split);

// Sorts by ascending dissimilarity (stable, ties by row index) and cuts into
// n_bins contiguous groups whose sizes differ by at most one. Bin 0 is the
// most similar.
StratifiedResult decile_curve(std::span<const double> p, std::span<const int> y, const SimilarityScores& ext_scores,
                              std::size_t n_bins = 10);
StratifiedResult decile_curve(const LogisticModel& model, const Dataset& ext, const SimilarityScores& ext_scores,
                              std::size_t n_bins = 10);

struct DriftDiagnostic {
  double dev_rate = 0.0;
  double ext_rate = 0.0;
  double weighted_ext_rate = 0.0;
};

DriftDiagnostic drift_diagnostic(const Dataset& dev, const Dataset& ext, const WeightVector& w);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

// Statistic evaluated on a resample given as row indices; nullopt when the
// statistic is undefined on that resample.
using ResampleMetric = std::function<std::optional<double>(std::span<const std::size_t>)>;

// Percentile bootstrap over instance resampling. Undefined resamples are
// redrawn, up to 10 * B attempts in total.
Interval bootstrap_interval(const ResampleMetric& metric, std::size_t n, std::size_t B = 1000, double level = 0.95,
                            std::uint64_t seed = 0, std::uint64_t stream = 0);

enum class Scenario { DevDeploy, ExtDeploy };
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct EvaluationConfig {
  double threshold_percentile = 90.0;
  std::size_t n_bins = 10;
  double clip_quantile = 99.0;
  std::size_t bootstrap_b = 1000;
  double bootstrap_level = 0.95;
  std::uint64_t bootstrap_seed = 0;
};

struct MatchedSummary {
  double brier = 0.0;
  double ess = 0.0;
  double mean_weight = 0.0;      // stabilized weights
  double mean_raw_weight = 0.0;
  double clip_quantile = 99.0;
  std::size_t n = 0;
  // Internal Brier inside the matched-Brier bootstrap interval.
  bool consistent = false;
};

inline constexpr const char* kConsistencyRule =
    "internal brier inside the matched-brier percentile bootstrap interval";

struct BootstrapSummary {
  double level = 0.95;
  std::size_t b = 1000;
  std::uint64_t seed = 0;
  std::map<std::string, Interval> intervals;
};

struct ValidationReport {
  Scenario scenario = Scenario::DevDeploy;
  std::string center;                // external site label, may be empty
  nlohmann::ordered_json config;     // echo of seeds and settings
  std::optional<MetricResult> internal;
  MetricResult external;
  std::optional<double> external_auc;
  std::optional<MatchedSummary> matched;
  std::optional<StratifiedResult> decile_curve;
  std::optional<ThresholdSpec> threshold;
  std::optional<Stratum> idlike;
  std::optional<Stratum> ood;
  std::optional<DriftDiagnostic> drift;
  BootstrapSummary bootstrap;
  bool recombination_ok = true;
  double max_recombination_error = 0.0;
};

// Everything one external evaluation needs. Development-side inputs are
// optional: an external site holding only the autoencoder artifact can still
// build the external-deployment report.
struct EvaluationInputs {
  const LogisticModel* model = nullptr;
  const Dataset* ext = nullptr;
  const AutoencoderModel* ae_dev = nullptr;
  const AutoencoderModel* ae_ext = nullptr;   // needed for matched weights
  const Dataset* dev_test = nullptr;          // internal validation rows
  const Dataset* dev_all = nullptr;           // development outcome rate
  std::optional<ThresholdSpec> threshold;     // default: from ae_dev reference
  std::string center;
  nlohmann::ordered_json config;
};

struct EvaluationOutput {
  ValidationReport dev_deploy;  // filled only when development inputs exist
  ValidationReport ext_deploy;
  SimilarityScores ext_scores;
  std::optional<WeightVector> weights;
  bool has_dev_deploy = false;
};

EvaluationOutput evaluate_external(const EvaluationInputs& in, const EvaluationConfig& cfg);

struct LocoConfig {
  std::size_t top_k = 5;
  std::size_t min_center_size = 50;
  double train_fraction = 0.8;
  std::uint64_t master_seed = 1;
  TrainConfig ae;
  GlmSettings glm;
  EvaluationConfig eval;
  std::size_t jobs = 1;
};

struct FoldResult {
  std::string center;
  std::size_t fold_index = 0;
  ValidationReport dev_deploy;
  ValidationReport ext_deploy;
  WeightVector weights;
  SimilarityScores ext_scores;
  LogisticModel model;
  std::vector<std::string> warnings;
};

// Leave-one-center-out over the top_k largest centers (ties by center id).
// Results are sorted by center id and do not depend on the order in which
// folds run.
std::vector<FoldResult> run_loco(const Dataset& all, const LocoConfig& cfg);

nlohmann::ordered_json config_echo(const LocoConfig& cfg, const std::string& data_provenance);

}  // namespace shiftval
