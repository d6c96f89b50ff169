#include "shiftval/valframe.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "shiftval/error.hpp"

namespace shiftval {

// --- Weights ----------------------------------------------------------------

WeightVector stabilize_weights(std::vector<double> raw, double clip_quantile) {
  if (raw.empty()) throw DataError("weights: empty cohort");
  if (!(clip_quantile > 0.0 && clip_quantile <= 100.0)) throw DataError("weights: clip quantile must lie in (0, 100]");
  for (double w : raw)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("weights: raw weights must be finite and >= 0");
  WeightVector out;
  out.clip_quantile = clip_quantile;
  const bool all_equal = std::all_of(raw.begin(), raw.end(), [&](double w) { return w == raw.front(); });
  if (all_equal) {
    out.degenerate = true;
    out.clip_value = raw.front();
    out.stabilized.assign(raw.size(), 1.0);
    if (raw.front() != 1.0) out.warnings.push_back("all raw weights are equal; using uniform weights");
  } else {
    out.clip_value = percentile(raw, clip_quantile);
    out.stabilized.resize(raw.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      out.stabilized[i] = std::min(raw[i], out.clip_value);
      sum += out.stabilized[i];
    }
    if (!(sum > 0.0)) throw NumericError("weights: all clipped weights are zero");
    const double m = sum / static_cast<double>(raw.size());
    for (auto& w : out.stabilized) w /= m;
  }
  out.raw = std::move(raw);
  out.ess = effective_sample_size(out.stabilized);
  return out;
}

WeightVector density_ratio_weights(std::span<const double> f_dev, std::span<const double> f_ext,
                                   double clip_quantile) {
  if (f_dev.size() != f_ext.size()) throw DataError("weights: density vectors differ in length");
  std::vector<double> raw(f_dev.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!(f_ext[i] > 0.0) || !(f_dev[i] >= 0.0)) throw DataError("weights: densities must be positive");
    raw[i] = f_dev[i] / f_ext[i];
  }
  return stabilize_weights(std::move(raw), clip_quantile);
}

WeightVector matching_weights(const AutoencoderModel& ae_dev, const AutoencoderModel& ae_ext, const Matrix& x_ext,
                              double clip_quantile) {
  if (ae_dev.dims() != ae_ext.dims() || ae_dev.dims() != x_ext.cols())
    throw DataError("matching weights: feature schema mismatch between autoencoders and cohort");
  if (ae_dev.schema && ae_ext.schema && ae_dev.schema->feature_names() != ae_ext.schema->feature_names())
    throw DataError("matching weights: autoencoders were trained on different feature schemas");
  const double tau_dev = ae_dev.meta.median_training_error;
  const double tau_ext = ae_ext.meta.median_training_error;
  if (!(tau_dev > 0.0) || !(tau_ext > 0.0)) {
    auto w = stabilize_weights(std::vector<double>(x_ext.rows(), 1.0), clip_quantile);
    w.degenerate = true;
    w.warnings.push_back("zero median training error; pseudo-densities are degenerate, using uniform weights");
    return w;
  }
  auto e_dev = reconstruction_error(ae_dev, x_ext);
  auto e_ext = reconstruction_error(ae_ext, x_ext);
  std::vector<double> raw(x_ext.rows());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double log_ratio = -e_dev[i] / tau_dev + e_ext[i] / tau_ext;
    raw[i] = std::exp(std::clamp(log_ratio, -700.0, 700.0));
  }
  return stabilize_weights(std::move(raw), clip_quantile);
}

MetricResult matched_evaluation(const LogisticModel& model, const Dataset& ext, const WeightVector& w) {
  if (!ext.has_outcome()) throw DataError("matched evaluation: external cohort has no outcome");
  if (w.size() != ext.size()) throw DataError("matched evaluation: weight count differs from cohort size");
  return weighted_brier(predict_proba(model, ext.x), ext.y, w.stabilized);
}

// --- Thresholds and strata --------------------------------------------------

ThresholdSpec select_threshold(const SimilarityScores& dev_scores, double percentile_value) {
  if (dev_scores.values.empty()) throw DataError("empty sample");
  ThresholdSpec t;
  t.percentile = percentile_value;
  t.value = percentile(dev_scores.values, percentile_value);
  t.kind = dev_scores.kind;
  return t;
}

ThresholdSpec threshold_from_reference(const AutoencoderModel& model, double percentile_value) {
  if (!model.reference) throw DataError("autoencoder artifact carries no reference score table");
  double ip = std::round(percentile_value);
  if (ip != percentile_value || ip < 0 || ip > 100)
    throw DataError("reference score table supports integer percentiles in [0, 100] only");
  ThresholdSpec t;
  t.percentile = percentile_value;
  t.value = model.reference->percentiles.at(static_cast<std::size_t>(ip));
  t.source = model.reference->source;
  t.kind = ScorerKind::Autoencoder;
  return t;
}

IdOodSplit split_id_ood(const SimilarityScores& ext_scores, const ThresholdSpec& t) {
  if (ext_scores.kind != t.kind) throw DataError("incomparable scores");
  if (ext_scores.values.empty()) throw DataError("split: empty cohort");
  IdOodSplit s;
  for (std::size_t i = 0; i < ext_scores.values.size(); ++i)
    (ext_scores.values[i] <= t.value ? s.idlike : s.ood).push_back(i);
  s.idlike_fraction = static_cast<double>(s.idlike.size()) / static_cast<double>(ext_scores.values.size());
  s.ood_fraction = 1.0 - s.idlike_fraction;
  return s;
}

namespace {

std::optional<double> maybe_auc(std::span<const double> p, std::span<const int> y) {
  bool pos = false, neg = false;
  for (int v : y) (v ? pos : neg) = true;
  if (!pos || !neg) return std::nullopt;
  return auc(p, y).value;
}

Stratum make_stratum(std::string label, std::span<const std::size_t> rows, double fraction,
                     std::span<const double> p, std::span<const int> y) {
  Stratum s;
  s.label = std::move(label);
  s.n = rows.size();
  s.fraction = fraction;
  if (rows.empty()) return s;
  std::vector<double> ps;
  std::vector<int> ys;
  for (auto i : rows) {
    ps.push_back(p[i]);
    ys.push_back(y[i]);
  }
  s.brier = brier(ps, ys).value;
  s.auc = maybe_auc(ps, ys);
  return s;
}

void finish_recombination(StratifiedResult& r, std::span<const double> p, std::span<const int> y) {
  r.overall_brier = brier(p, y).value;
  double acc = 0.0;
  for (const auto& b : r.bins)
    if (b.brier) acc += b.fraction * *b.brier;
  r.recombination_error = std::abs(acc - r.overall_brier);
}

std::string bin_label(std::size_t j, std::size_t k) {
  auto fmt = [](double v) {
    std::ostringstream os;
    if (v == std::floor(v))
      os << static_cast<long long>(v);
    else
      os << std::fixed << std::setprecision(1) << v;
    return os.str();
  };
  double lo = 100.0 * static_cast<double>(j) / static_cast<double>(k);
  double hi = 100.0 * static_cast<double>(j + 1) / static_cast<double>(k);
  return fmt(lo) + "-" + fmt(hi);
}

}  // namespace

StratifiedResult stratify_id_ood(std::span<const double> p, std::span<const int> y, const IdOodSplit& split) {
  if (p.size() != y.size() || p.size() != split.idlike.size() + split.ood.size())
    throw DataError("stratify: length mismatch");
  StratifiedResult r;
  r.bins.push_back(make_stratum("idlike", split.idlike, split.idlike_fraction, p, y));
  r.bins.push_back(make_stratum("ood", split.ood, split.ood_fraction, p, y));
  finish_recombination(r, p, y);
  return r;
}

StratifiedResult decile_curve(std::span<const double> p, std::span<const int> y, const SimilarityScores& ext_scores,
                              std::size_t n_bins) {
  const std::size_t n = ext_scores.values.size();
  if (n_bins < 2) throw DataError("decile curve: need at least 2 bins");
  if (n < n_bins) throw DataError("decile curve: cohort smaller than the number of bins");
  if (p.size() != n || y.size() != n) throw DataError("decile curve: length mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ext_scores.values[a] < ext_scores.values[b];
  });
  StratifiedResult r;
  for (std::size_t j = 0; j < n_bins; ++j) {
    const std::size_t lo = j * n / n_bins, hi = (j + 1) * n / n_bins;
    std::span<const std::size_t> rows(order.data() + lo, hi - lo);
    r.bins.push_back(make_stratum(bin_label(j, n_bins), rows,
                                  static_cast<double>(hi - lo) / static_cast<double>(n), p, y));
  }
  finish_recombination(r, p, y);
  return r;
}

StratifiedResult decile_curve(const LogisticModel& model, const Dataset& ext, const SimilarityScores& ext_scores,
                              std::size_t n_bins) {
  if (!ext.has_outcome()) throw DataError("decile curve: external cohort has no outcome");
  return decile_curve(predict_proba(model, ext.x), ext.y, ext_scores, n_bins);
}

DriftDiagnostic drift_diagnostic(const Dataset& dev, const Dataset& ext, const WeightVector& w) {
  if (!dev.has_outcome() || !ext.has_outcome()) throw DataError("drift diagnostic: outcomes required on both cohorts");
  if (w.size() != ext.size()) throw DataError("drift diagnostic: weight count differs from cohort size");
  return {outcome_rate(dev.y), outcome_rate(ext.y), weighted_outcome_rate(ext.y, w.stabilized)};
}

Interval bootstrap_interval(const ResampleMetric& metric, std::size_t n, std::size_t B, double level,
                            std::uint64_t seed, std::uint64_t stream) {
  if (B < 100) throw DataError("bootstrap: B must be >= 100");
  if (!(level > 0.0 && level < 1.0)) throw DataError("bootstrap: level must lie in (0, 1)");
  if (n == 0) throw DataError("bootstrap: empty sample");
  RngStream rng(seed, stream);
  std::vector<double> stats;
  stats.reserve(B);
  std::vector<std::size_t> idx(n);
  std::size_t attempts = 0;
  while (stats.size() < B && attempts < 10 * B) {
    ++attempts;
    for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
    if (auto v = metric(idx)) stats.push_back(*v);
  }
  if (stats.empty()) throw NumericError("bootstrap: statistic undefined on every resample");
  const double tail = 100.0 * (1.0 - level) / 2.0;
  return {percentile(stats, tail), percentile(stats, 100.0 - tail)};
}

std::string to_string(Scenario s) { return s == Scenario::DevDeploy ? "dev-deploy" : "ext-deploy"; }

Scenario scenario_from_string(const std::string& s) {
  if (s == "dev-deploy" || s == "development-deployment") return Scenario::DevDeploy;
  if (s == "ext-deploy" || s == "external-deployment") return Scenario::ExtDeploy;
  throw DataError("unknown scenario '" + s + "'");
}

// --- Report assembly ----------------------------------------------------------

namespace {

// Bootstrap stream ids within one evaluation.
enum : std::uint64_t { kBootInternal = 1, kBootExternal, kBootMatched, kBootIdlike, kBootOod };

Interval brier_interval(std::span<const double> p, std::span<const int> y, std::span<const std::size_t> rows,
                        const EvaluationConfig& cfg, std::uint64_t stream) {
  ResampleMetric f = [&](std::span<const std::size_t> idx) -> std::optional<double> {
    double s = 0.0;
    for (auto k : idx) {
      double e = p[rows[k]] - y[rows[k]];
      s += e * e;
    }
    return s / static_cast<double>(idx.size());
  };
  return bootstrap_interval(f, rows.size(), cfg.bootstrap_b, cfg.bootstrap_level, cfg.bootstrap_seed, stream);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

}  // namespace

EvaluationOutput evaluate_external(const EvaluationInputs& in, const EvaluationConfig& cfg) {
  if (!in.model || !in.ext || !in.ae_dev) throw DataError("evaluation: model, external cohort and autoencoder required");
  const Dataset& ext = *in.ext;
  if (!ext.has_outcome()) throw DataError("evaluation: external cohort has no outcome");
  EvaluationOutput out;

  const auto p_ext = predict_proba(*in.model, ext.x);
  out.ext_scores = score_autoencoder(*in.ae_dev, ext.x, "dev-autoencoder");
  const auto ext_rows = all_rows(ext.size());

  BootstrapSummary boot;
  boot.level = cfg.bootstrap_level;
  boot.b = cfg.bootstrap_b;
  boot.seed = cfg.bootstrap_seed;
  boot.intervals["external"] = brier_interval(p_ext, ext.y, ext_rows, cfg, kBootExternal);

  MetricResult external = brier(p_ext, ext.y);
  std::optional<double> external_auc = maybe_auc(p_ext, ext.y);

  // Decile curve (Q2); also attached to the external-deployment report.
  StratifiedResult deciles = decile_curve(p_ext, ext.y, out.ext_scores, cfg.n_bins);

  // External deployment (Q3): ID-like / OOD split.
  ThresholdSpec threshold = in.threshold ? *in.threshold : threshold_from_reference(*in.ae_dev, cfg.threshold_percentile);
  IdOodSplit split = split_id_ood(out.ext_scores, threshold);
  StratifiedResult strata = stratify_id_ood(p_ext, ext.y, split);
  {
    ValidationReport& r = out.ext_deploy;
    r.scenario = Scenario::ExtDeploy;
    r.center = in.center;
    r.config = in.config;
    r.external = external;
    r.external_auc = external_auc;
    r.decile_curve = deciles;
    r.threshold = threshold;
    r.idlike = strata.bins[0];
    r.ood = strata.bins[1];
    r.bootstrap = boot;
    if (!split.idlike.empty())
      r.bootstrap.intervals["idlike"] = brier_interval(p_ext, ext.y, split.idlike, cfg, kBootIdlike);
    if (!split.ood.empty()) r.bootstrap.intervals["ood"] = brier_interval(p_ext, ext.y, split.ood, cfg, kBootOod);
    r.max_recombination_error = std::max(strata.recombination_error, deciles.recombination_error);
    r.recombination_ok = r.max_recombination_error <= 1e-12;
  }

  if (in.ae_ext) {
    out.weights = matching_weights(*in.ae_dev, *in.ae_ext, ext.x, cfg.clip_quantile);
  }

  if (in.dev_test && in.ae_ext) {
    const Dataset& test = *in.dev_test;
    if (!test.has_outcome()) throw DataError("evaluation: internal test cohort has no outcome");
    const WeightVector& w = *out.weights;
    ValidationReport& r = out.dev_deploy;
    r.scenario = Scenario::DevDeploy;
    r.center = in.center;
    r.config = in.config;
    const auto p_test = predict_proba(*in.model, test.x);
    r.internal = brier(p_test, test.y);
    r.external = external;
    r.external_auc = external_auc;
    r.bootstrap = boot;
    r.bootstrap.intervals["internal"] = brier_interval(p_test, test.y, all_rows(test.size()), cfg, kBootInternal);

    MatchedSummary m;
    m.brier = weighted_brier(p_ext, ext.y, w.stabilized).value;
    m.ess = w.ess;
    m.mean_weight = mean(w.stabilized);
    m.mean_raw_weight = mean(w.raw);
    m.clip_quantile = w.clip_quantile;
    m.n = w.size();
    ResampleMetric f = [&](std::span<const std::size_t> idx) -> std::optional<double> {
      double s = 0.0, ws = 0.0;
      for (auto k : idx) {
        double e = p_ext[k] - ext.y[k];
        s += w.stabilized[k] * (e * e);
        ws += w.stabilized[k];
      }
      if (!(ws > 0.0)) return std::nullopt;
      return s / ws;
    };
    Interval mi = bootstrap_interval(f, ext.size(), cfg.bootstrap_b, cfg.bootstrap_level, cfg.bootstrap_seed,
                                     kBootMatched);
    r.bootstrap.intervals["matched"] = mi;
    m.consistent = mi.contains(r.internal->value);
    r.matched = m;
    r.decile_curve = deciles;
    r.drift = drift_diagnostic(in.dev_all ? *in.dev_all : test, ext, w);
    r.max_recombination_error = deciles.recombination_error;
    r.recombination_ok = r.max_recombination_error <= 1e-12;
    out.has_dev_deploy = true;
  }
  return out;
}

// --- Leave-one-center-out ---------------------------------------------------------

namespace {

// Per-fold stream ids: 100 * (fold + 1) + purpose.
enum : std::uint64_t { kFoldSplit = 1, kFoldAeDev = 2, kFoldAeExt = 3, kFoldBootstrap = 4 };

std::uint64_t fold_stream(std::size_t fold, std::uint64_t purpose) { return 100 * (fold + 1) + purpose; }

std::uint64_t derive_seed(std::uint64_t master, std::size_t fold, std::uint64_t purpose) {
  RngStream r(master, fold_stream(fold, purpose));
  return r.next_u64();
}

FoldResult run_fold(const Dataset& all, const std::vector<std::string>& selected, std::size_t fold,
                    const LocoConfig& cfg, const nlohmann::ordered_json& echo) {
  FoldResult res;
  res.center = selected[fold];
  res.fold_index = fold;
  std::vector<std::size_t> ext_rows, dev_rows;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& c = all.centers[i];
    if (c == res.center)
      ext_rows.push_back(i);
    else if (std::find(selected.begin(), selected.end(), c) != selected.end())
      dev_rows.push_back(i);
  }
  Dataset ext = all.subset(ext_rows);
  Dataset dev = all.subset(dev_rows);

  std::vector<std::size_t> order(dev.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream split(cfg.master_seed, fold_stream(fold, kFoldSplit));
  split.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(dev.size())));
  if (n_train == 0 || n_train >= dev.size()) throw DataError("loco: development cohort too small to split");
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  Dataset train = dev.subset(train_idx);
  Dataset test = dev.subset(test_idx);

  res.model = fit_logistic(train.x, train.y, cfg.glm);
  res.model.feature_names = all.feature_names;
  if (!res.model.converged) res.warnings.push_back("predictive model did not converge");

  // The autoencoder sees only the internal test split; the training split is
  // its holdout for the threshold reference.
  TrainConfig ae_cfg = cfg.ae;
  ae_cfg.seed = derive_seed(cfg.master_seed, fold, kFoldAeDev);
  AutoencoderModel ae_dev = train_autoencoder(test.x, ae_cfg);
  attach_reference(ae_dev, reconstruction_error(ae_dev, train.x), "dev-holdout");
  ae_cfg.seed = derive_seed(cfg.master_seed, fold, kFoldAeExt);
  AutoencoderModel ae_ext = train_autoencoder(ext.x, ae_cfg);
  for (const auto& w : ae_dev.meta.warnings) res.warnings.push_back("dev autoencoder: " + w);
  for (const auto& w : ae_ext.meta.warnings) res.warnings.push_back("ext autoencoder: " + w);

  SimilarityScores holdout{reconstruction_error(ae_dev, train.x), ScorerKind::Autoencoder, "dev-autoencoder"};

  EvaluationConfig ecfg = cfg.eval;
  ecfg.bootstrap_seed = derive_seed(cfg.master_seed, fold, kFoldBootstrap);
  EvaluationInputs in;
  in.model = &res.model;
  in.ext = &ext;
  in.ae_dev = &ae_dev;
  in.ae_ext = &ae_ext;
  in.dev_test = &test;
  in.dev_all = &dev;
  in.threshold = select_threshold(holdout, ecfg.threshold_percentile);
  in.center = res.center;
  in.config = echo;
  in.config["fold"] = {{"center", res.center},
                       {"index", fold},
                       {"n_dev_train", train.size()},
                       {"n_dev_test", test.size()},
                       {"n_external", ext.size()},
                       {"ae_dev_seed", derive_seed(cfg.master_seed, fold, kFoldAeDev)},
                       {"ae_ext_seed", ae_cfg.seed},
                       {"bootstrap_seed", ecfg.bootstrap_seed}};
  EvaluationOutput out = evaluate_external(in, ecfg);
  res.dev_deploy = std::move(out.dev_deploy);
  res.ext_deploy = std::move(out.ext_deploy);
  res.weights = std::move(*out.weights);
  res.ext_scores = std::move(out.ext_scores);
  for (const auto& w : res.weights.warnings) res.warnings.push_back(w);
  return res;
}

}  // namespace

nlohmann::ordered_json config_echo(const LocoConfig& cfg, const std::string& data_provenance) {
  nlohmann::ordered_json j;
  j["master_seed"] = cfg.master_seed;
  j["scorer"] = "autoencoder";
  j["threshold_percentile"] = cfg.eval.threshold_percentile;
  j["n_bins"] = cfg.eval.n_bins;
  j["clip_quantile"] = cfg.eval.clip_quantile;
  j["bootstrap_b"] = cfg.eval.bootstrap_b;
  j["bootstrap_level"] = cfg.eval.bootstrap_level;
  j["top_k"] = cfg.top_k;
  j["train_fraction"] = cfg.train_fraction;
  j["ae"] = {{"epochs", cfg.ae.epochs},
             {"batch_size", cfg.ae.batch_size},
             {"learning_rate", cfg.ae.learning_rate},
             {"hidden_size", cfg.ae.hidden_size},
             {"bottleneck_size", cfg.ae.bottleneck_size}};
  j["glm"] = {{"ridge", cfg.glm.ridge}, {"max_iter", cfg.glm.max_iter}, {"tol", cfg.glm.tol}};
  j["weights"] = kPseudoDensityConvention;
  j["sd_convention"] = "population";
  j["consistency_rule"] = kConsistencyRule;
  j["data"] = data_provenance;
  return j;
}

std::vector<FoldResult> run_loco(const Dataset& all, const LocoConfig& cfg) {
  if (!all.has_centers()) throw DataError("loco: dataset has no center column");
  if (!all.has_outcome()) throw DataError("loco: dataset has no outcome");
  std::map<std::string, std::size_t> sizes;
  for (const auto& c : all.centers) ++sizes[c];
  if (sizes.size() < 2) throw DataError("loco: need at least two centers");
  std::vector<std::pair<std::string, std::size_t>> ranked(sizes.begin(), sizes.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t k = std::min(cfg.top_k, ranked.size());
  if (k < 2) throw DataError("loco: top_k must select at least two centers");
  std::vector<std::string> selected;
  for (std::size_t i = 0; i < k; ++i) selected.push_back(ranked[i].first);
  std::sort(selected.begin(), selected.end());

  std::vector<std::string> size_warnings;
  for (const auto& c : selected)
    if (sizes[c] < cfg.min_center_size)
      size_warnings.push_back("center " + c + " has only " + std::to_string(sizes[c]) + " rows");

  const auto echo = config_echo(cfg, all.provenance);
  std::vector<FoldResult> results(selected.size());
  if (cfg.jobs <= 1) {
    for (std::size_t f = 0; f < selected.size(); ++f) results[f] = run_fold(all, selected, f, cfg, echo);
  } else {
    for (std::size_t start = 0; start < selected.size(); start += cfg.jobs) {
      std::vector<std::future<FoldResult>> running;
      for (std::size_t f = start; f < std::min(selected.size(), start + cfg.jobs); ++f)
        running.push_back(std::async(std::launch::async, run_fold, std::cref(all), std::cref(selected), f,
                                     std::cref(cfg), std::cref(echo)));
      for (std::size_t i = 0; i < running.size(); ++i) results[start + i] = running[i].get();
    }
  }
  for (auto& r : results)
    r.warnings.insert(r.warnings.begin(), size_warnings.begin(), size_warnings.end());
  return results;
}

}  // namespace shiftval
