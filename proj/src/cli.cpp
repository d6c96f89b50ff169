#include "shiftval/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "shiftval/autoenc.hpp"
#include "shiftval/dataset.hpp"
#include "shiftval/error.hpp"
#include "shiftval/glm.hpp"
#include "shiftval/report.hpp"
#include "shiftval/simscore.hpp"
#include "shiftval/synthgen.hpp"
#include "shiftval/valframe.hpp"

namespace shiftval {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads a JSON object as CLI11 config items for the subcommand being run.
// Top-level keys are that subcommand's option long names (underscores are
// accepted for dashes). A nested object keyed by a subcommand name on the
// active path is read as well, so one file can serve several commands; other
// sections and unknown keys are ignored.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<std::string> path;
    for (const CLI::App* app = root_;;) {
      auto subs = app->get_subcommands();
      if (subs.empty()) break;
      app = subs.front();
      path.push_back(app->get_name());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, 0, path, items);
    return items;
  }

 private:
  const CLI::App* root_;

  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& obj, std::size_t depth, const std::vector<std::string>& path,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (value.is_object()) {
        if (depth < path.size() && name == path[depth]) flatten(value, depth + 1, path, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = path;
      item.name = name;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs.push_back(scalar(value));
      items.push_back(std::move(item));
    }
  }
};

struct CsvOptions {
  std::string outcome = "y";
  std::string center = "center";
  std::vector<std::string> categorical;
  std::vector<std::string> ignore;
};

struct AeOptions {
  std::size_t epochs = 500;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::size_t hidden = 0;
  std::size_t bottleneck = 0;

  TrainConfig config(std::uint64_t seed) const {
    TrainConfig c;
    c.epochs = epochs;
    c.batch_size = batch_size;
    c.learning_rate = learning_rate;
    c.hidden_size = hidden;
    c.bottleneck_size = bottleneck;
    c.seed = seed;
    return c;
  }
};

struct EvalOptions {
  double threshold_percentile = 90.0;
  std::size_t n_bins = 10;
  double clip_quantile = 99.0;
  std::size_t bootstrap_b = 1000;
  double bootstrap_level = 0.95;

  EvaluationConfig config(std::uint64_t seed) const {
    if (!(threshold_percentile > 0.0 && threshold_percentile < 100.0))
      throw UsageError("--threshold-percentile must lie strictly between 0 and 100");
    EvaluationConfig c;
    c.threshold_percentile = threshold_percentile;
    c.n_bins = n_bins;
    c.clip_quantile = clip_quantile;
    c.bootstrap_b = bootstrap_b;
    c.bootstrap_level = bootstrap_level;
    c.bootstrap_seed = seed;
    return c;
  }
};

// SHIFTVAL_SEED applies only when neither the flag nor a config file set the
// seed. CLI11's own envname would rank the environment above config files.
void add_seed(CLI::App* app, std::uint64_t& seed) {
  auto* opt = app->add_option("--seed", seed, "Random seed (env SHIFTVAL_SEED)")->capture_default_str();
  app->callback([opt, &seed] {
    if (opt->count() > 0) return;
    const char* env = std::getenv("SHIFTVAL_SEED");
    if (env == nullptr || *env == '\0') return;
    if (!CLI::detail::lexical_cast(std::string(env), seed))
      throw CLI::ValidationError("SHIFTVAL_SEED", std::string("not an unsigned integer: ") + env);
  });
}

void add_csv_options(CLI::App* app, CsvOptions& o) {
  app->add_option("--outcome", o.outcome, "Outcome column")->capture_default_str();
  app->add_option("--center-column", o.center, "Center column (ignored when absent)")->capture_default_str();
  app->add_option("--categorical", o.categorical, "Categorical feature columns (one-hot encoded)");
  app->add_option("--ignore", o.ignore, "Columns to drop");
}

void add_ae_options(CLI::App* app, AeOptions& o) {
  app->add_option("--epochs", o.epochs, "Autoencoder training epochs")->capture_default_str();
  app->add_option("--batch-size", o.batch_size, "Autoencoder mini-batch size")->capture_default_str();
  app->add_option("--learning-rate", o.learning_rate, "Adam learning rate")->capture_default_str();
  app->add_option("--hidden", o.hidden, "Hidden layer width (0 = max(2, ceil(d/2)))")->capture_default_str();
  app->add_option("--bottleneck", o.bottleneck, "Bottleneck width (0 = max(1, ceil(d/4)))")->capture_default_str();
}

void add_eval_options(CLI::App* app, EvalOptions& o) {
  app->add_option("--threshold-percentile", o.threshold_percentile, "Percentile of development scores used as the OOD threshold")
      ->capture_default_str();
  app->add_option("--bins", o.n_bins, "Number of dissimilarity bins")->capture_default_str()->check(CLI::Range(2, 1000));
  app->add_option("--clip-quantile", o.clip_quantile, "Percentile at which raw weights are clipped")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));
  app->add_option("--bootstrap-b", o.bootstrap_b, "Bootstrap resamples")->capture_default_str()->check(CLI::Range(100, 1000000));
  app->add_option("--bootstrap-level", o.bootstrap_level, "Bootstrap interval level")
      ->capture_default_str()
      ->check(CLI::Range(0.5, 0.999999));
}

std::vector<std::string> header_columns(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  auto end = text.find_first_of("\r\n");
  std::string_view line = text.substr(0, end);
  std::vector<std::string> cols;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cols.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cols.push_back(cur);
  return cols;
}

bool has_column(const std::vector<std::string>& cols, const std::string& name) {
  return !name.empty() && std::find(cols.begin(), cols.end(), name) != cols.end();
}

struct Loaded {
  LoadedCsv csv;
  std::string hash;
};

// Development role: the column schema is learned from this file.
Loaded load_development(const std::string& path, const CsvOptions& o, bool outcome_required, bool keep_center) {
  std::string text = read_file(path);
  auto cols = header_columns(text);
  ColumnRoles roles;
  roles.outcome = o.outcome;
  roles.outcome_required = outcome_required;
  roles.categorical = o.categorical;
  roles.ignore = o.ignore;
  if (has_column(cols, o.center)) {
    if (keep_center)
      roles.center = o.center;
    else
      roles.ignore.push_back(o.center);
  } else if (keep_center) {
    throw DataError(path + ": center column '" + o.center + "' not found in header");
  }
  return {parse_csv(text, roles, nullptr, path), content_hash(text)};
}

// External role: preprocessing comes from a stored schema.
Loaded load_external(const std::string& path, const CsvOptions& o, const ColumnSchema& schema) {
  std::string text = read_file(path);
  ColumnRoles roles;
  roles.outcome = o.outcome;
  roles.outcome_required = false;
  return {parse_csv(text, roles, &schema, path), content_hash(text)};
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string layers_text(const AutoencoderModel& m) {
  std::string s;
  for (std::size_t i = 0; i < m.layer_sizes().size(); ++i) s += (i ? "-" : "") + std::to_string(m.layer_sizes()[i]);
  return s;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

struct ModelFile {
  LogisticModel model;
  std::optional<ColumnSchema> schema;
  std::string hash;
};

ModelFile load_model(const std::string& path) {
  std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  ModelFile f;
  f.model = logistic_from_json(j);
  if (j.contains("schema")) f.schema = schema_from_json(j.at("schema"));
  f.hash = content_hash(text);
  return f;
}

AutoencoderModel load_ae(const std::string& path, std::string* hash = nullptr) {
  if (hash) *hash = content_hash(read_file(path));
  return load_autoencoder(path);
}

// --- simulate ---------------------------------------------------------------

int cmd_gauss2d(std::uint64_t seed, std::size_t n, const AeOptions& ae, const std::string& out_dir, std::ostream& out) {
  Gauss2DConfig cfg;
  cfg.seed = seed;
  cfg.n = n;
  Gauss2DData data = gen_gauss2d(cfg);
  ensure_dir(out_dir);
  Dataset dev{data.dev, {}, {}, {"x1", "x2"}, ""};
  Dataset contrast{data.contrast, {}, {}, {"x1", "x2"}, ""};
  write_file_atomic(join_path(out_dir, "dev.csv"), dataset_to_csv(dev));
  write_file_atomic(join_path(out_dir, "contrast.csv"), dataset_to_csv(contrast));

  AutoencoderModel model = train_autoencoder(data.dev, ae.config(seed));
  auto ae_scores = score_autoencoder(model, data.grid);
  auto membership = score_membership(data.dev, data.contrast, data.grid);
  auto maha = score_mahalanobis(fit_mahalanobis(data.dev), data.grid);
  write_file_atomic(join_path(out_dir, "grid_scores.csv"),
                    grid_scores_csv(data.grid, ae_scores.values, membership.scores.values, maha.values));
  out << "wrote dev.csv, contrast.csv, grid_scores.csv to " << out_dir << " (membership AUC "
      << fixed(membership.membership_auc, 3) << ")\n";
  return kExitOk;
}

int cmd_centers(std::uint64_t seed, const std::string& preset_name, std::size_t n_per_center, const std::string& out_dir,
                std::ostream& out) {
  ScenarioPreset preset = find_preset(preset_name, seed);
  if (n_per_center > 0) preset.config.n_per_center = n_per_center;
  Dataset d = gen_multicenter(preset.config);
  ensure_dir(out_dir);
  write_file_atomic(join_path(out_dir, "cohort.csv"), dataset_to_csv(d));
  out << "wrote cohort.csv to " << out_dir << ": preset " << preset.name << ", " << preset.config.n_centers
      << " centers x " << preset.config.n_per_center << " rows";
  if (!preset.shifted_center.empty()) out << ", shifted center " << preset.shifted_center;
  out << "\n";
  return kExitOk;
}

// --- fit-ae / fit-model -------------------------------------------------------

struct FitAeArgs {
  std::string data, holdout, out;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 1;
  CsvOptions csv;
  AeOptions ae;
};

int cmd_fit_ae(const FitAeArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.holdout_fraction >= 0.0 && a.holdout_fraction < 1.0))
    throw UsageError("--holdout-fraction must lie in [0, 1)");
  Loaded dev = load_development(a.data, a.csv, false, false);
  const Dataset& all = dev.csv.data;
  Dataset train = all;
  std::optional<Dataset> holdout;
  std::string source = "dev-holdout";
  if (!a.holdout.empty()) {
    holdout = load_external(a.holdout, a.csv, dev.csv.schema).csv.data;
  } else if (a.holdout_fraction > 0.0) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    RngStream rng(a.seed, 11);
    rng.shuffle(order);
    const auto n_hold = static_cast<std::size_t>(std::llround(a.holdout_fraction * static_cast<double>(all.size())));
    if (n_hold == 0 || n_hold >= all.size()) throw DataError("too few rows for the requested holdout fraction");
    std::vector<std::size_t> hold_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_hold));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());
    std::sort(hold_idx.begin(), hold_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    holdout = all.subset(hold_idx);
    train = all.subset(train_idx);
  }
  AutoencoderModel model = train_autoencoder(train.x, a.ae.config(a.seed));
  model.schema = dev.csv.schema;
  if (holdout) attach_reference(model, reconstruction_error(model, holdout->x), source);
  for (const auto& w : model.meta.warnings) err << "warning: " << w << "\n";
  save_autoencoder(model, a.out);
  out << "wrote " << a.out << ": layers " << layers_text(model) << ", " << train.size() << " training rows, final loss "
      << fixed(model.meta.final_loss, 6) << ", median training error " << fixed(model.meta.median_training_error, 6);
  if (model.reference) out << ", reference from " << model.reference->n << " holdout rows";
  out << "\n";
  return kExitOk;
}

struct FitModelArgs {
  std::string data, out;
  CsvOptions csv;
  GlmSettings glm;
};

int cmd_fit_model(const FitModelArgs& a, std::ostream& out, std::ostream& err) {
  Loaded dev = load_development(a.data, a.csv, true, false);
  LogisticModel model = fit_logistic(dev.csv.data.x, dev.csv.data.y, a.glm);
  model.feature_names = dev.csv.data.feature_names;
  if (!model.converged) err << "warning: IRLS did not converge in " << model.iterations << " iterations\n";
  ordered_json j = to_json(model);
  j["schema"] = to_json(dev.csv.schema);
  write_file_atomic(a.out, j.dump(2) + "\n");
  out << "wrote " << a.out << ": " << model.coefficients.size() << " coefficients, " << model.iterations
      << " iterations, " << dev.csv.data.size() << " rows\n";
  return kExitOk;
}

// --- score ----------------------------------------------------------------------

struct ScoreArgs {
  std::string ae, data, dev, out, scorer = "autoencoder";
  bool negate = false;
  CsvOptions csv;
};

const ColumnSchema& require_schema(const AutoencoderModel& m, const std::string& path) {
  if (!m.schema) throw DataError(path + ": artifact carries no column schema");
  return *m.schema;
}

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  AutoencoderModel model = load_autoencoder(a.ae);
  const ColumnSchema& schema = require_schema(model, a.ae);
  Loaded ext = load_external(a.data, a.csv, schema);
  SimilarityScores scores;
  const ScorerKind kind = scorer_from_string(a.scorer);
  if (kind == ScorerKind::Autoencoder) {
    scores = score_autoencoder(model, ext.csv.data.x, "dev-autoencoder");
  } else {
    if (a.dev.empty()) throw UsageError("--dev is required for the " + a.scorer + " scorer");
    Dataset dev = load_external(a.dev, a.csv, schema).csv.data;
    if (kind == ScorerKind::Mahalanobis)
      scores = score_mahalanobis(fit_mahalanobis(dev.x), ext.csv.data.x);
    else
      scores = score_membership(dev.x, ext.csv.data.x, ext.csv.data.x).scores;
  }
  const std::string csv = scores_csv(scores, a.negate);
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file_atomic(a.out, csv);
    out << "wrote " << scores.size() << " scores to " << a.out << "\n";
  }
  return kExitOk;
}

// --- validate ---------------------------------------------------------------------

struct ValidateArgs {
  std::string scenario, model, ae, ext_ae, data, dev_test, dev, out, plots, center;
  std::uint64_t seed = 1;
  CsvOptions csv;
  AeOptions ae_opts;
  EvalOptions eval;
};

void write_plot_files(const std::string& dir, const std::vector<ValidationReport>& dev_reports,
                      const std::vector<ValidationReport>& ext_reports) {
  ensure_dir(dir);
  if (!dev_reports.empty()) {
    write_file_atomic(join_path(dir, "matched_bars.csv"), matched_bars_csv(dev_reports));
    write_file_atomic(join_path(dir, "decile_curve.csv"), decile_curve_csv(dev_reports));
  } else if (!ext_reports.empty()) {
    write_file_atomic(join_path(dir, "decile_curve.csv"), decile_curve_csv(ext_reports));
  }
  if (!ext_reports.empty()) write_file_atomic(join_path(dir, "strata_bars.csv"), strata_bars_csv(ext_reports));
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  const Scenario scenario = scenario_from_string(a.scenario);
  const EvaluationConfig ecfg = a.eval.config(a.seed);
  ModelFile model = load_model(a.model);
  std::string ae_hash;
  AutoencoderModel ae_dev = load_ae(a.ae, &ae_hash);
  const ColumnSchema& schema = model.schema ? *model.schema : require_schema(ae_dev, a.ae);
  if (ae_dev.schema && ae_dev.schema->feature_names() != schema.feature_names())
    throw DataError("model and autoencoder were fitted on different feature schemas");
  Loaded ext = load_external(a.data, a.csv, schema);

  ordered_json echo;
  echo["scenario"] = to_string(scenario);
  echo["seed"] = a.seed;
  echo["scorer"] = "autoencoder";
  echo["threshold_percentile"] = ecfg.threshold_percentile;
  echo["n_bins"] = ecfg.n_bins;
  echo["clip_quantile"] = ecfg.clip_quantile;
  echo["bootstrap_b"] = ecfg.bootstrap_b;
  echo["bootstrap_level"] = ecfg.bootstrap_level;
  echo["weights"] = kPseudoDensityConvention;
  echo["sd_convention"] = "population";
  echo["consistency_rule"] = kConsistencyRule;
  echo["external_data"] = ext.hash;
  echo["model"] = model.hash;
  echo["autoencoder"] = ae_hash;

  EvaluationInputs in;
  in.model = &model.model;
  in.ext = &ext.csv.data;
  in.ae_dev = &ae_dev;
  in.center = a.center;

  std::optional<AutoencoderModel> ae_ext;
  std::optional<Dataset> dev_test, dev_all;
  if (scenario == Scenario::DevDeploy) {
    if (a.dev_test.empty()) throw UsageError("--dev-test is required for the dev-deploy scenario");
    Loaded t = load_external(a.dev_test, a.csv, schema);
    dev_test = t.csv.data;
    echo["internal_data"] = t.hash;
    if (!a.dev.empty()) {
      Loaded d = load_external(a.dev, a.csv, schema);
      dev_all = d.csv.data;
      echo["development_data"] = d.hash;
    }
    if (!a.ext_ae.empty()) {
      std::string h;
      ae_ext = load_ae(a.ext_ae, &h);
      echo["external_autoencoder"] = h;
    } else {
      const std::uint64_t ae_seed = RngStream(a.seed, 3).next_u64();
      ae_ext = train_autoencoder(ext.csv.data.x, a.ae_opts.config(ae_seed));
      echo["external_autoencoder"] = {{"trained", true},
                                      {"seed", ae_seed},
                                      {"epochs", a.ae_opts.epochs},
                                      {"batch_size", a.ae_opts.batch_size},
                                      {"learning_rate", a.ae_opts.learning_rate}};
    }
    in.ae_ext = &*ae_ext;
    in.dev_test = &*dev_test;
    in.dev_all = dev_all ? &*dev_all : nullptr;
  }
  in.config = echo;

  EvaluationOutput res = evaluate_external(in, ecfg);
  if (res.weights)
    for (const auto& w : res.weights->warnings) err << "warning: " << w << "\n";
  const ValidationReport& report = scenario == Scenario::DevDeploy ? res.dev_deploy : res.ext_deploy;
  if (!report.recombination_ok)
    throw NumericError("stratified Brier scores do not recombine to the external Brier");
  write_report(report, a.out);
  if (!a.plots.empty()) {
    if (scenario == Scenario::DevDeploy)
      write_plot_files(a.plots, {report}, {});
    else
      write_plot_files(a.plots, {}, {report});
    write_file_atomic(join_path(a.plots, "scores.csv"), scores_csv(res.ext_scores));
    if (res.weights) write_file_atomic(join_path(a.plots, "weights.csv"), weights_csv(*res.weights));
  }
  out << "wrote " << a.out << ": " << to_string(scenario) << ", external brier " << fixed(report.external.value);
  if (report.internal) out << ", internal " << fixed(report.internal->value);
  if (report.matched) out << ", matched " << fixed(report.matched->brier) << " (ESS " << fixed(report.matched->ess, 1) << ")";
  if (report.idlike && report.ood)
    out << ", ID-like " << report.idlike->n << " / OOD " << report.ood->n;
  out << "\n";
  return kExitOk;
}

// --- loco --------------------------------------------------------------------------

struct LocoArgs {
  std::string data, out;
  std::uint64_t seed = 1;
  std::size_t top_k = 5, min_center_size = 50, jobs = 1;
  double train_fraction = 0.8;
  CsvOptions csv;
  AeOptions ae;
  EvalOptions eval;
  GlmSettings glm;
};

int cmd_loco(const LocoArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.train_fraction > 0.0 && a.train_fraction < 1.0)) throw UsageError("--train-fraction must lie in (0, 1)");
  Loaded data = load_development(a.data, a.csv, true, true);
  LocoConfig cfg;
  cfg.top_k = a.top_k;
  cfg.min_center_size = a.min_center_size;
  cfg.train_fraction = a.train_fraction;
  cfg.master_seed = a.seed;
  cfg.ae = a.ae.config(0);
  cfg.glm = a.glm;
  cfg.eval = a.eval.config(0);
  cfg.jobs = std::max<std::size_t>(1, a.jobs);
  data.csv.data.provenance = data.hash;
  std::vector<FoldResult> folds = run_loco(data.csv.data, cfg);

  ensure_dir(a.out);
  std::vector<ValidationReport> dev_reports, ext_reports;
  ordered_json summary;
  summary["version"] = kReportVersion;
  summary["config"] = config_echo(cfg, data.hash);
  summary["folds"] = ordered_json::array();
  for (const auto& f : folds) {
    if (!f.dev_deploy.recombination_ok || !f.ext_deploy.recombination_ok)
      throw NumericError("center " + f.center + ": stratified Brier scores do not recombine to the external Brier");
    const std::string dir = join_path(a.out, f.center);
    ensure_dir(dir);
    write_report(f.dev_deploy, join_path(dir, "dev-deploy.json"));
    write_report(f.ext_deploy, join_path(dir, "ext-deploy.json"));
    write_file_atomic(join_path(dir, "weights.csv"), weights_csv(f.weights));
    write_file_atomic(join_path(dir, "scores.csv"), scores_csv(f.ext_scores));
    ordered_json model = to_json(f.model);
    model["schema"] = to_json(data.csv.schema);
    write_file_atomic(join_path(dir, "model.json"), model.dump(2) + "\n");
    dev_reports.push_back(f.dev_deploy);
    ext_reports.push_back(f.ext_deploy);
    summary["folds"].push_back({{"center", f.center}, {"fold", f.fold_index}, {"warnings", f.warnings}});
    for (const auto& w : f.warnings) err << "warning: " << f.center << ": " << w << "\n";

    const auto& d = f.dev_deploy;
    out << f.center << ": internal " << fixed(d.internal->value) << "  external " << fixed(d.external.value)
        << "  matched " << fixed(d.matched->brier) << "  ESS " << fixed(d.matched->ess, 1) << "/" << d.matched->n
        << "  " << (d.matched->consistent ? "consistent" : "not consistent") << "  OOD "
        << fixed(100.0 * f.ext_deploy.ood->fraction, 1) << "%\n";
  }
  write_plot_files(a.out, dev_reports, ext_reports);
  write_file_atomic(join_path(a.out, "summary.json"), summary.dump(2) + "\n");
  out << "wrote " << folds.size() << " folds to " << a.out << "\n";
  return kExitOk;
}

// --- report ------------------------------------------------------------------------

int cmd_report(const std::vector<std::string>& inputs, const std::string& plots, std::ostream& out) {
  std::vector<ValidationReport> dev_reports, ext_reports;
  for (const auto& path : inputs) {
    ValidationReport r = read_report(path);
    out << path << ": " << to_string(r.scenario);
    if (!r.center.empty()) out << " center " << r.center;
    out << ", external brier " << fixed(r.external.value);
    if (r.external_auc) out << " (AUC " << fixed(*r.external_auc, 3) << ")";
    if (r.internal) out << ", internal " << fixed(r.internal->value);
    if (r.matched)
      out << ", matched " << fixed(r.matched->brier) << (r.matched->consistent ? " [consistent]" : " [not consistent]");
    if (r.idlike && r.ood) {
      out << ", ID-like " << fixed(100.0 * r.idlike->fraction, 1) << "%";
      if (r.idlike->brier) out << " brier " << fixed(*r.idlike->brier);
      out << ", OOD " << fixed(100.0 * r.ood->fraction, 1) << "%";
      if (r.ood->brier) out << " brier " << fixed(*r.ood->brier);
    }
    if (r.drift)
      out << ", outcome rate dev " << fixed(r.drift->dev_rate, 3) << " / ext " << fixed(r.drift->ext_rate, 3)
          << " / weighted " << fixed(r.drift->weighted_ext_rate, 3);
    out << ", recombination ok\n";
    (r.scenario == Scenario::DevDeploy ? dev_reports : ext_reports).push_back(std::move(r));
  }
  if (!plots.empty()) write_plot_files(plots, dev_reports, ext_reports);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dataset-shift-aware external validation of clinical prediction models", "shiftval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "shiftval 1.0");
  app.set_config("--config", "", "JSON file supplying option values; command-line flags take precedence");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::ignore);
  app.fallthrough();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic cohorts");
  simulate->require_subcommand(1);
  std::uint64_t g_seed = 7;
  std::size_t g_n = 1000;
  std::string g_out;
  AeOptions g_ae;
  auto* gauss = simulate->add_subcommand("gauss2d", "Two-dimensional Gaussian example with grid scores");
  add_seed(gauss, g_seed);
  gauss->add_option("--n", g_n, "Rows per sample")->capture_default_str()->check(CLI::Range(10, 10000000));
  gauss->add_option("--out", g_out, "Output directory")->required();
  add_ae_options(gauss, g_ae);

  std::uint64_t c_seed = 1;
  std::string c_preset = "null", c_out;
  std::size_t c_n = 0;
  auto* centers = simulate->add_subcommand("centers", "Multi-center cohort from a named preset");
  add_seed(centers, c_seed);
  centers->add_option("--preset", c_preset, "null | covariate-shift | concept-drift | prevalence-shift")
      ->capture_default_str();
  centers->add_option("--n-per-center", c_n, "Rows per center (0 = preset default)")->capture_default_str();
  centers->add_option("--out", c_out, "Output directory")->required();

  // fit-ae
  FitAeArgs fa;
  auto* fit_ae = app.add_subcommand("fit-ae", "Train the development autoencoder and save the artifact");
  add_seed(fit_ae, fa.seed);
  fit_ae->add_option("--data", fa.data, "Development CSV")->required();
  fit_ae->add_option("--out", fa.out, "Artifact path (JSON)")->required();
  fit_ae->add_option("--holdout", fa.holdout, "CSV of development rows not used for training; sets the score reference");
  fit_ae->add_option("--holdout-fraction", fa.holdout_fraction,
                     "Fraction of --data held out for the score reference when --holdout is absent")
      ->capture_default_str();
  add_csv_options(fit_ae, fa.csv);
  add_ae_options(fit_ae, fa.ae);

  // fit-model
  FitModelArgs fm;
  auto* fit_model = app.add_subcommand("fit-model", "Fit the logistic prediction model");
  fit_model->add_option("--data", fm.data, "Development training CSV")->required();
  fit_model->add_option("--out", fm.out, "Model path (JSON)")->required();
  fit_model->add_option("--ridge", fm.glm.ridge, "Ridge penalty on standardized coefficients")->capture_default_str();
  fit_model->add_option("--max-iter", fm.glm.max_iter, "IRLS iteration cap")->capture_default_str();
  fit_model->add_option("--tol", fm.glm.tol, "Gradient tolerance")->capture_default_str();
  add_csv_options(fit_model, fm.csv);

  // score
  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "Score a cohort against the development autoencoder artifact");
  score->add_option("--ae", sa.ae, "Development autoencoder artifact")->required();
  score->add_option("--data", sa.data, "CSV to score")->required();
  score->add_option("--out", sa.out, "Output CSV (stdout when omitted)");
  score->add_option("--scorer", sa.scorer, "autoencoder | mahalanobis | membership")
      ->capture_default_str()
      ->check(CLI::IsMember({"autoencoder", "mahalanobis", "membership"}));
  score->add_option("--dev", sa.dev, "Development CSV (mahalanobis and membership scorers only)");
  score->add_flag("--negate", sa.negate, "Write negated scores (similarity orientation)");
  add_csv_options(score, sa.csv);

  // validate
  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Evaluate a model on an external cohort");
  add_seed(validate, va.seed);
  validate->add_option("--scenario", va.scenario, "dev-deploy | ext-deploy")
      ->required()
      ->check(CLI::IsMember({"dev-deploy", "ext-deploy"}));
  validate->add_option("--model", va.model, "Model JSON from fit-model")->required();
  validate->add_option("--ae", va.ae, "Development autoencoder artifact")->required();
  validate->add_option("--data", va.data, "External CSV with outcomes")->required();
  validate->add_option("--ext-ae", va.ext_ae, "External autoencoder artifact (trained on --data when omitted)");
  validate->add_option("--dev-test", va.dev_test, "Internal validation CSV (dev-deploy)");
  validate->add_option("--dev", va.dev, "Full development CSV for the outcome-rate diagnostic (dev-deploy)");
  validate->add_option("--out", va.out, "Report path (JSON)")->required();
  validate->add_option("--plots", va.plots, "Directory for plot CSVs");
  validate->add_option("--center", va.center, "Label of the external site");
  add_csv_options(validate, va.csv);
  add_ae_options(validate, va.ae_opts);
  add_eval_options(validate, va.eval);

  // loco
  LocoArgs la;
  auto* loco = app.add_subcommand("loco", "Leave-one-center-out evaluation");
  add_seed(loco, la.seed);
  loco->add_option("--data", la.data, "Pooled multi-center CSV")->required();
  loco->add_option("--out", la.out, "Output directory")->required();
  loco->add_option("--top-k", la.top_k, "Number of largest centers to use")->capture_default_str()->check(CLI::Range(2, 1000000));
  loco->add_option("--min-center-size", la.min_center_size, "Warn below this many rows")->capture_default_str();
  loco->add_option("--train-fraction", la.train_fraction, "Development training share")->capture_default_str();
  loco->add_option("--jobs", la.jobs, "Folds run concurrently")->capture_default_str();
  loco->add_option("--ridge", la.glm.ridge, "Ridge penalty on standardized coefficients")->capture_default_str();
  loco->add_option("--max-iter", la.glm.max_iter, "IRLS iteration cap")->capture_default_str();
  loco->add_option("--tol", la.glm.tol, "Gradient tolerance")->capture_default_str();
  add_csv_options(loco, la.csv);
  add_ae_options(loco, la.ae);
  add_eval_options(loco, la.eval);

  // report
  std::vector<std::string> r_inputs;
  std::string r_plots;
  auto* report = app.add_subcommand("report", "Check saved reports and export plot CSVs");
  report->add_option("--in", r_inputs, "Report JSON files")->required();
  report->add_option("--plots", r_plots, "Directory for plot CSVs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << "run 'shiftval --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (gauss->parsed()) return cmd_gauss2d(g_seed, g_n, g_ae, g_out, out);
    if (centers->parsed()) return cmd_centers(c_seed, c_preset, c_n, c_out, out);
    if (fit_ae->parsed()) return cmd_fit_ae(fa, out, err);
    if (fit_model->parsed()) return cmd_fit_model(fm, out, err);
    if (score->parsed()) return cmd_score(sa, out);
    if (validate->parsed()) return cmd_validate(va, out, err);
    if (loco->parsed()) return cmd_loco(la, out, err);
    if (report->parsed()) return cmd_report(r_inputs, r_plots, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace shiftval
