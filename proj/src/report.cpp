#include "shiftval/report.hpp"

#include <cmath>
#include <sstream>

#include "shiftval/dataset.hpp"
#include "shiftval/error.hpp"

namespace shiftval {

using json = nlohmann::ordered_json;
using nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

ordered_json stratum_json(const Stratum& s) {
  return {{"label", s.label}, {"n", s.n}, {"fraction", s.fraction}, {"brier", opt(s.brier)}, {"auc", opt(s.auc)}};
}

Stratum stratum_from(const json& j) {
  Stratum s;
  s.label = j.value("label", "");
  s.n = j.at("n").get<std::size_t>();
  s.fraction = j.at("fraction").get<double>();
  s.brier = opt_from(j, "brier");
  s.auc = opt_from(j, "auc");
  return s;
}

double weighted_sum(const std::vector<Stratum>& bins) {
  double acc = 0.0;
  for (const auto& b : bins)
    if (b.brier) acc += b.fraction * *b.brier;
  return acc;
}

std::string csv_num(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

}  // namespace

ordered_json report_to_json(const ValidationReport& r) {
  ordered_json j;
  j["version"] = kReportVersion;
  j["scenario"] = to_string(r.scenario);
  j["center"] = r.center;
  j["config"] = r.config;
  if (r.internal) j["internal"] = {{"brier", r.internal->value}, {"n", r.internal->n}};
  j["external"] = {{"brier", r.external.value}, {"n", r.external.n}, {"auc", opt(r.external_auc)}};
  if (r.matched) {
    const auto& m = *r.matched;
    j["matched"] = {{"brier", m.brier},
                    {"ess", m.ess},
                    {"mean_weight", m.mean_weight},
                    {"mean_raw_weight", m.mean_raw_weight},
                    {"clip_quantile", m.clip_quantile},
                    {"n", m.n},
                    {"consistent", m.consistent},
                    {"rule", kConsistencyRule}};
  }
  if (r.decile_curve) {
    ordered_json arr = ordered_json::array();
    for (const auto& b : r.decile_curve->bins) arr.push_back(stratum_json(b));
    j["decile_curve"] = arr;
  }
  if (r.threshold) {
    j["threshold"] = {{"percentile", r.threshold->percentile},
                      {"value", r.threshold->value},
                      {"source", r.threshold->source},
                      {"scorer", to_string(r.threshold->kind)}};
  }
  if (r.idlike) j["idlike"] = stratum_json(*r.idlike);
  if (r.ood) j["ood"] = stratum_json(*r.ood);
  if (r.drift)
    j["drift"] = {{"dev_rate", r.drift->dev_rate},
                  {"ext_rate", r.drift->ext_rate},
                  {"weighted_ext_rate", r.drift->weighted_ext_rate}};
  ordered_json intervals = ordered_json::object();
  for (const auto& [name, iv] : r.bootstrap.intervals) intervals[name] = {{"lo", iv.lo}, {"hi", iv.hi}};
  j["bootstrap"] = {{"level", r.bootstrap.level},
                    {"B", r.bootstrap.b},
                    {"seed", r.bootstrap.seed},
                    {"method", "percentile"},
                    {"intervals", intervals}};
  j["checks"] = {{"recombination_ok", r.recombination_ok},
                 {"max_recombination_error", r.max_recombination_error},
                 {"tolerance", 1e-12}};
  return j;
}

std::vector<std::string> missing_report_keys(const json& j) {
  std::vector<std::string> missing;
  if (!j.is_object()) return {"<root object>"};
  std::vector<std::string> required{"version", "scenario", "config", "external", "bootstrap", "checks"};
  if (j.contains("scenario") && j.at("scenario").is_string()) {
    const auto s = j.at("scenario").get<std::string>();
    if (s == "dev-deploy") required.insert(required.end(), {"internal", "matched", "decile_curve", "drift"});
    if (s == "ext-deploy") required.insert(required.end(), {"threshold", "idlike", "ood"});
  }
  for (const auto& k : required)
    if (!j.contains(k)) missing.push_back(k);
  return missing;
}

ValidationReport report_from_json(const json& j) {
  auto missing = missing_report_keys(j);
  if (!missing.empty()) {
    std::string msg = "report is missing required keys:";
    for (const auto& k : missing) msg += " " + k;
    throw DataError(msg);
  }
  if (j.at("version").get<int>() != kReportVersion)
    throw DataError("unsupported report version " + j.at("version").dump());
  ValidationReport r;
  try {
    r.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    r.center = j.value("center", "");
    r.config = j.at("config");
    if (j.contains("internal")) {
      r.internal = MetricResult{"brier", j["internal"].at("brier").get<double>(),
                                j["internal"].at("n").get<std::size_t>(), false};
    }
    r.external = MetricResult{"brier", j["external"].at("brier").get<double>(), j["external"].at("n").get<std::size_t>(),
                              false};
    r.external_auc = opt_from(j["external"], "auc");
    if (j.contains("matched")) {
      const auto& m = j["matched"];
      MatchedSummary s;
      s.brier = m.at("brier").get<double>();
      s.ess = m.at("ess").get<double>();
      s.mean_weight = m.at("mean_weight").get<double>();
      s.mean_raw_weight = m.value("mean_raw_weight", 0.0);
      s.clip_quantile = m.at("clip_quantile").get<double>();
      s.n = m.value("n", std::size_t{0});
      s.consistent = m.value("consistent", false);
      r.matched = s;
    }
    if (j.contains("decile_curve")) {
      StratifiedResult d;
      for (const auto& b : j["decile_curve"]) d.bins.push_back(stratum_from(b));
      d.overall_brier = r.external.value;
      d.recombination_error = std::abs(weighted_sum(d.bins) - d.overall_brier);
      r.decile_curve = d;
    }
    if (j.contains("threshold")) {
      const auto& t = j["threshold"];
      ThresholdSpec spec;
      spec.percentile = t.at("percentile").get<double>();
      spec.value = t.at("value").get<double>();
      spec.source = t.value("source", "dev-holdout");
      spec.kind = scorer_from_string(t.value("scorer", "autoencoder"));
      r.threshold = spec;
    }
    if (j.contains("idlike")) r.idlike = stratum_from(j["idlike"]);
    if (j.contains("ood")) r.ood = stratum_from(j["ood"]);
    if (j.contains("drift")) {
      const auto& d = j["drift"];
      r.drift = DriftDiagnostic{d.at("dev_rate").get<double>(), d.at("ext_rate").get<double>(),
                                d.at("weighted_ext_rate").get<double>()};
    }
    const auto& b = j["bootstrap"];
    r.bootstrap.level = b.at("level").get<double>();
    r.bootstrap.b = b.value("B", std::size_t{0});
    r.bootstrap.seed = b.value("seed", std::uint64_t{0});
    if (b.contains("intervals"))
      for (const auto& [name, iv] : b["intervals"].items())
        r.bootstrap.intervals[name] = Interval{iv.at("lo").get<double>(), iv.at("hi").get<double>()};
    r.recombination_ok = j["checks"].at("recombination_ok").get<bool>();
    r.max_recombination_error = j["checks"].value("max_recombination_error", 0.0);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return r;
}

double recombination_residual(const ValidationReport& r) {
  double worst = 0.0;
  if (r.decile_curve) worst = std::max(worst, std::abs(weighted_sum(r.decile_curve->bins) - r.external.value));
  if (r.idlike && r.ood) {
    double acc = 0.0;
    for (const Stratum* s : {&*r.idlike, &*r.ood})
      if (s->brier) acc += s->fraction * *s->brier;
    worst = std::max(worst, std::abs(acc - r.external.value));
  }
  return worst;
}

std::string report_text(const ValidationReport& report) { return report_to_json(report).dump(2) + "\n"; }

void write_report(const ValidationReport& report, const std::string& path) {
  write_file_atomic(path, report_text(report));
}

ValidationReport read_report(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  ValidationReport r = report_from_json(j);
  const double residual = recombination_residual(r);
  if (!(residual <= 1e-12))
    throw NumericError(path + ": stratified Brier scores do not recombine to the external Brier (residual " +
                       format_double(residual) + ")");
  return r;
}

std::string matched_bars_csv(const std::vector<ValidationReport>& reports) {
  std::ostringstream os;
  os << "center,internal_brier,external_brier,matched_brier,ess,n,consistent\n";
  for (const auto& r : reports) {
    os << r.center << ',' << csv_num(r.internal ? std::optional(r.internal->value) : std::nullopt) << ','
       << format_double(r.external.value) << ','
       << csv_num(r.matched ? std::optional(r.matched->brier) : std::nullopt) << ','
       << csv_num(r.matched ? std::optional(r.matched->ess) : std::nullopt) << ',' << r.external.n << ','
       << (r.matched ? (r.matched->consistent ? "true" : "false") : "NA") << '\n';
  }
  return os.str();
}

std::string decile_curve_csv(const std::vector<ValidationReport>& reports) {
  std::ostringstream os;
  os << "center,bin,label,n,fraction,brier,auc\n";
  for (const auto& r : reports) {
    if (!r.decile_curve) continue;
    for (std::size_t i = 0; i < r.decile_curve->bins.size(); ++i) {
      const auto& b = r.decile_curve->bins[i];
      os << r.center << ',' << i << ',' << b.label << ',' << b.n << ',' << format_double(b.fraction) << ','
         << csv_num(b.brier) << ',' << csv_num(b.auc) << '\n';
    }
  }
  return os.str();
}

std::string strata_bars_csv(const std::vector<ValidationReport>& reports) {
  std::ostringstream os;
  os << "center,stratum,n,fraction,brier,auc\n";
  for (const auto& r : reports) {
    os << r.center << ",all," << r.external.n << ",1," << format_double(r.external.value) << ','
       << csv_num(r.external_auc) << '\n';
    for (const auto* s : {&r.idlike, &r.ood}) {
      if (!*s) continue;
      const Stratum& st = **s;
      os << r.center << ',' << st.label << ',' << st.n << ',' << format_double(st.fraction) << ','
         << csv_num(st.brier) << ',' << csv_num(st.auc) << '\n';
    }
  }
  return os.str();
}

std::string weights_csv(const WeightVector& w) {
  std::ostringstream os;
  os << "instance_id,raw_weight,stabilized_weight\n";
  for (std::size_t i = 0; i < w.size(); ++i)
    os << i << ',' << format_double(w.raw[i]) << ',' << format_double(w.stabilized[i]) << '\n';
  return os.str();
}

std::string scores_csv(const SimilarityScores& s, bool negate) {
  std::ostringstream os;
  os << "instance_id," << (negate ? "similarity" : "dissimilarity") << ",scorer_kind\n";
  const std::string kind = to_string(s.kind);
  for (std::size_t i = 0; i < s.values.size(); ++i)
    os << i << ',' << format_double(negate ? -s.values[i] : s.values[i]) << ',' << kind << '\n';
  return os.str();
}

std::string grid_scores_csv(const Matrix& grid, std::span<const double> ae, std::span<const double> membership,
                            std::span<const double> mahalanobis) {
  if (grid.cols() != 2 || ae.size() != grid.rows() || membership.size() != grid.rows() ||
      mahalanobis.size() != grid.rows())
    throw DataError("grid scores: length mismatch");
  std::ostringstream os;
  os << "x1,x2,ae_dissimilarity,membership_dissimilarity,mahalanobis\n";
  for (std::size_t i = 0; i < grid.rows(); ++i)
    os << format_double(grid(i, 0)) << ',' << format_double(grid(i, 1)) << ',' << format_double(ae[i]) << ','
       << format_double(membership[i]) << ',' << format_double(mahalanobis[i]) << '\n';
  return os.str();
}

}  // namespace shiftval
