#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "shiftval/numstat.hpp"
#include "shiftval/simscore.hpp"
#include "shiftval/valframe.hpp"

namespace shiftval {

inline constexpr int kReportVersion = 1;

nlohmann::ordered_json report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const nlohmann::ordered_json& j);

// Serialized report text: two-space indented JSON with a trailing newline.
std::string report_text(const ValidationReport& report);
void write_report(const ValidationReport& report, const std::string& path);
// Reads, checks required keys and re-verifies the recombination identities.
ValidationReport read_report(const std::string& path);

// Names of the keys missing for the declared scenario; empty when complete.
std::vector<std::string> missing_report_keys(const nlohmann::ordered_json& j);

// Largest |sum fraction_j * brier_j - external brier| over the stratified
// sections present in the report, recomputed from the per-stratum fields.
double recombination_residual(const ValidationReport& report);

// Plot data.
std::string matched_bars_csv(const std::vector<ValidationReport>& reports);
std::string decile_curve_csv(const std::vector<ValidationReport>& reports);
std::string strata_bars_csv(const std::vector<ValidationReport>& reports);
std::string weights_csv(const WeightVector& w);
// instance_id,dissimilarity,scorer_kind; `negate` flips the sign for display
// as a similarity.
std::string scores_csv(const SimilarityScores& s, bool negate = false);
std::string grid_scores_csv(const Matrix& grid, std::span<const double> ae, std::span<const double> membership,
                            std::span<const double> mahalanobis);

}  // namespace shiftval
