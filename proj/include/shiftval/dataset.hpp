#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftval/numstat.hpp"

namespace shiftval {

// Tabular cohort: features, optional binary outcome, optional center labels.
struct Dataset {
  Matrix x;
  std::vector<int> y;                // empty when the outcome is absent
  std::vector<std::string> centers;  // empty when no center column
  std::vector<std::string> feature_names;
  std::string provenance;

  std::size_t size() const { return x.rows(); }
  bool has_outcome() const { return !y.empty(); }
  bool has_centers() const { return !centers.empty(); }

  Dataset subset(std::span<const std::size_t> rows) const;
  // Validates the invariants: finite features, binary outcome, unique names.
  void check() const;
};

// Declared roles for CSV columns. Columns not named as outcome, center or
// ignored are features; features listed in `categorical` are one-hot encoded.
struct ColumnRoles {
  std::string outcome = "y";
  std::string center;
  std::vector<std::string> categorical;
  std::vector<std::string> ignore;
  bool outcome_required = true;
};

// Per-source-column preprocessing learned on the development-training file and
// reused verbatim for external files.
struct ColumnSpec {
  std::string name;
  bool categorical = false;
  std::vector<std::string> levels;  // categorical only; levels[0] is dropped
  double fill_value = 0.0;          // numeric mean for missing cells
  std::string fill_level;           // categorical mode for missing cells
};

struct ColumnSchema {
  std::vector<ColumnSpec> columns;
  std::vector<std::string> feature_names() const;
};

nlohmann::ordered_json to_json(const ColumnSchema& schema);
ColumnSchema schema_from_json(const nlohmann::json& j);

struct LoadedCsv {
  Dataset data;
  ColumnSchema schema;
  std::size_t imputed_cells = 0;
};

// Parses a UTF-8 CSV with a header row. Missing cells (empty or "NA") are
// imputed by column mean / mode. Without `reference` (development-training
// role) the statistics and categorical levels come from this file; with it
// (external role) they come from the reference schema.
LoadedCsv load_csv(const std::string& path, const ColumnRoles& roles,
                   const ColumnSchema* reference = nullptr);
LoadedCsv parse_csv(std::string_view text, const ColumnRoles& roles, const ColumnSchema* reference,
                    const std::string& provenance);

// Writes features, then `y` and `center` when present.
std::string dataset_to_csv(const Dataset& d, const std::string& outcome_name = "y",
                           const std::string& center_name = "center");

// 64-bit FNV-1a content hash, hex encoded.
std::string content_hash(std::string_view bytes);

std::string read_file(const std::string& path);
// Whole-file atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, std::string_view contents);

// Shortest representation that round-trips exactly.
std::string format_double(double v);

}  // namespace shiftval
