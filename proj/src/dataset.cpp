#include "shiftval/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "shiftval/error.hpp"

namespace shiftval {

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x = x.select_rows(rows);
  out.feature_names = feature_names;
  out.provenance = provenance;
  if (has_outcome())
    for (auto r : rows) out.y.push_back(y[r]);
  if (has_centers())
    for (auto r : rows) out.centers.push_back(centers[r]);
  return out;
}

void Dataset::check() const {
  if (!x.all_finite()) throw DataError("dataset: non-finite feature values");
  if (has_outcome()) {
    if (y.size() != x.rows()) throw DataError("dataset: outcome length differs from row count");
    for (int v : y)
      if (v != 0 && v != 1) throw DataError("dataset: outcome must be 0 or 1");
  }
  if (has_centers() && centers.size() != x.rows())
    throw DataError("dataset: center length differs from row count");
  if (feature_names.size() != x.cols()) throw DataError("dataset: feature name count differs from columns");
  std::set<std::string> seen(feature_names.begin(), feature_names.end());
  if (seen.size() != feature_names.size()) throw DataError("dataset: duplicate feature names");
}

std::vector<std::string> ColumnSchema::feature_names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (!c.categorical) {
      out.push_back(c.name);
      continue;
    }
    for (std::size_t l = 1; l < c.levels.size(); ++l) out.push_back(c.name + "=" + c.levels[l]);
  }
  return out;
}

nlohmann::ordered_json to_json(const ColumnSchema& schema) {
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : schema.columns) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["categorical"] = c.categorical;
    if (c.categorical) {
      j["levels"] = c.levels;
      j["fill_level"] = c.fill_level;
    } else {
      j["fill_value"] = c.fill_value;
    }
    cols.push_back(std::move(j));
  }
  return {{"columns", cols}};
}

ColumnSchema schema_from_json(const nlohmann::json& j) {
  ColumnSchema s;
  try {
    for (const auto& c : j.at("columns")) {
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.categorical = c.at("categorical").get<bool>();
      if (spec.categorical) {
        spec.levels = c.at("levels").get<std::vector<std::string>>();
        spec.fill_level = c.at("fill_level").get<std::string>();
      } else {
        spec.fill_value = c.at("fill_value").get<double>();
      }
      s.columns.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  return s;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA"; }

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string where(std::size_t line, const std::string& column) {
  return "row " + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

LoadedCsv parse_csv(std::string_view text, const ColumnRoles& roles, const ColumnSchema* reference,
                    const std::string& provenance) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  {
    std::size_t pos = 0;
    bool first = true;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      pos = end + 1;
      if (line.empty()) continue;
      auto cells = split_csv_line(line);
      for (auto& c : cells) c = trim(std::move(c));
      if (first) {
        if (!cells.empty() && cells[0].rfind("\xEF\xBB\xBF", 0) == 0) cells[0].erase(0, 3);
        header = std::move(cells);
        first = false;
      } else {
        rows.push_back(std::move(cells));
      }
    }
  }
  if (header.empty()) throw DataError(provenance + ": missing header row");
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!index.emplace(header[c], c).second) throw DataError(provenance + ": duplicate column '" + header[c] + "'");
  }
  auto require = [&](const std::string& name, const char* role) {
    if (!index.count(name))
      throw DataError(provenance + ": " + role + " column '" + name + "' not found in header");
  };
  bool has_outcome = !roles.outcome.empty() && index.count(roles.outcome);
  if (roles.outcome_required && !roles.outcome.empty()) require(roles.outcome, "outcome");
  if (!roles.center.empty()) require(roles.center, "center");
  for (const auto& c : roles.categorical) require(c, "categorical");
  for (const auto& c : roles.ignore) require(c, "ignored");

  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != header.size())
      throw DataError(provenance + ": row " + std::to_string(r + 2) + " has " + std::to_string(rows[r].size()) +
                      " cells, header has " + std::to_string(header.size()));

  std::set<std::string> reserved(roles.ignore.begin(), roles.ignore.end());
  if (!roles.outcome.empty()) reserved.insert(roles.outcome);
  if (!roles.center.empty()) reserved.insert(roles.center);
  std::set<std::string> categorical(roles.categorical.begin(), roles.categorical.end());

  LoadedCsv out;
  out.data.provenance = provenance;
  const std::size_t n = rows.size();
  if (n == 0) throw DataError(provenance + ": no data rows");

  // Column schema: from the reference when supplied, otherwise learned here.
  if (reference) {
    out.schema = *reference;
    for (const auto& spec : out.schema.columns) require(spec.name, "feature");
  } else {
    for (const auto& name : header) {
      if (reserved.count(name)) continue;
      ColumnSpec spec;
      spec.name = name;
      spec.categorical = categorical.count(name) > 0;
      std::size_t c = index[name];
      std::size_t missing = 0;
      if (spec.categorical) {
        std::map<std::string, std::size_t> counts;
        for (const auto& row : rows) {
          if (is_missing(row[c])) {
            ++missing;
            continue;
          }
          ++counts[row[c]];
        }
        for (const auto& [level, cnt] : counts) spec.levels.push_back(level);
        std::size_t best = 0;
        for (const auto& [level, cnt] : counts)
          if (cnt > best) {
            best = cnt;
            spec.fill_level = level;
          }
      } else {
        double sum = 0.0;
        std::size_t present = 0;
        for (std::size_t r = 0; r < n; ++r) {
          if (is_missing(rows[r][c])) {
            ++missing;
            continue;
          }
          auto v = parse_number(rows[r][c]);
          if (!v) throw DataError(provenance + ": non-numeric value '" + rows[r][c] + "' at " + where(r + 2, name));
          sum += *v;
          ++present;
        }
        if (present > 0) spec.fill_value = sum / static_cast<double>(present);
      }
      if (2 * missing > n) throw DataError(provenance + ": column '" + name + "' has more than 50% missing values");
      out.schema.columns.push_back(std::move(spec));
    }
  }

  out.data.feature_names = out.schema.feature_names();
  out.data.x = Matrix(n, out.data.feature_names.size());
  std::size_t col_out = 0;
  for (const auto& spec : out.schema.columns) {
    std::size_t c = index.at(spec.name);
    std::size_t missing = 0;
    for (const auto& row : rows) missing += is_missing(row[c]) ? 1 : 0;
    if (2 * missing > n) throw DataError(provenance + ": column '" + spec.name + "' has more than 50% missing values");
    out.imputed_cells += missing;
    if (!spec.categorical) {
      for (std::size_t r = 0; r < n; ++r) {
        const auto& cell = rows[r][c];
        if (is_missing(cell)) {
          out.data.x(r, col_out) = spec.fill_value;
          continue;
        }
        auto v = parse_number(cell);
        if (!v) throw DataError(provenance + ": non-numeric value '" + cell + "' at " + where(r + 2, spec.name));
        out.data.x(r, col_out) = *v;
      }
      ++col_out;
      continue;
    }
    for (std::size_t r = 0; r < n; ++r) {
      const std::string& level = is_missing(rows[r][c]) ? spec.fill_level : rows[r][c];
      auto it = std::find(spec.levels.begin(), spec.levels.end(), level);
      if (it == spec.levels.end())
        throw DataError(provenance + ": unknown level '" + level + "' at " + where(r + 2, spec.name));
      std::size_t l = static_cast<std::size_t>(it - spec.levels.begin());
      if (l > 0) out.data.x(r, col_out + l - 1) = 1.0;
    }
    col_out += spec.levels.empty() ? 0 : spec.levels.size() - 1;
  }

  if (has_outcome) {
    std::size_t c = index[roles.outcome];
    out.data.y.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
      auto v = parse_number(rows[r][c]);
      if (!v || (*v != 0.0 && *v != 1.0))
        throw DataError(provenance + ": non-binary outcome '" + rows[r][c] + "' at " + where(r + 2, roles.outcome));
      out.data.y[r] = *v == 1.0 ? 1 : 0;
    }
  }
  if (!roles.center.empty()) {
    std::size_t c = index[roles.center];
    out.data.centers.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (is_missing(rows[r][c])) throw DataError(provenance + ": missing center at " + where(r + 2, roles.center));
      out.data.centers.push_back(rows[r][c]);
    }
  }
  out.data.check();
  return out;
}

LoadedCsv load_csv(const std::string& path, const ColumnRoles& roles, const ColumnSchema* reference) {
  std::string text = read_file(path);
  return parse_csv(text, roles, reference, path);
}

std::string dataset_to_csv(const Dataset& d, const std::string& outcome_name, const std::string& center_name) {
  std::ostringstream os;
  for (std::size_t c = 0; c < d.feature_names.size(); ++c) os << (c ? "," : "") << d.feature_names[c];
  if (d.has_outcome()) os << ',' << outcome_name;
  if (d.has_centers()) os << ',' << center_name;
  os << '\n';
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (std::size_t c = 0; c < d.x.cols(); ++c) os << (c ? "," : "") << format_double(d.x(r, c));
    if (d.has_outcome()) os << ',' << d.y[r];
    if (d.has_centers()) os << ',' << d.centers[r];
    os << '\n';
  }
  return os.str();
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for '" + path + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw DataError("cannot rename into '" + path + "': " + ec.message());
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace shiftval
