#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tsl/spectrum.hpp"

namespace tsl {

/// Empty cells print as an empty CSV field and as null in JSON.
using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws InternalError when the row width differs from the header.
  void add(std::vector<Cell> row);
};

/// One line per eigenpair.
struct ReportRow {
  int n = 0;
  double lambda_n = 0.0;
  std::optional<double> s_n;
  std::string case_label;
  int multiplicity = 1;
  std::optional<int> target_n;  // nearest asymptotic target index
  std::optional<double> asymptotic_s;
  std::optional<double> abs_err;
  std::optional<double> n_times_err;
  EigenResiduals residuals;
  double norm_sq = 0.0;
};

std::vector<ReportRow> report_rows(const SpectrumReport& report);
Table spectrum_table(const std::vector<ReportRow>& rows);

/// Long format (n, side, x, u, du) over every mesh node of each eigenfunction.
Table eigenfunction_table(const std::vector<Eigenpair>& eigenpairs);

Table curve_table(const CharacteristicCurve& curve);

nlohmann::json fit_json(const AsymptoticFit& fit);

struct ReportBundle {
  std::string command;
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
};

/// %.15g, header row, comma separated, newline-terminated.
std::string format_csv(const Table& table);

/// {"command", "generated_at", "columns", "rows": [{column: value}], "summary", "warnings"}.
nlohmann::json table_json(const Table& table, const ReportBundle& bundle, const std::string& timestamp);

/// Writes <name>.csv and/or <name>.json for each table into dir (created if needed) and returns the
/// paths written. A table without rows adds a warning record to its JSON. Throws IoError.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                                               bool csv, bool json);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace tsl
