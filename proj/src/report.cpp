#include "tsl/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace tsl {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string csv_field(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string quoted = "\"";
          for (char c : v) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
          return quoted + "\"";
        }
      },
      cell);
}

nlohmann::json json_value(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      cell);
}

template <class T>
Cell opt(const std::optional<T>& v) {
  if (!v) return std::monostate{};
  if constexpr (std::is_integral_v<T>) {
    return static_cast<long long>(*v);
  } else {
    return static_cast<double>(*v);
  }
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorCode::InternalError, "row width " + std::to_string(row.size()) + " does not match table " + name);
  }
  rows.push_back(std::move(row));
}

std::vector<ReportRow> report_rows(const SpectrumReport& report) {
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < report.eigenpairs.size(); ++i) {
    const auto& e = report.eigenpairs[i];
    ReportRow row;
    row.n = e.index;
    row.lambda_n = e.lambda;
    row.s_n = e.s;
    row.case_label = to_string(report.tag.variant);
    row.multiplicity = e.multiplicity;
    if (i < report.matches.size() && report.matches[i]) {
      const auto& m = *report.matches[i];
      row.target_n = m.n;
      row.asymptotic_s = m.target;
      row.abs_err = m.error;
      row.n_times_err = m.n * m.error;
    }
    row.residuals = e.residuals;
    row.norm_sq = e.norm_sq;
    rows.push_back(row);
  }
  return rows;
}

Table spectrum_table(const std::vector<ReportRow>& rows) {
  Table t{"spectrum",
          {"n", "lambda_n", "s_n", "case", "multiplicity", "target_n", "asymptotic_s", "abs_err", "n_times_err",
           "boundary_left", "boundary_right", "transmission_1", "transmission_2", "char_value", "norm_sq"},
          {}};
  for (const auto& r : rows) {
    t.add({static_cast<long long>(r.n), r.lambda_n, opt(r.s_n), r.case_label, static_cast<long long>(r.multiplicity),
           opt(r.target_n), opt(r.asymptotic_s), opt(r.abs_err), opt(r.n_times_err), r.residuals.boundary_left,
           r.residuals.boundary_right, r.residuals.transmission_1, r.residuals.transmission_2, r.residuals.char_value,
           r.norm_sq});
  }
  return t;
}

Table eigenfunction_table(const std::vector<Eigenpair>& eigenpairs) {
  Table t{"eigenfunctions", {"n", "side", "x", "u", "du"}, {}};
  for (const auto& e : eigenpairs) {
    for (const auto* piece : {&e.eigenfunction.left, &e.eigenfunction.right}) {
      const std::string side = piece->side() == Side::Left ? "left" : "right";
      for (const auto& st : piece->states()) t.add({static_cast<long long>(e.index), side, st.x, st.y, st.dy});
    }
  }
  return t;
}

Table curve_table(const CharacteristicCurve& curve) {
  Table t{"scan", {"lambda", "s", "w1", "w2", "w", "boundary_form", "residual"}, {}};
  for (const auto& c : curve.samples) {
    t.add({c.lambda, opt(c.s), c.w1, c.w2, c.w, c.w_boundary_form, c.consistency_residual});
  }
  return t;
}

nlohmann::json fit_json(const AsymptoticFit& fit) {
  nlohmann::json j;
  j["target"] = to_string(fit.family);
  j["window_min"] = fit.window.n_min;
  j["window_max"] = fit.window.n_max;
  j["points"] = fit.points;
  j["exact_points"] = fit.exact_points;
  j["exact_match"] = fit.exact_match;
  j["exponent"] = fit.exact_match ? nlohmann::json("inf") : nlohmann::json(fit.exponent);
  j["constant"] = fit.exact_match ? nlohmann::json(nullptr) : nlohmann::json(fit.constant);
  return j;
}

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json table_json(const Table& table, const ReportBundle& bundle, const std::string& timestamp) {
  nlohmann::json j;
  j["command"] = bundle.command;
  j["generated_at"] = timestamp;
  j["columns"] = table.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = json_value(row[i]);
    j["rows"].push_back(std::move(r));
  }
  j["summary"] = bundle.summary;
  j["warnings"] = bundle.warnings;
  if (table.rows.empty()) j["warnings"].push_back("table '" + table.name + "' is empty");
  return j;
}

std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle, const std::filesystem::path& dir,
                                               bool csv, bool json) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  };

  const std::string timestamp = utc_timestamp();
  std::vector<std::filesystem::path> written;
  for (const auto& table : bundle.tables) {
    if (csv) {
      written.push_back(dir / (table.name + ".csv"));
      write(written.back(), format_csv(table));
    }
    if (json) {
      written.push_back(dir / (table.name + ".json"));
      write(written.back(), table_json(table, bundle, timestamp).dump(2) + "\n");
    }
  }
  return written;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace tsl
