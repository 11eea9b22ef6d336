#include "tsl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tsl {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::ParseError, "expected a number, got '" + t + "'");
  }
  if (!std::isfinite(value)) throw Error(ErrorCode::ParseError, "non-finite number '" + t + "'");
  return value;
}

int parse_int(const std::string& text) {
  const std::string t = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::ParseError, "expected an integer, got '" + t + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item));
  return out;
}

std::array<double, 4> parse_row(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 4) throw Error(ErrorCode::ParseError, "a transmission row needs 4 entries, got " + std::to_string(v.size()));
  return {v[0], v[1], v[2], v[3]};
}

TableForm read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open potential table " + path.string());
  TableForm table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), '\t', ',');
    if (line.find(',') == std::string::npos) std::replace(line.begin(), line.end(), ' ', ',');
    const auto parts = split(line, ',');
    if (parts.size() != 2) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected 'x,q'");
    }
    try {
      const double x = parse_number(parts[0]);
      const double q = parse_number(parts[1]);
      table.x.push_back(x);
      table.values.push_back(q);
    } catch (const Error&) {
      if (table.x.empty()) continue;  // header row
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
  }
  return table;
}

PotentialForm parse_potential(const std::string& text, const std::filesystem::path& base_dir) {
  const auto colon = text.find(':');
  const std::string kind = lower(trim(text.substr(0, colon)));
  const std::string args = colon == std::string::npos ? std::string() : trim(text.substr(colon + 1));
  if (kind == "zero") {
    if (!args.empty()) throw Error(ErrorCode::ParseError, "'zero' takes no arguments");
    return ZeroForm{};
  }
  if (kind == "constant") return ConstantForm{parse_number(args)};
  if (kind == "cosine") {
    const auto v = parse_list(args);
    if (v.empty() || v.size() > 2) throw Error(ErrorCode::ParseError, "cosine takes 'amplitude[, frequency]'");
    return CosineForm{v[0], v.size() == 2 ? v[1] : 1.0};
  }
  if (kind == "polynomial") return PolynomialForm{parse_list(args)};
  if (kind == "table") {
    std::filesystem::path path = args;
    if (path.is_relative()) path = base_dir / path;
    return read_table(path);
  }
  throw Error(ErrorCode::ParseError, "unknown potential kind '" + kind + "' (zero, constant, cosine, polynomial, table)");
}

struct Entry {
  std::string value;
  int line = 0;
};

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "alpha", "beta",
      "transmission.row_a", "transmission.row_b", "transmission.columns",
      "potential", "potential.left", "potential.right",
      "potential.order", "potential.left.order", "potential.right.order",
      "solver.method", "solver.abs_tol", "solver.rel_tol", "solver.step", "solver.mesh_intervals",
      "solver.jump_convention", "solver.count", "solver.lambda_min", "solver.lambda_max", "solver.points",
      "solver.refine_tol", "solver.ds",
      "report.out_dir", "report.formats", "report.window_min", "report.window_max"};
  return keys;
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string t = lower(trim(text));
  t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
  if (t.empty()) throw Error(ErrorCode::ParseError, "empty angle");

  double denominator = 1.0;
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    denominator = parse_number(t.substr(slash + 1));
    if (denominator == 0.0) throw Error(ErrorCode::ParseError, "division by zero in angle '" + text + "'");
    t = t.substr(0, slash);
  }
  double numerator = 0.0;
  if (const auto p = t.find("pi"); p != std::string::npos) {
    if (p + 2 != t.size()) throw Error(ErrorCode::ParseError, "cannot read angle '" + text + "'");
    std::string coeff = t.substr(0, p);
    if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
    double c = 1.0;
    if (coeff == "-") c = -1.0;
    else if (coeff == "+") c = 1.0;
    else if (!coeff.empty()) c = parse_number(coeff);
    numerator = c * kPi;
  } else {
    numerator = parse_number(t);
  }
  return numerator / denominator;
}

SpectrumOptions RunConfig::spectrum_options() const {
  SpectrumOptions opts;
  opts.lambda_min = solver.lambda_min;
  opts.refine_tol = solver.refine_tol;
  opts.ds = solver.ds;
  return opts;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  std::vector<std::string> parse_errors, unknown, invalid;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) {
      parse_errors.push_back(where + "expected 'key = value'");
      continue;
    }
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) {
      unknown.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (entries.count(key)) {
      parse_errors.push_back(where + "duplicate key '" + key + "' (first set on line " +
                             std::to_string(entries[key].line) + ")");
      continue;
    }
    if (value.empty()) {
      parse_errors.push_back(where + "empty value for '" + key + "'");
      continue;
    }
    entries[key] = {value, line_no};
  }

  // Runs fn on the value of key if present, recording failures with the line number.
  auto with = [&](const std::string& key, auto&& fn) {
    const auto it = entries.find(key);
    if (it == entries.end()) return;
    try {
      fn(it->second.value);
    } catch (const Error& e) {
      const std::string msg = "line " + std::to_string(it->second.line) + ": " + key + ": " + e.what();
      (e.code() == ErrorCode::ParseError ? parse_errors : invalid).push_back(msg);
    }
  };
  auto require = [&](const std::string& key, const std::string& block) {
    if (!entries.count(key)) invalid.push_back("missing " + block + " key '" + key + "'");
  };

  ProblemSpec spec;
  require("alpha", "boundary");
  require("beta", "boundary");
  require("transmission.row_a", "transmission");
  require("transmission.row_b", "transmission");
  with("alpha", [&](const std::string& v) { spec.angles.alpha = parse_angle(v); });
  with("beta", [&](const std::string& v) { spec.angles.beta = parse_angle(v); });
  with("transmission.row_a", [&](const std::string& v) { spec.transmission.row_a = parse_row(v); });
  with("transmission.row_b", [&](const std::string& v) { spec.transmission.row_b = parse_row(v); });
  with("transmission.columns", [&](const std::string& v) {
    const auto c = lower(v);
    if (c == "value-first") spec.transmission.columns = ColumnConvention::ValueFirst;
    else if (c == "derivative-first") spec.transmission.columns = ColumnConvention::DerivativeFirst;
    else throw Error(ErrorCode::ParseError, "expected value-first or derivative-first");
  });

  PotentialForm left = ZeroForm{}, right = ZeroForm{};
  with("potential", [&](const std::string& v) { left = right = parse_potential(v, base_dir); });
  with("potential.left", [&](const std::string& v) { left = parse_potential(v, base_dir); });
  with("potential.right", [&](const std::string& v) { right = parse_potential(v, base_dir); });
  auto set_order = [](PotentialForm& form, const std::string& v) {
    auto* table = std::get_if<TableForm>(&form);
    if (!table) throw Error(ErrorCode::ValidationError, "order applies to table potentials only");
    table->order = parse_int(v);
  };
  with("potential.order", [&](const std::string& v) {
    set_order(left, v);
    set_order(right, v);
  });
  with("potential.left.order", [&](const std::string& v) { set_order(left, v); });
  with("potential.right.order", [&](const std::string& v) { set_order(right, v); });
  try {
    spec.potential.left = PiecePotential(left);
    spec.potential.right = PiecePotential(right);
  } catch (const Error& e) {
    invalid.push_back(std::string("potential: ") + e.what());
  }

  SolverSettings solver;
  auto& integ = solver.integrator;
  with("solver.method", [&](const std::string& v) {
    const auto m = lower(v);
    if (m == "dopri" || m == "adaptive") integ.method = IntegrationMethod::AdaptiveDopri;
    else if (m == "rk4" || m == "fixed") integ.method = IntegrationMethod::FixedRk4;
    else throw Error(ErrorCode::ParseError, "expected dopri or rk4");
  });
  with("solver.abs_tol", [&](const std::string& v) { integ.abs_tol = parse_number(v); });
  with("solver.rel_tol", [&](const std::string& v) { integ.rel_tol = parse_number(v); });
  with("solver.step", [&](const std::string& v) { integ.fixed_step = parse_number(v); });
  with("solver.mesh_intervals", [&](const std::string& v) { integ.mesh_intervals = parse_int(v); });
  with("solver.jump_convention", [&](const std::string& v) {
    const auto c = lower(v);
    if (c == "paper") solver.jump = JumpConvention::PaperLiteral;
    else if (c == "cramer") solver.jump = JumpConvention::CramerSolve;
    else throw Error(ErrorCode::ParseError, "expected paper or cramer");
  });
  with("solver.count", [&](const std::string& v) {
    solver.count = parse_int(v);
    if (solver.count < 1) throw Error(ErrorCode::ValidationError, "count must be >= 1");
  });
  with("solver.lambda_min", [&](const std::string& v) { solver.lambda_min = parse_number(v); });
  with("solver.lambda_max", [&](const std::string& v) { solver.lambda_max = parse_number(v); });
  with("solver.points", [&](const std::string& v) {
    solver.points = parse_int(v);
    if (solver.points < 16) throw Error(ErrorCode::ValidationError, "points must be >= 16");
  });
  with("solver.refine_tol", [&](const std::string& v) {
    solver.refine_tol = parse_number(v);
    if (!(solver.refine_tol > 0.0)) throw Error(ErrorCode::ValidationError, "refine_tol must be positive");
  });
  with("solver.ds", [&](const std::string& v) {
    solver.ds = parse_number(v);
    if (!(solver.ds > 0.0 && solver.ds <= 0.25)) throw Error(ErrorCode::ValidationError, "ds must lie in (0, 0.25]");
  });
  try {
    integ.validate();
  } catch (const Error& e) {
    invalid.push_back(std::string("solver: ") + e.what());
  }
  if (solver.lambda_min && solver.lambda_max && !(*solver.lambda_min < *solver.lambda_max)) {
    invalid.push_back("solver: lambda_min must be below lambda_max");
  }

  ReportSettings report;
  with("report.out_dir", [&](const std::string& v) { report.out_dir = v; });
  with("report.formats", [&](const std::string& v) {
    report.csv = report.json = false;
    for (const auto& f : split(lower(v), ',')) {
      if (f == "csv") report.csv = true;
      else if (f == "json") report.json = true;
      else throw Error(ErrorCode::ParseError, "unknown format '" + f + "' (csv, json)");
    }
  });
  with("report.window_min", [&](const std::string& v) { report.window.n_min = parse_int(v); });
  with("report.window_max", [&](const std::string& v) { report.window.n_max = parse_int(v); });
  if (report.window.n_min < 1 || report.window.n_max < report.window.n_min) {
    invalid.push_back("report: window must satisfy 1 <= window_min <= window_max");
  }

  std::optional<ValidatedProblem> problem;
  if (parse_errors.empty() && invalid.empty()) {
    auto result = validate_problem(spec);
    for (const auto& issue : result.issues) invalid.push_back("problem: " + issue.message);
    problem = std::move(result.problem);
  }

  auto join = [](const std::vector<std::string>& items) {
    std::string out;
    for (const auto& i : items) out += (out.empty() ? "" : "; ") + i;
    return out;
  };
  if (!parse_errors.empty()) {
    auto all = parse_errors;
    all.insert(all.end(), unknown.begin(), unknown.end());
    throw Error(ErrorCode::ParseError, join(all));
  }
  if (!unknown.empty()) throw Error(ErrorCode::UnknownKey, join(unknown));
  if (!invalid.empty() || !problem) throw Error(ErrorCode::ValidationError, join(invalid));

  return RunConfig{std::move(*problem), solver, report, {}};
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto cfg = parse_config(buffer.str(), path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace tsl
