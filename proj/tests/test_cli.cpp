#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "support.hpp"
#include "tsl/commands.hpp"

using namespace tsl;
using tsl::test::error_code_of;
namespace fs = std::filesystem;

namespace {

const std::string kMinimal = R"(# canonical oracle
alpha = 0
beta = 0
transmission.row_a = 1, 0, -1, 0
transmission.row_b = 0, 1, 0, -1
potential = zero
solver.count = 10
)";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tsl_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

std::string config_dir() {
  const char* dir = std::getenv("TSL_CONFIG_DIR");
  return dir ? dir : "configs";
}

}  // namespace

TEST_CASE("minimal config parses") {
  const auto cfg = parse_config(kMinimal);
  CHECK(cfg.problem.case_tag().variant == ProblemCase::IV);
  CHECK(cfg.solver.count == 10);
  CHECK(cfg.solver.jump == JumpConvention::CramerSolve);
  CHECK(cfg.report.csv);
  CHECK(cfg.report.json);
  CHECK(cfg.problem.rho().r12 == 1.0);
}

TEST_CASE("config keys are read") {
  const auto cfg = parse_config(R"(
alpha = 3*pi/4
beta = -pi/2   # trailing comment
transmission.row_a = 1, 1, -1, 0
transmission.row_b = 0, 1, 0, -1
transmission.columns = derivative-first
potential.left = cosine: 2, 3
potential.right = polynomial: 1, 0.5
solver.method = rk4
solver.step = 0.002
solver.abs_tol = 1e-11
solver.rel_tol = 1e-11
solver.mesh_intervals = 256
solver.jump_convention = paper
solver.count = 7
solver.lambda_min = -20
solver.lambda_max = 50
solver.points = 99
solver.refine_tol = 1e-12
solver.ds = 0.03125
report.out_dir = somewhere
report.formats = json
report.window_min = 5
report.window_max = 25
)");
  CHECK(cfg.problem.angles().alpha == doctest::Approx(3 * kPi / 4));
  CHECK(cfg.problem.angles().beta == doctest::Approx(-kPi / 2));
  CHECK(cfg.problem.transmission().columns == ColumnConvention::DerivativeFirst);
  CHECK(cfg.problem.potential().left(0.5) == doctest::Approx(2 * std::cos(1.5)));
  CHECK(cfg.problem.potential().right(2.0) == doctest::Approx(2.0));
  CHECK(cfg.solver.integrator.method == IntegrationMethod::FixedRk4);
  CHECK(cfg.solver.integrator.mesh_intervals == 256);
  CHECK(cfg.solver.jump == JumpConvention::PaperLiteral);
  CHECK(cfg.solver.count == 7);
  CHECK(cfg.solver.lambda_min == -20.0);
  CHECK(cfg.solver.points == 99);
  CHECK(cfg.report.out_dir == "somewhere");
  CHECK_FALSE(cfg.report.csv);
  CHECK(cfg.report.window.n_max == 25);
  CHECK(cfg.spectrum_options().ds == 0.03125);
}

TEST_CASE("angles") {
  CHECK(parse_angle("pi") == kPi);
  CHECK(parse_angle("-pi/2") == -kPi / 2);
  CHECK(parse_angle("2pi/3") == doctest::Approx(2 * kPi / 3));
  CHECK(parse_angle("3 * pi / 4") == doctest::Approx(3 * kPi / 4));
  CHECK(parse_angle("0.25") == 0.25);
  CHECK(parse_angle("1/8") == 0.125);
  CHECK(error_code_of([] { parse_angle("pie"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { parse_angle("pi/0"); }) == ErrorCode::ParseError);
}

TEST_CASE("missing transmission rows name the block") {
  try {
    parse_config("alpha = 0\nbeta = 0\n");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("transmission") != std::string::npos);
  }
}

TEST_CASE("rho12 violation is reported") {
  try {
    parse_config("alpha = 0\nbeta = 0\ntransmission.row_a = 0, 1, 0, -1\ntransmission.row_b = 1, 0, -1, 0\n");
    FAIL("expected ValidationError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("rho12 > 0 required") != std::string::npos);
  }
}

TEST_CASE("unknown keys and syntax errors carry line numbers") {
  try {
    parse_config(kMinimal + "solver.tolerance = 1e-9\n");
    FAIL("expected UnknownKey");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownKey);
    CHECK(std::string(e.what()).find("line 8") != std::string::npos);
  }
  try {
    parse_config(kMinimal + "alpha 3\n");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("line 8") != std::string::npos);
  }
  CHECK(error_code_of([] { parse_config(kMinimal + "alpha = 1\n"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { parse_config(kMinimal + "solver.count = ten\n"); }) == ErrorCode::ParseError);
  CHECK(error_code_of([] { parse_config(kMinimal + "solver.mesh_intervals = 10\n"); }) == ErrorCode::ValidationError);
  CHECK(error_code_of([] { parse_config(kMinimal + "potential.order = 1\n"); }) == ErrorCode::ValidationError);
  CHECK(error_code_of([] { load_config("/nonexistent/tsl.cfg"); }) == ErrorCode::IoError);
}

TEST_CASE("table potentials load relative to the config") {
  const auto cfg = load_config(fs::path(config_dir()) / "table_well.cfg");
  CHECK(cfg.problem.potential().left(-2.0) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(cfg.problem.potential().right(1.0) == 1.0);
  CHECK(cfg.problem.rho().r12 == 2.0);
}

TEST_CASE("CSV formatting") {
  Table t{"demo", {"n", "value", "label", "empty"}, {}};
  t.add({1LL, 1.0 / 3.0, std::string("a,b"), std::monostate{}});
  const auto csv = format_csv(t);
  CHECK(csv == "n,value,label,empty\n1,0.333333333333333,\"a,b\",\n");
  CHECK(error_code_of([&] { t.add({1LL}); }) == ErrorCode::InternalError);
}

TEST_CASE("an empty table gives a header-only CSV and a JSON warning") {
  const auto dir = scratch("empty");
  ReportBundle bundle{"solve", {Table{"spectrum", {"n", "lambda_n"}, {}}}, {}, {}};
  const auto files = emit_report(bundle, dir, true, true);
  REQUIRE(files.size() == 2);
  CHECK(slurp(dir / "spectrum.csv") == "n,lambda_n\n");
  const auto j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
  CHECK(j["rows"].empty());
  CHECK(j["warnings"].size() == 1);
  CHECK(j.contains("generated_at"));
}

TEST_CASE("JSON round trip is bit-identical") {
  Table t{"values", {"x"}, {}};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) {
    xs.push_back(u(rng) * std::pow(10.0, i % 17 - 8));
    t.add({xs.back()});
  }
  ReportBundle bundle{"demo", {}, {}, {}};
  const auto text = table_json(t, bundle, "now").dump(2);
  const auto back = nlohmann::json::parse(text);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(back["rows"][i]["x"].get<double>() == xs[i]);
}

TEST_CASE("solve on the Dirichlet config") {
  const auto dir = scratch("solve");
  const auto cfg = load_config(fs::path(config_dir()) / "dirichlet.cfg");
  CommandOptions opts;
  opts.out_dir = dir;
  const auto result = run_command(Command::Solve, cfg, opts);
  CHECK(result.exit_status == 0);
  const auto rows = read_csv(dir / "spectrum.csv");
  REQUIRE(rows.size() == 21);
  const auto n_col = column(rows[0], "n"), s_col = column(rows[0], "s_n");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::abs(std::stod(rows[i][s_col]) - 0.5 * std::stoi(rows[i][n_col])) <= 1e-8);
  }
  const auto efun = read_csv(dir / "eigenfunctions.csv");
  CHECK(efun[0] == std::vector<std::string>{"n", "side", "x", "u", "du"});
  CHECK(efun.size() == 1 + 20 * 2 * 513);

  const auto j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
  CHECK(j["columns"].get<std::vector<std::string>>() == rows[0]);
  CHECK(j["rows"].size() == 20);
  CHECK(j["summary"]["problem"]["case"] == "IV");
}

TEST_CASE("one eigenpair gives a two-line CSV") {
  const auto dir = scratch("one");
  const auto cfg = parse_config(kMinimal);
  CommandOptions opts;
  opts.out_dir = dir;
  opts.count = 1;
  run_command(Command::Solve, cfg, opts);
  CHECK(read_csv(dir / "spectrum.csv").size() == 2);
}

TEST_CASE("solve output is deterministic") {
  const auto cfg = load_config(fs::path(config_dir()) / "coupling_case_ii.cfg");
  CommandOptions a, b;
  a.out_dir = scratch("det_a");
  b.out_dir = scratch("det_b");
  a.count = b.count = 12;
  run_command(Command::Solve, cfg, a);
  run_command(Command::Solve, cfg, b);
  CHECK(slurp(*a.out_dir / "spectrum.csv") == slurp(*b.out_dir / "spectrum.csv"));
  CHECK(slurp(*a.out_dir / "eigenfunctions.csv") == slurp(*b.out_dir / "eigenfunctions.csv"));
}

TEST_CASE("scan writes the characteristic curve") {
  const auto dir = scratch("scan");
  const auto cfg = parse_config(kMinimal);
  CommandOptions opts;
  opts.out_dir = dir;
  opts.lambda_min = 0.0;
  opts.lambda_max = 5.0;
  opts.points = 256;
  const auto result = run_command(Command::Scan, cfg, opts);
  CHECK(result.exit_status == 0);
  const auto rows = read_csv(dir / "scan.csv");
  REQUIRE(rows.size() == 257);
  CHECK(rows[0] == std::vector<std::string>{"lambda", "s", "w1", "w2", "w", "boundary_form", "residual"});
  CHECK(std::stod(rows[256][0]) == 5.0);
  CHECK(result.bundle.summary["brackets"].size() == 4);
}

TEST_CASE("verify on the coupling config passes") {
  const auto cfg = load_config(fs::path(config_dir()) / "coupling_case_ii.cfg");
  CommandOptions opts;
  opts.out_dir = scratch("verify");
  opts.count = 12;
  const auto result = run_command(Command::Verify, cfg, opts);
  CHECK(result.exit_status == 0);
  CHECK(result.checks.size() > 20);
  for (const auto& c : result.checks) CHECK_MESSAGE(c.passed, c.check, " ", c.subject, " ", c.value);
}

TEST_CASE("verify flags a failing check with a nonzero status") {
  // Coarse fixed-step RK4: eigenfunctions lose orthogonality beyond 1e-6.
  const auto cfg = parse_config(kMinimal + "solver.method = rk4\nsolver.step = 0.05\nsolver.mesh_intervals = 64\n");
  CommandOptions opts;
  opts.out_dir = scratch("verify_fail");
  opts.count = 6;
  const auto result = run_command(Command::Verify, cfg, opts);
  CHECK(result.exit_status == 1);
  const auto rows = read_csv(*opts.out_dir / "verify.csv");
  const auto status = column(rows[0], "status");
  CHECK(std::any_of(rows.begin() + 1, rows.end(), [&](const auto& r) { return r[status] == "fail"; }));

  // Coarser still, the right boundary residual of an assembled eigenpair is rejected outright.
  const auto rough = parse_config(kMinimal + "solver.method = rk4\nsolver.step = 0.1\nsolver.mesh_intervals = 64\n");
  CHECK(error_code_of([&] { run_command(Command::Verify, rough, opts); }) == ErrorCode::NotAnEigenvalue);
}

TEST_CASE("oracle-compare on a constant potential") {
  const auto cfg = load_config(fs::path(config_dir()) / "coupling_case_iii.cfg");
  CommandOptions opts;
  opts.out_dir = scratch("oracle");
  opts.count = 10;
  const auto result = run_command(Command::OracleCompare, cfg, opts);
  CHECK(result.exit_status == 0);
  CHECK(fs::exists(*opts.out_dir / "oracle_eigenvalues.csv"));
  CHECK(std::count_if(result.checks.begin(), result.checks.end(),
                      [](const CheckRecord& c) { return c.check == "closed_form_eigenvalue"; }) == 10);
}

TEST_CASE("asymptotics reports the fit") {
  const auto cfg = load_config(fs::path(config_dir()) / "coupling_case_iv.cfg");
  CommandOptions opts;
  opts.out_dir = scratch("asym");
  const auto result = run_command(Command::Asymptotics, cfg, opts);
  CHECK(result.exit_status == 0);
  const auto j = nlohmann::json::parse(slurp(*opts.out_dir / "asymptotics.json"));
  CHECK(j["summary"]["fit"]["exponent"].get<double>() >= 0.8);
  CHECK(j["summary"]["fit"]["exact_points"].get<int>() > 0);
}

TEST_CASE("command names") {
  CHECK(parse_command("oracle-compare") == Command::OracleCompare);
  CHECK(to_string(Command::Scan) == "scan");
  CHECK(error_code_of([] { parse_command("plot"); }) == ErrorCode::ValidationError);
}

TEST_CASE("command-line binary") {
  const char* cli = std::getenv("TSL_CLI");
  if (!cli) {
    MESSAGE("TSL_CLI not set; binary checks skipped");
    return;
  }
  const auto dir = scratch("binary");
  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >" + (dir / "stdout.txt").string() + " 2>" +
                            (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string configs = config_dir();
  CHECK(run("solve --config " + configs + "/dirichlet.cfg --count 5 --out " + (dir / "a").string()) == 0);
  CHECK(read_csv(dir / "a" / "spectrum.csv").size() == 6);
  CHECK(run("solve --config " + configs + "/coupling_case_ii.cfg --count 4 --jump-convention paper --out " +
            (dir / "b").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "b" / "spectrum.json"))["summary"]["problem"]["jump_convention"] ==
        "paper");
  CHECK(run("verify --config " + configs + "/coupling_case_ii.cfg --count 8 --out " + (dir / "c").string()) == 0);
  CHECK(run("scan --config " + configs + "/dirichlet.cfg --lambda-min 0 --lambda-max 5 --points 64 --out " +
            (dir / "d").string()) == 0);
  CHECK(run("asymptotics --config " + configs + "/coupling_case_ii.cfg --n-min 10 --n-max 30 --out " +
            (dir / "e").string()) == 0);

  std::ofstream(dir / "bad.cfg") << "alpha = 0\nbeta = 0\nbogus = 1\n";
  CHECK(run("solve --config " + (dir / "bad.cfg").string() + " --out " + (dir / "f").string()) == 2);
  const auto err = nlohmann::json::parse(slurp(dir / "stderr.txt"));
  CHECK(err["error"] == "UnknownKey");
  CHECK(run("solve") != 0);
}
