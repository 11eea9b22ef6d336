#include <CLI11.hpp>
#include <iostream>

#include "tsl/commands.hpp"

namespace {

struct Invocation {
  std::string config;
  tsl::CommandOptions options;
  std::string jump;
  std::string out;
};

// Exit codes: 0 all checks passed, 1 an enabled check failed, 2 error.
int run(tsl::Command command, const Invocation& inv) {
  auto options = inv.options;
  if (!inv.jump.empty()) {
    options.jump = inv.jump == "paper" ? tsl::JumpConvention::PaperLiteral : tsl::JumpConvention::CramerSolve;
  }
  if (!inv.out.empty()) options.out_dir = inv.out;

  const auto config = tsl::load_config(inv.config);
  const auto result = tsl::run_command(command, config, options);
  for (const auto& c : result.checks) {
    if (c.enabled && !c.passed) {
      std::cerr << "FAIL " << c.check << " [" << c.subject << "] " << c.value << " > " << c.threshold << "\n";
    }
  }
  for (const auto& w : result.bundle.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& f : result.files) std::cout << f.string() << "\n";
  return result.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalue solver for Sturm-Liouville problems with transmission conditions at x = 0"};
  app.require_subcommand(1);

  Invocation inv;
  std::map<CLI::App*, tsl::Command> commands;
  auto add = [&](const std::string& name, const std::string& help, tsl::Command cmd) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", inv.config, "key = value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", inv.out, "output directory (overrides report.out_dir)");
    sub->add_option("--jump-convention", inv.jump, "interface jump map")
        ->check(CLI::IsMember({"paper", "cramer"}));
    commands[sub] = cmd;
    return sub;
  };

  auto* solve = add("solve", "eigenvalues, eigenfunctions and residuals", tsl::Command::Solve);
  solve->add_option("--count", inv.options.count, "number of eigenvalues")->check(CLI::PositiveNumber);

  auto* scan = add("scan", "characteristic function on a uniform lambda grid", tsl::Command::Scan);
  scan->add_option("--lambda-min", inv.options.lambda_min, "grid start");
  scan->add_option("--lambda-max", inv.options.lambda_max, "grid end");
  scan->add_option("--points", inv.options.points, "grid points")->check(CLI::Range(2, 10000000));

  auto* asym = add("asymptotics", "fit eigenvalue errors against their leading terms", tsl::Command::Asymptotics);
  asym->add_option("--n-min", inv.options.n_min, "first index of the fit window")->check(CLI::PositiveNumber);
  asym->add_option("--n-max", inv.options.n_max, "last index of the fit window")->check(CLI::PositiveNumber);

  auto* verify = add("verify", "Wronskian, rho identity, residual and orthogonality checks", tsl::Command::Verify);
  verify->add_option("--count", inv.options.count, "number of eigenvalues")->check(CLI::PositiveNumber);

  auto* oracle = add("oracle-compare", "Picard iteration and closed-form cross checks", tsl::Command::OracleCompare);
  oracle->add_option("--count", inv.options.count, "number of eigenvalues")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [sub, cmd] : commands) {
      if (sub->parsed()) return run(cmd, inv);
    }
  } catch (const tsl::Error& e) {
    std::cerr << "{\"error\":\"" << tsl::to_string(e.code()) << "\",\"message\":" << nlohmann::json(e.what()).dump()
              << "}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"InternalError\",\"message\":" << nlohmann::json(e.what()).dump() << "}\n";
    return 2;
  }
  return 2;
}
