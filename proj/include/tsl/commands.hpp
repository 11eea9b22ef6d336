#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsl/config.hpp"
#include "tsl/report.hpp"

namespace tsl {

enum class Command { Solve, Scan, Asymptotics, Verify, OracleCompare };

Command parse_command(const std::string& name);
std::string to_string(Command command);

/// Command-line overrides of the config.
struct CommandOptions {
  std::optional<int> count;
  std::optional<JumpConvention> jump;
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<int> points;
  std::optional<int> n_min;
  std::optional<int> n_max;
};

struct CheckRecord {
  std::string check;
  std::string subject;
  double value = 0.0;
  double threshold = 0.0;
  bool enabled = true;  // disabled checks are reported but never fail the run
  bool passed = true;
};

struct CommandResult {
  int exit_status = 0;  // 1 when an enabled check failed
  ReportBundle bundle;
  std::vector<CheckRecord> checks;
  std::vector<std::filesystem::path> files;
};

/// Runs the command and writes its report files. Exceptions from the solver propagate.
CommandResult run_command(Command command, const RunConfig& config, const CommandOptions& options = {});

}  // namespace tsl
