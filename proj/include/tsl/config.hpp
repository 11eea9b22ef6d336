#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tsl/fundamental.hpp"
#include "tsl/spectrum.hpp"

namespace tsl {

struct SolverSettings {
  IntegratorConfig integrator;
  JumpConvention jump = JumpConvention::CramerSolve;
  int count = 10;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  int points = 256;
  double refine_tol = 1e-13;
  double ds = 1.0 / 16.0;
};

struct ReportSettings {
  std::filesystem::path out_dir = "out";
  bool csv = true;
  bool json = true;
  FitWindow window;
};

struct RunConfig {
  ValidatedProblem problem;
  SolverSettings solver;
  ReportSettings report;
  std::filesystem::path source;  // empty when parsed from a string

  SpectrumOptions spectrum_options() const;
};

/// Parses `key = value` lines; `#` starts a comment. Relative table paths resolve against base_dir.
/// Throws ParseError, UnknownKey or ValidationError; the message lists every problem found with
/// its line number.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

/// Reads "0.5", "pi", "-pi/2", "3*pi/4", "2pi/3" and plain numbers with an optional "/d".
double parse_angle(const std::string& text);

}  // namespace tsl
