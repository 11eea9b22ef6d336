#include "tsl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace tsl {
namespace {

struct Context {
  const RunConfig& config;
  const ValidatedProblem& problem;
  IntegratorConfig integrator;
  JumpConvention jump;
  int count;
  SpectrumOptions spectrum;
  FitWindow window;
};

Context make_context(const RunConfig& config, const CommandOptions& options) {
  Context ctx{config,
              config.problem,
              config.solver.integrator,
              options.jump.value_or(config.solver.jump),
              options.count.value_or(config.solver.count),
              config.spectrum_options(),
              config.report.window};
  if (ctx.count < 1) throw Error(ErrorCode::ValidationError, "count must be >= 1");
  if (options.lambda_min) ctx.spectrum.lambda_min = options.lambda_min;
  if (options.n_min) ctx.window.n_min = *options.n_min;
  if (options.n_max) ctx.window.n_max = *options.n_max;
  if (ctx.window.n_min < 1 || ctx.window.n_max < ctx.window.n_min) {
    throw Error(ErrorCode::ValidationError, "n-min and n-max must satisfy 1 <= n-min <= n-max");
  }
  return ctx;
}

void add_check(CommandResult& result, std::string check, std::string subject, double value, double threshold,
               bool enabled = true) {
  const bool passed = std::isfinite(value) && value <= threshold;
  result.checks.push_back({std::move(check), std::move(subject), value, threshold, enabled, passed});
}

Table check_table(const std::vector<CheckRecord>& checks, const std::string& name) {
  Table t{name, {"check", "subject", "value", "threshold", "status"}, {}};
  for (const auto& c : checks) {
    t.add({c.check, c.subject, c.value, c.threshold, std::string(!c.enabled ? "skipped" : c.passed ? "pass" : "fail")});
  }
  return t;
}

nlohmann::json problem_json(const Context& ctx) {
  const auto& p = ctx.problem;
  const auto& r = p.rho();
  nlohmann::json j;
  j["alpha"] = p.angles().alpha;
  j["beta"] = p.angles().beta;
  j["case"] = to_string(p.case_tag().variant);
  j["jump_convention"] = to_string(ctx.jump);
  j["columns"] = p.transmission().columns == ColumnConvention::ValueFirst ? "value-first" : "derivative-first";
  j["rho"] = {{"r12", r.r12}, {"r13", r.r13}, {"r14", r.r14}, {"r23", r.r23}, {"r24", r.r24}, {"r34", r.r34}};
  j["potential_left"] = p.potential().left.describe();
  j["potential_right"] = p.potential().right.describe();
  if (!ctx.config.source.empty()) j["config"] = ctx.config.source.string();
  return j;
}

void finish(CommandResult& result, const Context& ctx, const CommandOptions& options) {
  const bool failed = std::any_of(result.checks.begin(), result.checks.end(),
                                  [](const CheckRecord& c) { return c.enabled && !c.passed; });
  result.exit_status = failed ? 1 : 0;
  result.bundle.summary["problem"] = problem_json(ctx);
  result.bundle.summary["status"] = failed ? "fail" : "pass";
  const auto dir = options.out_dir.value_or(ctx.config.report.out_dir);
  result.files = emit_report(result.bundle, dir, ctx.config.report.csv, ctx.config.report.json);
}

// lambda grid: linear over negative values, then uniform in s = sqrt(lambda).
std::vector<double> search_grid(double lambda_min, double lambda_max, double ds) {
  std::vector<double> grid;
  if (lambda_min < 0.0) {
    const int n = std::max(32, static_cast<int>(std::ceil(-lambda_min / 0.25)));
    for (int i = 0; i < n; ++i) grid.push_back(lambda_min + (-lambda_min) * i / n);
  }
  const double s0 = std::sqrt(std::max(0.0, lambda_min));
  const double s1 = std::sqrt(std::max(0.0, lambda_max));
  for (double s = s0; s < s1 + ds; s += ds) grid.push_back(s * s);
  return grid;
}

// ---------------------------------------------------------------- solve

CommandResult run_solve(const Context& ctx) {
  CommandResult result;
  result.bundle.command = "solve";
  auto eigenpairs = find_eigenvalues(ctx.problem, ctx.count, ctx.jump, ctx.integrator, ctx.spectrum);
  const auto report = make_spectrum_report(std::move(eigenpairs), ctx.problem.case_tag(), ctx.window);

  result.bundle.tables.push_back(spectrum_table(report_rows(report)));
  result.bundle.tables.push_back(eigenfunction_table(report.eigenpairs));
  auto& summary = result.bundle.summary;
  summary["count"] = report.eigenpairs.size();
  if (report.fit) summary["fit"] = fit_json(*report.fit);
  if (report.integer_fit) summary["integer_fit"] = fit_json(*report.integer_fit);
  for (const auto& e : report.eigenpairs) {
    if (e.multiplicity > 1) {
      result.bundle.warnings.push_back("eigenvalue " + std::to_string(e.index) +
                                       " is an unresolved tangency (reported multiplicity 2)");
    }
  }
  if (!report.fit) {
    result.bundle.warnings.push_back("too few eigenvalues inside the asymptotic window for a fit");
  }
  return result;
}

// ---------------------------------------------------------------- scan

CommandResult run_scan(const Context& ctx, const CommandOptions& options) {
  CommandResult result;
  result.bundle.command = "scan";
  const double lo = options.lambda_min.value_or(ctx.config.solver.lambda_min.value_or(0.0));
  const double hi = options.lambda_max.value_or(ctx.config.solver.lambda_max.value_or(25.0));
  const int points = options.points.value_or(ctx.config.solver.points);
  if (!(lo < hi) || points < 2) throw Error(ErrorCode::ValidationError, "scan needs lambda-min < lambda-max and points >= 2");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1);
  const auto curve = sample_curve(ctx.problem, grid, ctx.jump, ctx.integrator);
  result.bundle.tables.push_back(curve_table(curve));

  std::vector<double> w(curve.samples.size());
  std::transform(curve.samples.begin(), curve.samples.end(), w.begin(), [](const auto& c) { return c.w; });
  const auto& g = grid;
  const auto brackets = scan_brackets(
      [&](double lambda) { return w[std::lower_bound(g.begin(), g.end(), lambda) - g.begin()]; }, grid);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& b : brackets) {
    const char* kind = b.kind == BracketKind::SignChange ? "sign_change" : b.kind == BracketKind::Tangency ? "tangency"
                                                                                                           : "exact";
    list.push_back({{"kind", kind}, {"lo", b.lo}, {"hi", b.hi}});
  }
  result.bundle.summary["brackets"] = list;
  result.bundle.summary["points"] = points;
  return result;
}

// ---------------------------------------------------------------- asymptotics

CommandResult run_asymptotics(const Context& ctx) {
  CommandResult result;
  result.bundle.command = "asymptotics";
  const auto tag = ctx.problem.case_tag();
  const auto family = target_family(tag);
  const double s_top = target_value(family, ctx.window.n_max) + 0.75;
  const auto roots = find_roots_below(ctx.problem, s_top * s_top, ctx.jump, ctx.integrator, ctx.spectrum);

  Table table{"asymptotics",
              {"index", "lambda_n", "s_n", "multiplicity", "target_n", "asymptotic_s", "abs_err", "n_times_err",
               "integer_err", "in_window"},
              {}};
  std::vector<double> s_values;
  std::map<int, std::pair<double, double>> best;  // target n -> (error, s)
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto& r = roots[i];
    std::vector<Cell> row{static_cast<long long>(i + 1), r.lambda};
    if (r.lambda < 0.0) {
      row.insert(row.end(), {std::monostate{}, static_cast<long long>(r.multiplicity), std::monostate{},
                             std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                             std::string("no")});
      table.add(std::move(row));
      continue;
    }
    const double s = std::sqrt(r.lambda);
    const auto m = match_target(s, family);
    const bool in_window = m.n >= ctx.window.n_min && m.n <= ctx.window.n_max;
    s_values.push_back(s);
    if (m.n >= 1 && (!best.count(m.n) || m.error < best[m.n].first)) best[m.n] = {m.error, s};
    row.insert(row.end(), {s, static_cast<long long>(r.multiplicity), static_cast<long long>(m.n), m.target,
                           m.error, m.n * m.error, match_target(s, TargetFamily::Integer).error,
                           std::string(in_window ? "yes" : "no")});
    table.add(std::move(row));
  }
  result.bundle.tables.push_back(std::move(table));

  auto& summary = result.bundle.summary;
  summary["roots"] = roots.size();
  const bool enforce = tag.variant != ProblemCase::I && std::abs(ctx.problem.rho().r24) > kRhoFloor;
  std::optional<AsymptoticFit> fit;
  try {
    fit = convergence_fit(s_values, family, ctx.window);
    summary["fit"] = fit_json(*fit);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateFit) throw;
    result.bundle.warnings.push_back(e.what());
  }
  if (tag.variant == ProblemCase::I) {
    try {
      summary["integer_fit"] = fit_json(convergence_fit(s_values, TargetFamily::Integer, ctx.window));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFit) throw;
    }
    result.bundle.warnings.push_back(
        "case I: roots sit both near integers and near n - 1/2 targets; both fits are reported, none is asserted");
  }
  const double exponent = !fit ? NAN : fit->exact_match ? INFINITY : fit->exponent;
  // the check is value <= threshold, so compare -p against -0.8
  add_check(result, "asymptotic_exponent", "p >= 0.8 over the window", -exponent, -0.8, enforce);

  // Distance of the unnormalised phi (left piece) from its leading term.
  Table efun{"eigenfunction_asymptotics",
             {"n", "s_n", "sup_err_printed", "sup_err_predicate", "n_times_err_predicate"},
             {}};
  const auto params = AsymptoticParams::from(ctx.problem);
  for (const auto& [n, entry] : best) {
    if (n < ctx.window.n_min || n > ctx.window.n_max) continue;
    const double s = entry.second;
    const auto phi = build_phi(ctx.problem, s * s, ctx.jump, ctx.integrator);
    double printed = 0.0, predicate = 0.0;
    for (const auto& st : phi.left.states()) {
      printed = std::max(printed, std::abs(st.y - asymptotic_eigenfunction(tag, n, st.x, params,
                                                                            EigenfunctionKeying::Printed)));
      predicate = std::max(predicate, std::abs(st.y - asymptotic_eigenfunction(tag, n, st.x, params,
                                                                                EigenfunctionKeying::Predicate)));
    }
    efun.add({static_cast<long long>(n), s, printed, predicate, n * predicate});
  }
  result.bundle.tables.push_back(std::move(efun));
  result.bundle.tables.push_back(check_table(result.checks, "asymptotics_checks"));
  return result;
}

// ---------------------------------------------------------------- verify

CommandResult run_verify(const Context& ctx) {
  CommandResult result;
  result.bundle.command = "verify";
  const auto& problem = ctx.problem;
  const auto& rho = problem.rho();
  const bool cramer = ctx.jump == JumpConvention::CramerSolve;

  double rho_scale = 0.0;
  for (double r : {rho.r12, rho.r13, rho.r14, rho.r23, rho.r24, rho.r34}) rho_scale = std::max(rho_scale, std::abs(r));
  add_check(result, "plucker_identity", "rho minors", std::abs(rho.plucker_residual()), 1e-12 * (1.0 + rho_scale * rho_scale));

  const auto eigenpairs = find_eigenvalues(problem, ctx.count, ctx.jump, ctx.integrator, ctx.spectrum);

  // Sample lambda away from eigenvalues: below the first and between neighbours.
  std::vector<double> samples{eigenpairs.front().lambda - 1.0};
  for (std::size_t i = 0; i + 1 < eigenpairs.size(); ++i) {
    samples.push_back(0.5 * (eigenpairs[i].lambda + eigenpairs[i + 1].lambda));
  }
  const double det = jump_determinant(problem, ctx.jump);
  for (double lambda : samples) {
    const auto phi = build_phi(problem, lambda, ctx.jump, ctx.integrator);
    const auto chi = build_chi(problem, lambda, ctx.jump, ctx.integrator);
    const std::string subject = "lambda=" + std::to_string(lambda);
    const auto left = wronskian_spread(phi.left, chi.left);
    const auto right = wronskian_spread(phi.right, chi.right);
    const double w1 = wronskian_at(phi.left, chi.left, 0.0);
    const double w2 = wronskian_at(phi.right, chi.right, 0.0);
    add_check(result, "wronskian_constant_left", subject, left.spread(), 1e-9 * (1.0 + std::abs(w1)));
    add_check(result, "wronskian_constant_right", subject, right.spread(), 1e-9 * (1.0 + std::abs(w2)));
    const double scale = std::max(std::abs(w2), std::abs(det * w1));
    add_check(result, "wronskian_ratio", subject, scale > 0.0 ? std::abs(w2 - det * w1) / scale : 0.0, 1e-7);
  }

  for (const auto& e : eigenpairs) {
    const std::string subject = "n=" + std::to_string(e.index);
    const double bound = 1e-6 * (1.0 + e.residuals.interface_norm);
    add_check(result, "transmission_1", subject, std::abs(e.residuals.transmission_1), bound, cramer);
    add_check(result, "transmission_2", subject, std::abs(e.residuals.transmission_2), bound, cramer);
    add_check(result, "boundary_right", subject, std::abs(e.residuals.boundary_right), bound);
    add_check(result, "normalisation", subject, std::abs(e.norm_sq - 1.0), 1e-8);
  }

  const auto gram = gram_matrix(eigenpairs, rho.r12, rho.r34);
  double off = 0.0;
  for (std::size_t i = 0; i < gram.size(); ++i) {
    for (std::size_t j = 0; j < gram.size(); ++j) {
      if (i != j && eigenpairs[i].lambda != eigenpairs[j].lambda) off = std::max(off, std::abs(gram[i][j]));
    }
  }
  add_check(result, "orthogonality", "max off-diagonal of the weighted Gram matrix", off, 1e-6, cramer);
  if (!cramer) {
    result.bundle.warnings.push_back(
        "paper jump convention: transmission residuals and weighted orthogonality are reported but not enforced");
  }
  result.bundle.tables.push_back(check_table(result.checks, "verify"));
  return result;
}

// ---------------------------------------------------------------- oracle-compare

double picard_vs_shooting(const PicardSolution& picard, const SolutionPath& shot, int k) {
  double err = 0.0;
  for (const auto& st : picard.path.states()) {
    const auto ref = shot.at(st.x);
    err = std::max(err, std::abs(k == 0 ? st.y - ref.y : st.dy - ref.dy));
  }
  return err;
}

CommandResult run_oracle_compare(const Context& ctx) {
  CommandResult result;
  result.bundle.command = "oracle-compare";
  const auto& problem = ctx.problem;

  for (double lambda : {1.0, 10.0, 100.0}) {
    const auto phi = build_phi(problem, lambda, ctx.jump, ctx.integrator);
    const auto chi = build_chi(problem, lambda, ctx.jump, ctx.integrator);
    const std::pair<FundamentalPiece, const SolutionPath*> pieces[] = {{FundamentalPiece::Phi1, &phi.left},
                                                                       {FundamentalPiece::Phi2, &phi.right},
                                                                       {FundamentalPiece::Chi1, &chi.left},
                                                                       {FundamentalPiece::Chi2, &chi.right}};
    const char* names[] = {"phi1", "phi2", "chi1", "chi2"};
    for (int i = 0; i < 4; ++i) {
      const auto picard = picard_solve(pieces[i].first, problem, lambda, PicardConfig{}, ctx.jump);
      for (int k = 0; k < 2; ++k) {
        add_check(result, std::string("picard_vs_shooting_k") + std::to_string(k),
                  std::string(names[i]) + " lambda=" + std::to_string(lambda),
                  picard_vs_shooting(picard, *pieces[i].second, k), 1e-6);
      }
    }
  }

  const bool constant = problem.potential().left.constant_value() && problem.potential().right.constant_value();
  if (constant) {
    const auto eigenpairs = find_eigenvalues(problem, ctx.count, ctx.jump, ctx.integrator, ctx.spectrum);
    const double lambda_min = ctx.spectrum.lambda_min.value_or(-(10.0 + problem.potential_bound()));
    const double top = eigenpairs.back().lambda;
    const auto grid = search_grid(lambda_min, std::max(top, 0.0) + 4.0, ctx.spectrum.ds);

    const CharacteristicFn exact = [&](double lambda) { return char_w_closed_form(problem, lambda, ctx.jump); };
    double w_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += 4) {
      const double ref = exact(grid[i]);
      w_err = std::max(w_err, std::abs(char_w_value(problem, grid[i], ctx.jump, ctx.integrator) - ref) /
                                  (1.0 + std::abs(ref)));
    }
    add_check(result, "closed_form_w", "relative error over the search grid", w_err, 1e-7);

    std::vector<Root> exact_roots;
    for (const auto& b : scan_brackets(exact, grid)) {
      try {
        for (const auto& r : refine_root(exact, b, {ctx.spectrum.refine_tol, 1e-9})) exact_roots.push_back(r);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TangencyRejected) throw;
      }
    }
    std::sort(exact_roots.begin(), exact_roots.end(), [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
    exact_roots.erase(std::unique(exact_roots.begin(), exact_roots.end(),
                                  [](const Root& a, const Root& b) {
                                    return std::abs(a.lambda - b.lambda) <= 1e-10 * (1.0 + std::abs(a.lambda));
                                  }),
                      exact_roots.end());

    Table table{"oracle_eigenvalues", {"n", "lambda_n", "lambda_exact", "s_n", "s_exact", "error"}, {}};
    for (const auto& e : eigenpairs) {
      const std::string subject = "n=" + std::to_string(e.index);
      if (static_cast<std::size_t>(e.index) > exact_roots.size()) {
        add_check(result, "closed_form_eigenvalue", subject, INFINITY, 1e-8);
        continue;
      }
      const double ref = exact_roots[e.index - 1].lambda;
      const bool use_s = ref >= 0.0 && e.lambda >= 0.0;
      const double s = std::sqrt(std::max(0.0, e.lambda)), s_ref = std::sqrt(std::max(0.0, ref));
      const double err = use_s ? std::abs(s - s_ref) : std::abs(e.lambda - ref);
      table.add({static_cast<long long>(e.index), e.lambda, ref, s, s_ref, err});
      add_check(result, "closed_form_eigenvalue", subject, err, 1e-8);
    }
    result.bundle.tables.push_back(std::move(table));
  } else {
    result.bundle.warnings.push_back("potential is not piecewise constant: closed-form comparisons skipped");
  }
  result.bundle.tables.push_back(check_table(result.checks, "oracle_compare"));
  return result;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "scan") return Command::Scan;
  if (name == "asymptotics") return Command::Asymptotics;
  if (name == "verify") return Command::Verify;
  if (name == "oracle-compare") return Command::OracleCompare;
  throw Error(ErrorCode::ValidationError, "unknown command '" + name + "'");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::Solve: return "solve";
    case Command::Scan: return "scan";
    case Command::Asymptotics: return "asymptotics";
    case Command::Verify: return "verify";
    case Command::OracleCompare: return "oracle-compare";
  }
  return "?";
}

CommandResult run_command(Command command, const RunConfig& config, const CommandOptions& options) {
  const Context ctx = make_context(config, options);
  CommandResult result;
  switch (command) {
    case Command::Solve: result = run_solve(ctx); break;
    case Command::Scan: result = run_scan(ctx, options); break;
    case Command::Asymptotics: result = run_asymptotics(ctx); break;
    case Command::Verify: result = run_verify(ctx); break;
    case Command::OracleCompare: result = run_oracle_compare(ctx); break;
  }
  finish(result, ctx, options);
  return result;
}

}  // namespace tsl
