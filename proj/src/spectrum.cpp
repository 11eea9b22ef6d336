#include "tsl/spectrum.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>

namespace tsl {
namespace {

constexpr int kScaleWindow = 8;

std::vector<Bracket> scan_values(std::span<const double> grid, std::span<const double> values) {
  std::vector<Bracket> out;
  const std::size_t n = grid.size();
  auto local_scale = [&](std::size_t i) {
    const std::size_t lo = i >= kScaleWindow ? i - kScaleWindow : 0;
    const std::size_t hi = std::min(n - 1, i + kScaleWindow);
    double scale = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) scale = std::max(scale, std::abs(values[j]));
    return scale;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] == 0.0) {
      out.push_back({BracketKind::ExactNode, grid[i], grid[i], grid[i], local_scale(i)});
      continue;
    }
    if (i + 1 < n && values[i + 1] != 0.0 && std::signbit(values[i]) != std::signbit(values[i + 1])) {
      out.push_back({BracketKind::SignChange, grid[i], grid[i + 1], 0.5 * (grid[i] + grid[i + 1]), local_scale(i)});
    }
    if (i > 0 && i + 1 < n) {
      const double a = values[i - 1], b = values[i], c = values[i + 1];
      const bool same_sign = a != 0.0 && c != 0.0 && std::signbit(a) == std::signbit(b) &&
                             std::signbit(b) == std::signbit(c);
      if (same_sign && std::abs(b) < std::abs(a) && std::abs(b) < std::abs(c)) {
        out.push_back({BracketKind::Tangency, grid[i - 1], grid[i + 1], grid[i], local_scale(i)});
      }
    }
  }
  return out;
}

void require_grid(std::span<const double> grid) {
  if (grid.size() < 2 || !std::is_sorted(grid.begin(), grid.end(), std::less_equal<>())) {
    throw Error(ErrorCode::ValidationError, "scan grid must be strictly increasing with at least two points");
  }
}

// Bracketing solve to |b - a| <= tol (1 + |m|); for lambda >= 0 also |sqrt(b) - sqrt(a)| <= tol so
// that s = sqrt(lambda) is resolved near zero.
Root solve_bracket(const CharacteristicFn& w, double a, double b, double fa, double fb, double tol) {
  if (fa == 0.0) return {a, 1, 0.0};
  if (fb == 0.0) return {b, 1, 0.0};
  if (std::signbit(fa) == std::signbit(fb)) {
    throw Error(ErrorCode::LostBracket, "w has equal signs at both ends of [" + std::to_string(a) + ", " +
                                            std::to_string(b) + "]");
  }
  auto done = [tol](double lo, double hi) {
    const double width = std::abs(hi - lo);
    if (width > tol * (1.0 + std::max(std::abs(lo), std::abs(hi)))) return false;
    if (lo >= 0.0 && hi >= 0.0) return std::abs(std::sqrt(hi) - std::sqrt(lo)) <= tol;
    if (lo < 0.0 && hi > 0.0) return width <= tol * tol;
    return true;
  };
  boost::uintmax_t max_iter = 400;
  const auto [lo, hi] = boost::math::tools::toms748_solve(w, a, b, fa, fb, done, max_iter);
  const double root = 0.5 * (lo + hi);
  return {root, 1, w(root)};
}

std::vector<double> spectral_grid(double lambda_min, double s_max, double ds) {
  std::vector<double> grid;
  double s0 = 0.0;
  if (lambda_min < 0.0) {
    const int n_neg = std::max(32, static_cast<int>(std::ceil(-lambda_min / 0.25)));
    for (int i = 0; i < n_neg; ++i) grid.push_back(lambda_min + (-lambda_min) * i / n_neg);
    grid.push_back(0.0);
  } else {
    s0 = std::sqrt(lambda_min);
    grid.push_back(lambda_min);
  }
  const int steps = static_cast<int>(std::ceil((s_max - s0) / ds));
  for (int k = 1; k <= steps; ++k) {
    const double s = s0 + ds * k;
    grid.push_back(s * s);
  }
  return grid;
}

std::vector<Root> collect_roots(const ValidatedProblem& problem, std::span<const double> grid, JumpConvention conv,
                                const IntegratorConfig& cfg, double tol) {
  const CharacteristicFn w = [&](double lambda) { return char_w_value(problem, lambda, conv, cfg); };
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), w);

  std::vector<Root> roots;
  for (const auto& bracket : scan_values(grid, values)) {
    try {
      const RefineOptions opts{tol, 1e3 * cfg.rel_tol * bracket.local_scale};
      for (const auto& r : refine_root(w, bracket, opts)) roots.push_back(r);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TangencyRejected) throw;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.lambda < b.lambda; });
  std::vector<Root> unique;
  for (const auto& r : roots) {
    if (!unique.empty() && std::abs(r.lambda - unique.back().lambda) <= 1e-10 * (1.0 + std::abs(r.lambda))) {
      unique.back().multiplicity = std::max(unique.back().multiplicity, r.multiplicity);
      continue;
    }
    unique.push_back(r);
  }
  return unique;
}

double default_lambda_min(const ValidatedProblem& problem, const SpectrumOptions& opts) {
  return opts.lambda_min.value_or(-(10.0 + problem.potential_bound()));
}

double sign_of_launch(double alpha) {
  const double sa = std::sin(alpha);
  if (std::abs(sa) > kDefaultCaseTolerance) return sa > 0.0 ? 1.0 : -1.0;
  return -std::cos(alpha) > 0.0 ? 1.0 : -1.0;
}

SolutionPath scaled(const SolutionPath& path, double factor) {
  std::vector<StatePair> states(path.states().begin(), path.states().end());
  std::vector<double> curvature(path.curvature().begin(), path.curvature().end());
  for (auto& st : states) {
    st.y *= factor;
    st.dy *= factor;
  }
  for (auto& c : curvature) c *= factor;
  return SolutionPath(path.lambda(), std::move(states), std::move(curvature));
}

}  // namespace

std::vector<Bracket> scan_brackets(const CharacteristicFn& w, std::span<const double> grid) {
  require_grid(grid);
  std::vector<double> values(grid.size());
  std::transform(grid.begin(), grid.end(), values.begin(), w);
  return scan_values(grid, values);
}

std::vector<Bracket> scan_brackets(const ValidatedProblem& problem, double lambda_min, double lambda_max,
                                   int grid_points, JumpConvention conv, const IntegratorConfig& cfg) {
  if (!(lambda_min < lambda_max) || grid_points < 16) {
    throw Error(ErrorCode::ValidationError, "scan needs lambda_min < lambda_max and at least 16 grid points");
  }
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    grid[i] = i + 1 == grid_points ? lambda_max : lambda_min + (lambda_max - lambda_min) * i / (grid_points - 1);
  }
  return scan_brackets([&](double lambda) { return char_w_value(problem, lambda, conv, cfg); }, grid);
}

std::vector<Root> refine_root(const CharacteristicFn& w, const Bracket& bracket, const RefineOptions& opts) {
  switch (bracket.kind) {
    case BracketKind::ExactNode:
      return {{bracket.lo, 1, 0.0}};
    case BracketKind::SignChange:
      return {solve_bracket(w, bracket.lo, bracket.hi, w(bracket.lo), w(bracket.hi), opts.tol)};
    case BracketKind::Tangency: {
      // The dip sits between endpoints of equal sign; the middle node may be noise around a root.
      const double w_lo = w(bracket.lo);
      if (w_lo == 0.0) return {{bracket.lo, 1, 0.0}};
      const double sign = w_lo > 0.0 ? 1.0 : -1.0;
      const auto [x_min, f_min] = boost::math::tools::brent_find_minima(
          [&](double lambda) { return sign * w(lambda); }, bracket.lo, bracket.hi, 48);
      if (f_min < 0.0) {
        return {solve_bracket(w, bracket.lo, x_min, w_lo, sign * f_min, opts.tol),
                solve_bracket(w, x_min, bracket.hi, sign * f_min, w(bracket.hi), opts.tol)};
      }
      if (f_min <= opts.noise_floor) return {{x_min, 2, sign * f_min}};
      throw Error(ErrorCode::TangencyRejected, "dip of |w| near lambda = " + std::to_string(x_min) +
                                                   " stays above the noise floor");
    }
  }
  throw Error(ErrorCode::InternalError, "unknown bracket kind");
}

std::vector<Root> refine_root(const ValidatedProblem& problem, const Bracket& bracket, double tol,
                              JumpConvention conv, const IntegratorConfig& cfg) {
  const CharacteristicFn w = [&](double lambda) { return char_w_value(problem, lambda, conv, cfg); };
  return refine_root(w, bracket, {tol, 1e3 * cfg.rel_tol * bracket.local_scale});
}

double simpson_product(const SolutionPath& u, const SolutionPath& v) {
  if (u.size() != v.size() || u.size() % 2 == 0) {
    throw Error(ErrorCode::MeshMismatch, "Simpson needs equal meshes with an even number of intervals");
  }
  const auto a = u.states();
  const auto b = v.states();
  const std::size_t n = a.size() - 1;
  if (std::abs(a.front().x - b.front().x) > 1e-12 || std::abs(a.back().x - b.back().x) > 1e-12) {
    throw Error(ErrorCode::MeshMismatch, "eigenfunction meshes cover different intervals");
  }
  const double h = (a.back().x - a.front().x) / static_cast<double>(n);
  double sum = a.front().y * b.front().y + a.back().y * b.back().y;
  for (std::size_t i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * a[i].y * b[i].y;
  return sum * h / 3.0;
}

double weighted_inner(const Eigenfunction& u, const Eigenfunction& v, double rho12, double rho34) {
  return rho12 * simpson_product(u.left, v.left) + rho34 * simpson_product(u.right, v.right);
}

std::vector<std::vector<double>> gram_matrix(std::span<const Eigenpair> eigenpairs, double rho12, double rho34) {
  const std::size_t n = eigenpairs.size();
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      gram[i][j] = gram[j][i] =
          weighted_inner(eigenpairs[i].eigenfunction, eigenpairs[j].eigenfunction, rho12, rho34);
    }
  }
  return gram;
}

AssembledEigenfunction assemble_eigenfunction(const ValidatedProblem& problem, double lambda_n, JumpConvention conv,
                                              const IntegratorConfig& cfg) {
  const auto phi = build_phi(problem, lambda_n, conv, cfg);
  const auto& rho = problem.rho();
  const Eigenfunction raw{phi.left, phi.right};
  const double norm = weighted_inner(raw, raw, rho.r12, rho.r34);
  if (!(norm > 0.0)) throw Error(ErrorCode::NotAnEigenvalue, "eigenfunction has zero weighted norm");
  const double factor = sign_of_launch(problem.angles().alpha) / std::sqrt(norm);

  AssembledEigenfunction out{{scaled(phi.left, factor), scaled(phi.right, factor)}, 0.0, {}};
  out.norm_sq = weighted_inner(out.eigenfunction, out.eigenfunction, rho.r12, rho.r34);

  // Residuals are scale-free, so they are taken on phi as launched.
  const auto& angles = problem.angles();
  const StatePair start = phi.left.front();
  const StatePair minus = phi.left.back();
  const StatePair plus = phi.right.front();
  const StatePair end = phi.right.back();
  auto& r = out.residuals;
  r.boundary_left = std::cos(angles.alpha) * start.y + std::sin(angles.alpha) * start.dy;
  r.boundary_right = std::cos(angles.beta) * end.y + std::sin(angles.beta) * end.dy;
  const auto gamma = transmission_residuals(problem.transmission(), minus, plus);
  r.transmission_1 = gamma[0];
  r.transmission_2 = gamma[1];
  r.char_value = char_w_value(problem, lambda_n, conv, cfg);
  r.interface_norm = std::hypot(std::hypot(minus.y, minus.dy), std::hypot(plus.y, plus.dy));

  if (std::abs(r.boundary_right) > 1e-6 * (1.0 + std::abs(end.y) + std::abs(end.dy))) {
    throw Error(ErrorCode::NotAnEigenvalue, "right boundary residual " + std::to_string(r.boundary_right) +
                                                " at lambda = " + std::to_string(lambda_n));
  }
  return out;
}

double weyl_count(const ValidatedProblem& problem, double lambda) {
  constexpr int kIntervals = 2048;
  double total = 0.0;
  for (Side side : {Side::Left, Side::Right}) {
    const auto& q = problem.potential().piece(side);
    const double a = side_begin(side);
    const double h = (side_end(side) - a) / kIntervals;
    double sum = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
      const double f = std::sqrt(std::max(0.0, lambda - q(a + h * i)));
      sum += (i == 0 || i == kIntervals ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0)) * f;
    }
    total += sum * h / 3.0;
  }
  return total / kPi;
}

std::vector<Root> find_roots_below(const ValidatedProblem& problem, double lambda_max, JumpConvention conv,
                                   const IntegratorConfig& cfg, const SpectrumOptions& opts) {
  const double lambda_min = default_lambda_min(problem, opts);
  if (!(lambda_max > lambda_min)) return {};
  const double s_max = lambda_max > 0.0 ? std::sqrt(lambda_max) : 0.0;
  auto grid = spectral_grid(lambda_min, s_max, opts.ds);
  while (!grid.empty() && grid.back() > lambda_max) grid.pop_back();
  if (grid.back() < lambda_max) grid.push_back(lambda_max);
  return collect_roots(problem, grid, conv, cfg, opts.refine_tol);
}

std::vector<Eigenpair> find_eigenvalues(const ValidatedProblem& problem, int count, JumpConvention conv,
                                        const IntegratorConfig& cfg, const SpectrumOptions& opts) {
  if (count < 1) throw Error(ErrorCode::ValidationError, "eigenvalue count must be at least 1");
  cfg.validate();
  const double lambda_min = default_lambda_min(problem, opts);
  double ds = opts.ds;
  std::string last_failure = "no attempt";

  for (int attempt = 0; attempt <= opts.max_refinements; ++attempt, ds /= 2.0) {
    double s_max = 0.5 * count + 2.0;
    if (lambda_min > 0.0) s_max += std::sqrt(lambda_min);
    std::vector<Root> roots;
    while (true) {
      roots = collect_roots(problem, spectral_grid(lambda_min, s_max, ds), conv, cfg, opts.refine_tol);
      if (static_cast<int>(roots.size()) >= count) break;
      if (s_max > 1e4) throw Error(ErrorCode::IncompleteSpectrum, "fewer eigenvalues than requested below s = 1e4");
      s_max = 1.5 * s_max + 1.0;
    }
    roots.resize(count);

    const double top = roots.back().lambda;
    const double expected = weyl_count(problem, top);
    if (std::abs(static_cast<double>(count) - expected) > opts.completeness_slack) {
      last_failure = std::to_string(count) + " eigenvalues up to " + std::to_string(top) +
                     " against a Weyl estimate of " + std::to_string(expected);
      continue;
    }

    std::vector<Eigenpair> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
      const auto& root = roots[i];
      auto assembled = assemble_eigenfunction(problem, root.lambda, conv, cfg);
      Eigenpair pair{i + 1,
                     root.lambda,
                     root.lambda > -opts.refine_tol ? std::optional<double>(std::sqrt(std::max(0.0, root.lambda)))
                                                     : std::nullopt,
                     root.multiplicity,
                     std::move(assembled.eigenfunction),
                     assembled.norm_sq,
                     assembled.residuals};
      pair.residuals.char_value = root.char_value;
      out.push_back(std::move(pair));
    }
    return out;
  }
  throw Error(ErrorCode::IncompleteSpectrum, last_failure);
}

double asymptotic_s(const CaseTag& tag, int n) {
  if (n < 1) throw Error(ErrorCode::ValidationError, "eigenvalue index must be >= 1");
  return tag.variant == ProblemCase::I ? n - 0.5 : 0.5 * n;
}

double asymptotic_eigenfunction(const CaseTag& tag, int n, double x, const AsymptoticParams& p,
                                EigenfunctionKeying keying) {
  if (x < -kPi - 1e-12 || x > kPi + 1e-12) throw Error(ErrorCode::ValidationError, "x must lie in [-pi, pi]");
  require_case(tag, p.alpha, p.beta);
  const double ratio = p.rho24 / p.rho12;
  const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
  const double half = 0.5 * n;

  if (keying == EigenfunctionKeying::Printed) {
    switch (tag.variant) {
      case ProblemCase::I: return sa * std::cos((n - 0.5) * (x + kPi));
      case ProblemCase::II: return ratio * sa * half * std::sin(half * kPi) * std::cos(half * x);
      case ProblemCase::III: return -2.0 * ca / n * std::sin(half * (x + kPi));
      case ProblemCase::IV: return -ratio * ca * std::cos(half * kPi) * std::cos(half * x);
    }
  }

  const double s = asymptotic_s(tag, n);
  if (x <= 0.0) {
    if (!tag.sin_alpha_zero) return sa * std::cos(s * (x + kPi));
    return -ca / s * std::sin(s * (x + kPi));
  }
  if (!tag.sin_alpha_zero) return ratio * sa * s * std::sin(s * kPi) * std::cos(s * x);
  return -ratio * ca * std::cos(s * kPi) * std::cos(s * x);
}

std::string to_string(TargetFamily family) {
  switch (family) {
    case TargetFamily::HalfStep: return "n/2";
    case TargetFamily::ShiftedInteger: return "n-1/2";
    case TargetFamily::Integer: return "n";
  }
  return "?";
}

TargetFamily target_family(const CaseTag& tag) {
  return tag.variant == ProblemCase::I ? TargetFamily::ShiftedInteger : TargetFamily::HalfStep;
}

double target_value(TargetFamily family, int n) {
  switch (family) {
    case TargetFamily::HalfStep: return 0.5 * n;
    case TargetFamily::ShiftedInteger: return n - 0.5;
    case TargetFamily::Integer: return n;
  }
  return 0.0;
}

TargetMatch match_target(double s, TargetFamily family) {
  int n = 0;
  switch (family) {
    case TargetFamily::HalfStep: n = static_cast<int>(std::lround(2.0 * s)); break;
    case TargetFamily::ShiftedInteger: n = static_cast<int>(std::lround(s + 0.5)); break;
    case TargetFamily::Integer: n = static_cast<int>(std::lround(s)); break;
  }
  n = std::max(n, 1);
  const double target = target_value(family, n);
  return {n, target, std::abs(s - target)};
}

AsymptoticFit fit_power_law(std::span<const int> n, std::span<const double> err, FitWindow window) {
  if (n.size() != err.size()) throw Error(ErrorCode::InternalError, "fit inputs are not aligned");
  std::vector<double> lx, ly;
  int in_window = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < window.n_min || n[i] > window.n_max || n[i] < 1) continue;
    ++in_window;
    if (err[i] > kFitResolution) {
      lx.push_back(std::log(static_cast<double>(n[i])));
      ly.push_back(std::log(err[i]));
    }
  }
  AsymptoticFit fit;
  fit.window = window;
  fit.points = static_cast<int>(lx.size());
  fit.exact_points = in_window - fit.points;
  if (in_window < 5) {
    throw Error(ErrorCode::DegenerateFit, "fit window holds " + std::to_string(in_window) + " points (need 5)");
  }
  if (lx.empty()) {
    fit.exact_match = true;
    fit.exponent = std::numeric_limits<double>::infinity();
    return fit;
  }
  if (lx.size() < 2) throw Error(ErrorCode::DegenerateFit, "only one nonzero error in the fit window");
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = m * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw Error(ErrorCode::DegenerateFit, "all fit points share one n");
  const double slope = (m * sxy - sx * sy) / denom;
  fit.exponent = -slope;
  fit.constant = std::exp((sy - slope * sx) / m);
  return fit;
}

AsymptoticFit convergence_fit(std::span<const double> s_values, TargetFamily family, FitWindow window) {
  std::vector<int> ns;
  std::vector<double> errs;
  for (double s : s_values) {
    if (!std::isfinite(s)) continue;
    const auto m = match_target(s, family);
    ns.push_back(m.n);
    errs.push_back(m.error);
  }
  auto fit = fit_power_law(ns, errs, window);
  fit.family = family;
  return fit;
}

AsymptoticFit convergence_fit(std::span<const double> s_values, const CaseTag& tag, FitWindow window) {
  return convergence_fit(s_values, target_family(tag), window);
}

SpectrumReport make_spectrum_report(std::vector<Eigenpair> eigenpairs, const CaseTag& tag, FitWindow window) {
  SpectrumReport report;
  report.tag = tag;
  std::vector<double> s_values;
  for (const auto& e : eigenpairs) {
    if (e.s) {
      report.matches.push_back(match_target(*e.s, target_family(tag)));
      s_values.push_back(*e.s);
    } else {
      report.matches.push_back(std::nullopt);
    }
  }
  try {
    report.fit = convergence_fit(s_values, tag, window);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateFit) throw;
  }
  if (tag.variant == ProblemCase::I) {
    try {
      report.integer_fit = convergence_fit(s_values, TargetFamily::Integer, window);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFit) throw;
    }
  }
  report.eigenpairs = std::move(eigenpairs);
  return report;
}

}  // namespace tsl
