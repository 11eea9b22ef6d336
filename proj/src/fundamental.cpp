#include "tsl/fundamental.hpp"

#include <cmath>

namespace tsl {
namespace {

void require_denominator(double d, const char* name) {
  if (!(std::abs(d) >= kRhoFloor)) {
    throw Error(ErrorCode::SingularJump, std::string(name) + " vanishes; the jump map is undefined");
  }
}

// Conjugates a map on slot pairs into (y, y') coordinates.
Mat2 in_value_coordinates(const Mat2& slots, ColumnConvention columns) {
  if (columns == ColumnConvention::ValueFirst) return slots;
  return {slots.a22, slots.a21, slots.a12, slots.a11};
}

std::array<double, 4> slot_values(ColumnConvention columns, const StatePair& minus, const StatePair& plus) {
  if (columns == ColumnConvention::ValueFirst) return {minus.y, minus.dy, plus.y, plus.dy};
  return {minus.dy, minus.y, plus.dy, plus.y};
}

struct VolterraSetup {
  double x0;
  double x1;
  double a;  // y(x0)
  double b;  // y'(x0)
  const PiecePotential* q;
};

// y(x) = a cos(s(x-x0)) + (b/s) sin(s(x-x0)) + (1/s) int_{x0}^{x} sin(s(x-z)) q(z) y(z) dz
PicardSolution solve_volterra(const VolterraSetup& setup, double lambda, const PicardConfig& cfg) {
  const int n = cfg.mesh_intervals;
  const double s = std::sqrt(lambda);
  const double h = (setup.x1 - setup.x0) / n;

  std::vector<double> x(n + 1), qv(n + 1), sn(n + 1), cs(n + 1), hom(n + 1), dhom(n + 1);
  for (int j = 0; j <= n; ++j) {
    x[j] = j == n ? setup.x1 : setup.x0 + h * j;
    qv[j] = (*setup.q)(x[j]);
    const double theta = s * (x[j] - setup.x0);
    sn[j] = std::sin(theta);
    cs[j] = std::cos(theta);
    hom[j] = setup.a * cs[j] + setup.b / s * sn[j];
    dhom[j] = -setup.a * s * sn[j] + setup.b * cs[j];
  }

  // Oriented composite Simpson weights for int_{x0}^{x_j}; odd j starts with the
  // three-point rule on the first interval.
  auto weight = [h](int j, int m) {
    if (j == 0) return 0.0;
    if (j % 2 == 0) {
      if (m == 0 || m == j) return h / 3.0;
      return (m % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    }
    double w = 0.0;
    if (m == 0) w += 5.0 * h / 12.0;
    if (m == 1) w += 8.0 * h / 12.0;
    if (m == 2) w -= h / 12.0;
    if (j >= 3 && m >= 1) {
      if (m == 1 || m == j) w += h / 3.0;
      else w += ((m - 1) % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
    }
    return w;
  };
  auto support = [](int j) { return j % 2 == 0 ? j : std::max(j, 2); };

  // Kernel sin(s(x_j - x_m)) = sn_j cs_m - cs_j sn_m, integrand f_m = q_m y_m.
  std::vector<double> y = hom, next(n + 1), f(n + 1);
  int iterations = 0;
  double diff = 0.0;
  while (true) {
    ++iterations;
    for (int m = 0; m <= n; ++m) f[m] = qv[m] * y[m];
    diff = 0.0;
    for (int j = 0; j <= n; ++j) {
      double acc = 0.0;
      for (int m = 0; m <= support(j); ++m) acc += weight(j, m) * (sn[j] * cs[m] - cs[j] * sn[m]) * f[m];
      next[j] = hom[j] + acc / s;
      diff = std::max(diff, std::abs(next[j] - y[j]));
    }
    y.swap(next);
    if (diff < cfg.tolerance || iterations >= cfg.max_iterations) break;
  }
  if (diff >= cfg.tolerance && diff > 1e-6) {
    throw Error(ErrorCode::NoConvergence,
                "Picard iteration stalled at sup difference " + std::to_string(diff));
  }

  std::vector<StatePair> states(n + 1);
  std::vector<double> curvature(n + 1);
  for (int m = 0; m <= n; ++m) f[m] = qv[m] * y[m];
  for (int j = 0; j <= n; ++j) {
    double acc = 0.0;
    for (int m = 0; m <= support(j); ++m) acc += weight(j, m) * (cs[j] * cs[m] + sn[j] * sn[m]) * f[m];
    states[j] = {x[j], y[j], dhom[j] + acc};
    curvature[j] = (qv[j] - lambda) * y[j];
  }
  return {SolutionPath(lambda, std::move(states), std::move(curvature)), iterations, diff};
}

}  // namespace

std::string to_string(JumpConvention conv) {
  return conv == JumpConvention::CramerSolve ? "cramer" : "paper";
}

Mat2 left_jump_matrix(const RhoSet& r, JumpConvention conv, ColumnConvention columns) {
  if (conv == JumpConvention::PaperLiteral) {
    require_denominator(r.r12, "rho12");
    return {r.r23 / r.r12, r.r24 / r.r12, -r.r13 / r.r12, -r.r14 / r.r12};
  }
  require_denominator(r.r34, "rho34");
  return in_value_coordinates({-r.r14 / r.r34, -r.r24 / r.r34, r.r13 / r.r34, r.r23 / r.r34}, columns);
}

Mat2 right_jump_matrix(const RhoSet& r, JumpConvention conv, ColumnConvention columns) {
  if (conv == JumpConvention::PaperLiteral) {
    require_denominator(r.r34, "rho34");
    return {-r.r14 / r.r34, -r.r24 / r.r34, r.r13 / r.r34, r.r23 / r.r34};
  }
  require_denominator(r.r12, "rho12");
  return in_value_coordinates({r.r23 / r.r12, r.r24 / r.r12, -r.r13 / r.r12, -r.r14 / r.r12}, columns);
}

StatePair left_jump(const StatePair& at_0minus, const RhoSet& rho, JumpConvention conv, ColumnConvention columns) {
  return left_jump_matrix(rho, conv, columns).apply(at_0minus, 0.0);
}

StatePair right_jump(const StatePair& at_0plus, const RhoSet& rho, JumpConvention conv, ColumnConvention columns) {
  return right_jump_matrix(rho, conv, columns).apply(at_0plus, 0.0);
}

std::array<double, 2> transmission_residuals(const TransmissionMatrix& t, const StatePair& minus,
                                             const StatePair& plus) {
  const auto c = slot_values(t.columns, minus, plus);
  std::array<double, 2> out{};
  for (int i = 0; i < 4; ++i) {
    out[0] += t.row_a[i] * c[i];
    out[1] += t.row_b[i] * c[i];
  }
  return out;
}

FundamentalPair build_phi(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                          const IntegratorConfig& cfg) {
  const auto& angles = problem.angles();
  const StatePair init{-kPi, std::sin(angles.alpha), -std::cos(angles.alpha)};
  SolutionPath left = integrate_ivp(problem.potential().left, lambda, -kPi, 0.0, init, cfg);
  const StatePair across = left_jump(left.back(), problem.rho(), conv, problem.transmission().columns);
  SolutionPath right = integrate_ivp(problem.potential().right, lambda, 0.0, kPi, across, cfg);
  return {std::move(left), std::move(right), lambda, FundamentalKind::Phi, conv};
}

FundamentalPair build_chi(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                          const IntegratorConfig& cfg) {
  const auto& angles = problem.angles();
  const StatePair init{kPi, -std::sin(angles.beta), std::cos(angles.beta)};
  SolutionPath right = integrate_ivp(problem.potential().right, lambda, kPi, 0.0, init, cfg);
  const StatePair across = right_jump(right.back(), problem.rho(), conv, problem.transmission().columns);
  SolutionPath left = integrate_ivp(problem.potential().left, lambda, 0.0, -kPi, across, cfg);
  return {std::move(left), std::move(right), lambda, FundamentalKind::Chi, conv};
}

PicardSolution picard_solve(FundamentalPiece which, const ValidatedProblem& problem, double lambda,
                            const PicardConfig& cfg, JumpConvention conv) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::ValidationError, "Picard oracle needs lambda > 0");
  if (cfg.max_iterations < 1 || cfg.mesh_intervals < 2 || cfg.mesh_intervals % 2 != 0) {
    throw Error(ErrorCode::ValidationError, "Picard config needs >= 1 iteration and an even mesh");
  }
  const auto& angles = problem.angles();
  const auto& q = problem.potential();
  const auto columns = problem.transmission().columns;
  switch (which) {
    case FundamentalPiece::Phi1:
      return solve_volterra({-kPi, 0.0, std::sin(angles.alpha), -std::cos(angles.alpha), &q.left}, lambda, cfg);
    case FundamentalPiece::Chi2:
      return solve_volterra({kPi, 0.0, -std::sin(angles.beta), std::cos(angles.beta), &q.right}, lambda, cfg);
    case FundamentalPiece::Phi2: {
      const auto phi1 = picard_solve(FundamentalPiece::Phi1, problem, lambda, cfg, conv);
      const auto across = left_jump(phi1.path.back(), problem.rho(), conv, columns);
      return solve_volterra({0.0, kPi, across.y, across.dy, &q.right}, lambda, cfg);
    }
    case FundamentalPiece::Chi1: {
      const auto chi2 = picard_solve(FundamentalPiece::Chi2, problem, lambda, cfg, conv);
      const auto across = right_jump(chi2.path.back(), problem.rho(), conv, columns);
      return solve_volterra({0.0, -kPi, across.y, across.dy, &q.left}, lambda, cfg);
    }
  }
  throw Error(ErrorCode::InternalError, "unknown fundamental piece");
}

AsymptoticParams AsymptoticParams::from(const ValidatedProblem& problem) {
  const auto& r = problem.rho();
  return {problem.angles().alpha, problem.angles().beta, r.r12, r.r24, r.r34};
}

void require_case(const CaseTag& tag, double alpha, double beta) {
  const auto actual = classify_case({alpha, beta});
  if (actual.sin_alpha_zero != tag.sin_alpha_zero || actual.sin_beta_zero != tag.sin_beta_zero) {
    throw Error(ErrorCode::CaseMismatch, "case " + to_string(tag.variant) + " does not match the angles (case " +
                                             to_string(actual.variant) + ")");
  }
}

double asymptotic_fundamental(FundamentalPiece which, const CaseTag& tag, double s, double x, int k,
                              const AsymptoticParams& p) {
  if (!(s > 0.0)) throw Error(ErrorCode::ValidationError, "asymptotic terms need real s > 0");
  if (k != 0 && k != 1) throw Error(ErrorCode::ValidationError, "k must be 0 or 1");
  require_case(tag, p.alpha, p.beta);

  const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
  const double sb = std::sin(p.beta), cb = std::cos(p.beta);
  // d^k/dx^k of cos(s u) and sin(s u) where u = x + pi, pi - x or x.
  auto dcos = [k, s](double u, double du) { return k == 0 ? std::cos(s * u) : -s * du * std::sin(s * u); };
  auto dsin = [k, s](double u, double du) { return k == 0 ? std::sin(s * u) : s * du * std::cos(s * u); };

  switch (which) {
    case FundamentalPiece::Phi1:
      if (!tag.sin_alpha_zero) return sa * dcos(x + kPi, 1.0);
      return -ca / s * dsin(x + kPi, 1.0);
    case FundamentalPiece::Phi2:
      if (!tag.sin_alpha_zero) return p.rho24 / p.rho12 * sa * s * std::sin(s * kPi) * dcos(x, 1.0);
      return -p.rho24 / p.rho12 * ca * std::cos(s * kPi) * dcos(x, 1.0);
    case FundamentalPiece::Chi2:
      if (!tag.sin_beta_zero) return sb * dcos(kPi - x, -1.0);
      return -cb / s * dsin(kPi - x, -1.0);
    case FundamentalPiece::Chi1:
      if (!tag.sin_beta_zero) return -p.rho24 / p.rho34 * sb * s * std::sin(s * kPi) * dcos(x, 1.0);
      return -p.rho24 / p.rho34 * cb * std::cos(s * kPi) * dcos(x, 1.0);
  }
  throw Error(ErrorCode::InternalError, "unknown fundamental piece");
}

}  // namespace tsl
