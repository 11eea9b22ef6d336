#include "tsl/characteristic.hpp"

#include <algorithm>
#include <cmath>

namespace tsl {

double wronskian_at(const SolutionPath& p, const SolutionPath& q, double x) {
  if (p.side() != q.side()) throw Error(ErrorCode::SideMismatch, "Wronskian of paths on different sides");
  if (p.lambda() != q.lambda()) throw Error(ErrorCode::SideMismatch, "Wronskian of paths at different lambda");
  const StatePair a = p.at(x);
  const StatePair b = q.at(x);
  return a.y * b.dy - b.y * a.dy;
}

WronskianSpread wronskian_spread(const SolutionPath& p, const SolutionPath& q) {
  WronskianSpread out{INFINITY, -INFINITY};
  for (const auto& node : p.states()) {
    const double w = wronskian_at(p, q, node.x);
    out.min = std::min(out.min, w);
    out.max = std::max(out.max, w);
  }
  return out;
}

double jump_determinant(const ValidatedProblem& problem, JumpConvention conv) {
  return left_jump_matrix(problem.rho(), conv, problem.transmission().columns).det();
}

CharacteristicSample char_w(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                            const IntegratorConfig& cfg) {
  const auto phi = build_phi(problem, lambda, conv, cfg);
  const auto chi = build_chi(problem, lambda, conv, cfg);
  const auto& rho = problem.rho();
  const double beta = problem.angles().beta;

  CharacteristicSample out;
  out.lambda = lambda;
  if (lambda >= 0.0) out.s = std::sqrt(lambda);
  out.w1 = wronskian_at(phi.left, chi.left, 0.0);
  out.w2 = wronskian_at(phi.right, chi.right, 0.0);
  out.w = rho.r12 * out.w2;
  const StatePair end = phi.right.back();
  out.w_boundary_form = std::cos(beta) * end.y + std::sin(beta) * end.dy;
  out.consistency_residual = conv == JumpConvention::PaperLiteral ? std::abs(rho.r34 * out.w1 - rho.r12 * out.w2)
                                                                  : std::abs(rho.r12 * out.w1 - rho.r34 * out.w2);
  return out;
}

double char_w_value(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                    const IntegratorConfig& cfg) {
  const auto& angles = problem.angles();
  const StatePair init{-kPi, std::sin(angles.alpha), -std::cos(angles.alpha)};
  const StatePair minus = shoot(problem.potential().left, lambda, -kPi, 0.0, init, cfg);
  const StatePair plus = left_jump(minus, problem.rho(), conv, problem.transmission().columns);
  const StatePair end = shoot(problem.potential().right, lambda, 0.0, kPi, plus, cfg);
  return problem.rho().r12 * (std::cos(angles.beta) * end.y + std::sin(angles.beta) * end.dy);
}

double char_w_closed_form(const ValidatedProblem& problem, double lambda, JumpConvention conv) {
  const auto q_left = problem.potential().left.constant_value();
  const auto q_right = problem.potential().right.constant_value();
  if (!q_left || !q_right) {
    throw Error(ErrorCode::ValidationError, "closed-form w needs a constant potential on both pieces");
  }
  const auto& angles = problem.angles();
  const StatePair init{-kPi, std::sin(angles.alpha), -std::cos(angles.alpha)};
  const StatePair minus = constant_q_closed_form(*q_left, lambda, -kPi, init, 0.0);
  const StatePair plus = left_jump(minus, problem.rho(), conv, problem.transmission().columns);
  const StatePair end = constant_q_closed_form(*q_right, lambda, 0.0, plus, kPi);
  return problem.rho().r12 * (std::cos(angles.beta) * end.y + std::sin(angles.beta) * end.dy);
}

CharacteristicCurve sample_curve(const ValidatedProblem& problem, std::span<const double> grid, JumpConvention conv,
                                 const IntegratorConfig& cfg) {
  if (!std::is_sorted(grid.begin(), grid.end(), std::less_equal<>())) {
    throw Error(ErrorCode::ValidationError, "characteristic grid must be strictly increasing");
  }
  CharacteristicCurve curve;
  curve.samples.reserve(grid.size());
  for (double lambda : grid) curve.samples.push_back(char_w(problem, lambda, conv, cfg));
  return curve;
}

double char_w_asymptotic(const CaseTag& tag, double s, const AsymptoticParams& p) {
  if (!(s > 0.0)) throw Error(ErrorCode::ValidationError, "asymptotic terms need real s > 0");
  require_case(tag, p.alpha, p.beta);
  const double ratio = p.rho24 / p.rho12;
  const double sa = std::sin(p.alpha), ca = std::cos(p.alpha);
  const double sb = std::sin(p.beta), cb = std::cos(p.beta);
  const double sn = std::sin(s * kPi), cs = std::cos(s * kPi);
  switch (tag.variant) {
    case ProblemCase::I: return -ratio * sa * sb * s * s * sn * sn;
    case ProblemCase::II: return ratio * ca * sb * s * cs * sn;
    case ProblemCase::III: return ratio * sa * cb * s * sn * cs;
    case ProblemCase::IV: return -ratio * cb * ca * cs * cs;
  }
  throw Error(ErrorCode::InternalError, "unknown case");
}

}  // namespace tsl
