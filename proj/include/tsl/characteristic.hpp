#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tsl/fundamental.hpp"

namespace tsl {

/// W[p, q](x) = p q' - q p'. Both paths must be on the same side at the same lambda.
double wronskian_at(const SolutionPath& p, const SolutionPath& q, double x);

struct WronskianSpread {
  double min;
  double max;
  double spread() const { return max - min; }
};

/// W[p, q] evaluated at every mesh node of p.
WronskianSpread wronskian_spread(const SolutionPath& p, const SolutionPath& q);

struct CharacteristicSample {
  double lambda = 0.0;
  std::optional<double> s;  // sqrt(lambda) for lambda >= 0
  double w1 = 0.0;          // W[phi1, chi1] at 0-
  double w2 = 0.0;          // W[phi2, chi2] at 0+
  double w = 0.0;           // rho12 * w2
  double w_boundary_form = 0.0;  // cos(beta) phi2(pi) + sin(beta) phi2'(pi)
  double consistency_residual = 0.0;
};

struct CharacteristicCurve {
  std::vector<CharacteristicSample> samples;
};

/// Builds phi and chi at lambda and reports both Wronskians, w and the boundary form.
CharacteristicSample char_w(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                            const IntegratorConfig& cfg);

/// w(lambda) = rho12 (cos(beta) phi2(pi) + sin(beta) phi2'(pi)) from phi alone, no dense mesh.
double char_w_value(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                    const IntegratorConfig& cfg);

/// w(lambda) from the closed-form piece solutions; both potential pieces must be constant.
double char_w_closed_form(const ValidatedProblem& problem, double lambda, JumpConvention conv);

/// Samples char_w over a strictly increasing grid.
CharacteristicCurve sample_curve(const ValidatedProblem& problem, std::span<const double> grid, JumpConvention conv,
                                 const IntegratorConfig& cfg);

/// w2 / w1 implied by the active jump map (its determinant).
double jump_determinant(const ValidatedProblem& problem, JumpConvention conv);

/// Printed four-case leading term of w for real s > 0, remainder dropped.
double char_w_asymptotic(const CaseTag& tag, double s, const AsymptoticParams& params);

}  // namespace tsl
