#pragma once

#include <span>
#include <vector>

#include "tsl/interval.hpp"
#include "tsl/potential.hpp"

namespace tsl {

/// (x, y, y') for a solution of -y'' + q y = lambda y.
struct StatePair {
  double x = 0.0;
  double y = 0.0;
  double dy = 0.0;
};

enum class IntegrationMethod { FixedRk4, AdaptiveDopri };

struct IntegratorConfig {
  IntegrationMethod method = IntegrationMethod::AdaptiveDopri;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  /// Upper bound on the step of the fixed-step method.
  double fixed_step = 1e-3;
  /// Uniform reporting mesh intervals per subinterval (dense output).
  int mesh_intervals = 512;

  /// Throws ValidationError for non-positive tolerances/steps or a mesh below 64 intervals.
  void validate() const;
};

/// One solution piece sampled on a uniform mesh running in integration direction.
class SolutionPath {
 public:
  SolutionPath(double lambda, std::vector<StatePair> states, std::vector<double> curvature);

  Side side() const noexcept { return side_; }
  double lambda() const noexcept { return lambda_; }
  std::span<const StatePair> states() const noexcept { return states_; }
  std::span<const double> curvature() const noexcept { return curvature_; }
  std::size_t size() const noexcept { return states_.size(); }
  const StatePair& front() const { return states_.front(); }
  const StatePair& back() const { return states_.back(); }

  /// Exact at mesh nodes; cubic Hermite in (y, y') and (y', y'') between them.
  StatePair at(double x) const;

 private:
  double lambda_;
  Side side_;
  std::vector<StatePair> states_;
  std::vector<double> curvature_;  // y'' = (q - lambda) y at each node
};

/// Integrates y'' = (q(x) - lambda) y from `from` to `to` (either direction).
/// The value of init.x is ignored; the path starts at `from`.
SolutionPath integrate_ivp(const PiecePotential& q, double lambda, double from, double to, StatePair init,
                           const IntegratorConfig& cfg);

/// Same integration without recording a mesh; returns the terminal state only.
StatePair shoot(const PiecePotential& q, double lambda, double from, double to, StatePair init,
                const IntegratorConfig& cfg);

/// Exact solution of y'' = (q0 - lambda) y through init at `from`, evaluated at `at`.
StatePair constant_q_closed_form(double q0, double lambda, double from, StatePair init, double at);

}  // namespace tsl
