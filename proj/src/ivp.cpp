#include "tsl/ivp.hpp"

#include <algorithm>
#include <cmath>

#include "tsl/errors.hpp"

namespace tsl {
namespace {

struct Vec2 {
  double y;
  double dy;
};

Vec2 axpy(const Vec2& base, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
  Vec2 out = base;
  for (const auto& [c, k] : terms) {
    out.y += h * c * k->y;
    out.dy += h * c * k->dy;
  }
  return out;
}

class Rhs {
 public:
  Rhs(const PiecePotential& q, double lambda) : q_(q), lambda_(lambda) {}
  Vec2 operator()(double x, const Vec2& v) const { return {v.dy, (q_(x) - lambda_) * v.y}; }
  double curvature(double x, double y) const { return (q_(x) - lambda_) * y; }

 private:
  const PiecePotential& q_;
  double lambda_;
};

void require_finite(const Vec2& v, double x) {
  if (!std::isfinite(v.y) || !std::isfinite(v.dy)) {
    throw Error(ErrorCode::NonFiniteState, "solution overflowed near x = " + std::to_string(x));
  }
}

// Dormand-Prince 5(4) coefficients.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

class Stepper {
 public:
  Stepper(const PiecePotential& q, double lambda, const IntegratorConfig& cfg)
      : rhs_(q, lambda), cfg_(cfg), lambda_(lambda) {}

  // Advances (x, v) to exactly `target`.
  void advance(double& x, Vec2& v, double target) {
    if (x == target) return;
    if (cfg_.method == IntegrationMethod::FixedRk4) {
      advance_rk4(x, v, target);
    } else {
      advance_dopri(x, v, target);
    }
  }

 private:
  void advance_rk4(double& x, Vec2& v, double target) {
    const double span = target - x;
    const auto n = static_cast<long>(std::ceil(std::abs(span) / cfg_.fixed_step - 1e-9));
    const double h = span / static_cast<double>(std::max(1L, n));
    const double x0 = x;
    for (long i = 0; i < std::max(1L, n); ++i) {
      const double xi = x0 + static_cast<double>(i) * h;
      const Vec2 k1 = rhs_(xi, v);
      const Vec2 k2 = rhs_(xi + h / 2, axpy(v, h, {{0.5, &k1}}));
      const Vec2 k3 = rhs_(xi + h / 2, axpy(v, h, {{0.5, &k2}}));
      const Vec2 k4 = rhs_(xi + h, axpy(v, h, {{1.0, &k3}}));
      v = axpy(v, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
      require_finite(v, xi + h);
    }
    x = target;
  }

  void advance_dopri(double& x, Vec2& v, double target) {
    using namespace dp;
    const double dir = target > x ? 1.0 : -1.0;
    if (h_ == 0.0) h_ = std::min(std::abs(target - x), 0.1 / (1.0 + std::sqrt(std::abs(lambda_))));
    while (x != target) {
      const double remaining = std::abs(target - x);
      double h = std::min(h_, remaining);
      bool last = h >= remaining * (1.0 - 1e-12);
      if (last) h = remaining;
      h *= dir;

      const Vec2 k1 = rhs_(x, v);
      const Vec2 k2 = rhs_(x + c2 * h, axpy(v, h, {{a21, &k1}}));
      const Vec2 k3 = rhs_(x + c3 * h, axpy(v, h, {{a31, &k1}, {a32, &k2}}));
      const Vec2 k4 = rhs_(x + c4 * h, axpy(v, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Vec2 k5 = rhs_(x + c5 * h, axpy(v, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Vec2 k6 = rhs_(x + h, axpy(v, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const Vec2 next = axpy(v, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const Vec2 k7 = rhs_(x + h, next);
      const Vec2 err = axpy({0.0, 0.0}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

      const double sy = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(v.y), std::abs(next.y));
      const double sdy = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(v.dy), std::abs(next.dy));
      const double norm = std::max(std::abs(err.y) / sy, std::abs(err.dy) / sdy);
      if (!std::isfinite(norm)) {
        throw Error(ErrorCode::NonFiniteState, "solution overflowed near x = " + std::to_string(x));
      }

      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        x = last ? target : x + h;
        v = next;
        require_finite(v, x);
        // A step clipped to land on the target says nothing about the achievable size.
        if (!last || std::abs(h) >= h_) h_ = std::abs(h) * factor;
      } else {
        h_ = std::abs(h) * std::min(1.0, factor);
        if (h_ < 1e-14 * std::max(1.0, std::abs(x))) {
          throw Error(ErrorCode::StepFailure, "step size underflow near x = " + std::to_string(x));
        }
      }
    }
  }

  Rhs rhs_;
  const IntegratorConfig& cfg_;
  double lambda_;
  double h_ = 0.0;
};

// Breakpoints strictly between a and b, ordered from a towards b.
std::vector<double> interior_breakpoints(const PiecePotential& q, double a, double b) {
  std::vector<double> out;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  for (double p : q.breakpoints()) {
    if (p > lo && p < hi) out.push_back(p);
  }
  if (b < a) std::reverse(out.begin(), out.end());
  return out;
}

void check_span(double from, double to) {
  if (!(from != to) || !std::isfinite(from) || !std::isfinite(to)) {
    throw Error(ErrorCode::ValidationError, "integration span must have distinct finite endpoints");
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw Error(ErrorCode::ValidationError, "tolerances must be positive");
  if (!(fixed_step > 0.0)) throw Error(ErrorCode::ValidationError, "fixed step must be positive");
  if (mesh_intervals < 64 || mesh_intervals % 2 != 0) {
    throw Error(ErrorCode::ValidationError, "mesh_intervals must be even and at least 64");
  }
}

SolutionPath::SolutionPath(double lambda, std::vector<StatePair> states, std::vector<double> curvature)
    : lambda_(lambda), states_(std::move(states)), curvature_(std::move(curvature)) {
  if (states_.size() < 2 || curvature_.size() != states_.size()) {
    throw Error(ErrorCode::InternalError, "solution path needs at least two aligned nodes");
  }
  side_ = std::max(states_.front().x, states_.back().x) <= 0.0 ? Side::Left : Side::Right;
}

StatePair SolutionPath::at(double x) const {
  const bool ascending = states_.back().x > states_.front().x;
  auto before = [ascending](const StatePair& s, double v) { return ascending ? s.x < v : s.x > v; };
  auto it = std::lower_bound(states_.begin(), states_.end(), x, before);
  std::size_t i = static_cast<std::size_t>(it - states_.begin());
  if (i < states_.size() && std::abs(states_[i].x - x) <= 1e-13 * (1.0 + std::abs(x))) return states_[i];
  if (i > 0 && std::abs(states_[i - 1].x - x) <= 1e-13 * (1.0 + std::abs(x))) return states_[i - 1];
  if (i == 0 || i == states_.size()) {
    throw Error(ErrorCode::SideMismatch, "x = " + std::to_string(x) + " lies outside the solution path");
  }
  const StatePair& a = states_[i - 1];
  const StatePair& b = states_[i];
  const double h = b.x - a.x;
  const double t = (x - a.x) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return {x, h00 * a.y + h10 * h * a.dy + h01 * b.y + h11 * h * b.dy,
          h00 * a.dy + h10 * h * curvature_[i - 1] + h01 * b.dy + h11 * h * curvature_[i]};
}

SolutionPath integrate_ivp(const PiecePotential& q, double lambda, double from, double to, StatePair init,
                           const IntegratorConfig& cfg) {
  check_span(from, to);
  cfg.validate();
  Stepper stepper(q, lambda, cfg);
  const Rhs rhs(q, lambda);
  const int n = cfg.mesh_intervals;
  const auto breaks = interior_breakpoints(q, from, to);

  std::vector<StatePair> states;
  std::vector<double> curvature;
  states.reserve(n + 1);
  curvature.reserve(n + 1);
  double x = from;
  Vec2 v{init.y, init.dy};
  require_finite(v, x);
  states.push_back({x, v.y, v.dy});
  curvature.push_back(rhs.curvature(x, v.y));

  auto next_break = breaks.begin();
  const bool forward = to > from;
  for (int i = 1; i <= n; ++i) {
    const double node = i == n ? to : from + (to - from) * static_cast<double>(i) / n;
    while (next_break != breaks.end() && (forward ? *next_break < node : *next_break > node)) {
      stepper.advance(x, v, *next_break++);
    }
    stepper.advance(x, v, node);
    states.push_back({node, v.y, v.dy});
    curvature.push_back(rhs.curvature(node, v.y));
  }
  return SolutionPath(lambda, std::move(states), std::move(curvature));
}

StatePair shoot(const PiecePotential& q, double lambda, double from, double to, StatePair init,
                const IntegratorConfig& cfg) {
  check_span(from, to);
  Stepper stepper(q, lambda, cfg);
  double x = from;
  Vec2 v{init.y, init.dy};
  for (double b : interior_breakpoints(q, from, to)) stepper.advance(x, v, b);
  stepper.advance(x, v, to);
  return {to, v.y, v.dy};
}

StatePair constant_q_closed_form(double q0, double lambda, double from, StatePair init, double at) {
  const double d = at - from;
  const double k2 = lambda - q0;
  if (k2 > 0.0) {
    const double k = std::sqrt(k2);
    const double c = std::cos(k * d);
    const double s = std::sin(k * d);
    return {at, init.y * c + init.dy / k * s, -init.y * k * s + init.dy * c};
  }
  if (k2 < 0.0) {
    const double k = std::sqrt(-k2);
    const double c = std::cosh(k * d);
    const double s = std::sinh(k * d);
    return {at, init.y * c + init.dy / k * s, init.y * k * s + init.dy * c};
  }
  return {at, init.y + init.dy * d, init.dy};
}

}  // namespace tsl
