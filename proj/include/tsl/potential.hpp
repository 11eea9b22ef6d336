#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tsl/interval.hpp"

namespace tsl {

struct ZeroForm {};

struct ConstantForm {
  double value = 0.0;
};

/// amplitude * cos(frequency * x)
struct CosineForm {
  double amplitude = 1.0;
  double frequency = 1.0;
};

/// c0 + c1 x + c2 x^2 + ...
struct PolynomialForm {
  std::vector<double> coefficients;
};

/// Tabulated values; order 1 is piecewise linear, order 3 a clamped cubic spline.
struct TableForm {
  std::vector<double> x;
  std::vector<double> values;
  int order = 3;
};

using PotentialForm = std::variant<ZeroForm, ConstantForm, CosineForm, PolynomialForm, TableForm>;

/// The potential q on one side of the interface.
class PiecePotential {
 public:
  PiecePotential() = default;
  explicit PiecePotential(PotentialForm form);

  double operator()(double x) const;

  const PotentialForm& form() const noexcept { return form_; }

  /// Points where q is only piecewise smooth. Integration steps never straddle these.
  std::span<const double> breakpoints() const noexcept;

  /// Set for zero and constant forms.
  std::optional<double> constant_value() const;

  /// Sampled sup |q| over [a, b] (breakpoints included).
  double sup_abs(double a, double b) const;

  /// True when the form is defined on all of [a, b] with finite values.
  bool evaluable_on(double a, double b) const;

  std::string describe() const;

 private:
  PotentialForm form_ = ZeroForm{};
  std::vector<double> second_derivs_;  // spline moments for order-3 tables
};

struct PotentialSpec {
  PiecePotential left;
  PiecePotential right;

  const PiecePotential& piece(Side side) const { return side == Side::Left ? left : right; }

  static PotentialSpec uniform(const PiecePotential& q) { return {q, q}; }
};

}  // namespace tsl
