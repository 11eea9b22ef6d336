#include "tsl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsl/errors.hpp"

namespace tsl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Derivative at x[0] of the quadratic through the first three nodes.
double one_sided_slope(double x0, double x1, double x2, double y0, double y1, double y2) {
  return y0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
         y1 * (x0 - x2) / ((x1 - x0) * (x1 - x2)) + y2 * (x0 - x1) / ((x2 - x0) * (x2 - x1));
}

std::vector<double> clamped_spline_moments(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double d0 = (y[1] - y[0]) / (x[1] - x[0]);
  double dn = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  if (n >= 3) {
    d0 = one_sided_slope(x[0], x[1], x[2], y[0], y[1], y[2]);
    dn = one_sided_slope(x[n - 1], x[n - 2], x[n - 3], y[n - 1], y[n - 2], y[n - 3]);
  }

  std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
  const double h0 = x[1] - x[0];
  diag[0] = 2.0 * h0;
  sup[0] = h0;
  rhs[0] = 6.0 * ((y[1] - y[0]) / h0 - d0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x[i] - x[i - 1];
    const double hr = x[i + 1] - x[i];
    sub[i] = hl;
    diag[i] = 2.0 * (hl + hr);
    sup[i] = hr;
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl);
  }
  const double hn = x[n - 1] - x[n - 2];
  sub[n - 1] = hn;
  diag[n - 1] = 2.0 * hn;
  rhs[n - 1] = 6.0 * (dn - (y[n - 1] - y[n - 2]) / hn);

  // Thomas sweep; the system is strictly diagonally dominant.
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> moments(n);
  moments[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    moments[i] = (rhs[i] - sup[i] * moments[i + 1]) / diag[i];
  }
  return moments;
}

double evaluate_table(const TableForm& t, const std::vector<double>& moments, double x) {
  const auto& xs = t.x;
  const auto& ys = t.values;
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto upper = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(upper - xs.begin()) - 1;
  const double h = xs[i + 1] - xs[i];
  const double a = xs[i + 1] - x;
  const double b = x - xs[i];
  if (t.order == 1) {
    return (ys[i] * a + ys[i + 1] * b) / h;
  }
  return moments[i] * a * a * a / (6.0 * h) + moments[i + 1] * b * b * b / (6.0 * h) +
         (ys[i] / h - moments[i] * h / 6.0) * a + (ys[i + 1] / h - moments[i + 1] * h / 6.0) * b;
}

}  // namespace

PiecePotential::PiecePotential(PotentialForm form) : form_(std::move(form)) {
  if (auto* table = std::get_if<TableForm>(&form_)) {
    if (table->x.size() != table->values.size() || table->x.size() < 2) {
      throw Error(ErrorCode::ValidationError, "table potential needs at least two (x, value) pairs");
    }
    if (table->order != 1 && table->order != 3) {
      throw Error(ErrorCode::ValidationError, "table interpolation order must be 1 or 3");
    }
    for (std::size_t i = 1; i < table->x.size(); ++i) {
      if (!(table->x[i] > table->x[i - 1])) {
        throw Error(ErrorCode::ValidationError, "table breakpoints must be strictly increasing");
      }
    }
    if (table->order == 3) second_derivs_ = clamped_spline_moments(table->x, table->values);
  }
}

double PiecePotential::operator()(double x) const {
  return std::visit(
      Overloaded{
          [](const ZeroForm&) { return 0.0; },
          [](const ConstantForm& c) { return c.value; },
          [x](const CosineForm& c) { return c.amplitude * std::cos(c.frequency * x); },
          [x](const PolynomialForm& p) {
            double acc = 0.0;
            for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) acc = acc * x + *it;
            return acc;
          },
          [this, x](const TableForm& t) { return evaluate_table(t, second_derivs_, x); },
      },
      form_);
}

std::span<const double> PiecePotential::breakpoints() const noexcept {
  if (const auto* table = std::get_if<TableForm>(&form_)) return table->x;
  return {};
}

std::optional<double> PiecePotential::constant_value() const {
  if (std::holds_alternative<ZeroForm>(form_)) return 0.0;
  if (const auto* c = std::get_if<ConstantForm>(&form_)) return c->value;
  return std::nullopt;
}

double PiecePotential::sup_abs(double a, double b) const {
  constexpr int kSamples = 4096;
  double sup = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    sup = std::max(sup, std::abs((*this)(a + (b - a) * i / kSamples)));
  }
  for (double x : breakpoints()) {
    if (x >= std::min(a, b) && x <= std::max(a, b)) sup = std::max(sup, std::abs((*this)(x)));
  }
  return sup;
}

bool PiecePotential::evaluable_on(double a, double b) const {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  if (const auto* table = std::get_if<TableForm>(&form_)) {
    constexpr double kSlack = 1e-12;
    if (table->x.front() > lo + kSlack || table->x.back() < hi - kSlack) return false;
  }
  return std::isfinite(sup_abs(lo, hi));
}

std::string PiecePotential::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(Overloaded{
                 [&](const ZeroForm&) { out << "zero"; },
                 [&](const ConstantForm& c) { out << "constant " << c.value; },
                 [&](const CosineForm& c) { out << "cosine " << c.amplitude << ' ' << c.frequency; },
                 [&](const PolynomialForm& p) {
                   out << "polynomial";
                   for (double c : p.coefficients) out << ' ' << c;
                 },
                 [&](const TableForm& t) {
                   out << "table";
                   for (std::size_t i = 0; i < t.x.size(); ++i) out << ' ' << t.x[i] << ' ' << t.values[i];
                 },
             },
             form_);
  return out.str();
}

}  // namespace tsl
