#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tsl/characteristic.hpp"

namespace tsl {

using CharacteristicFn = std::function<double(double)>;

enum class BracketKind { SignChange, Tangency, ExactNode };

/// A root candidate from a grid scan. Tangency brackets carry the grid minimiser of |w|
/// in `mid`; ExactNode brackets have lo == hi == the node where w vanished.
struct Bracket {
  BracketKind kind = BracketKind::SignChange;
  double lo = 0.0;
  double hi = 0.0;
  double mid = 0.0;
  double local_scale = 0.0;  // max |w| over nearby grid nodes
};

/// Scans w over a strictly increasing grid for sign changes, exact zeros and dips of |w|
/// that do not change sign (candidate even-multiplicity or unresolved close roots).
std::vector<Bracket> scan_brackets(const CharacteristicFn& w, std::span<const double> grid);

/// Uniform lambda grid of grid_points (>= 16) over [lambda_min, lambda_max].
std::vector<Bracket> scan_brackets(const ValidatedProblem& problem, double lambda_min, double lambda_max,
                                   int grid_points, JumpConvention conv, const IntegratorConfig& cfg);

struct Root {
  double lambda = 0.0;
  int multiplicity = 1;
  double char_value = 0.0;
};

struct RefineOptions {
  double tol = 1e-13;
  /// |w| at a tangency minimum must not exceed this to count as a root.
  double noise_floor = 0.0;
};

/// Sign-change brackets give one root to |dlambda| <= tol (1 + |lambda|) (and |dsqrt(lambda)| <= tol
/// for lambda >= 0). A tangency bracket gives two simple roots when the dip crosses zero, one root
/// flagged with multiplicity 2 when the minimum sits inside the noise floor, otherwise
/// TangencyRejected. Equal signs at a sign-change bracket raise LostBracket.
std::vector<Root> refine_root(const CharacteristicFn& w, const Bracket& bracket, const RefineOptions& opts);

/// Problem form: noise floor = 1e3 * rel_tol * bracket.local_scale.
std::vector<Root> refine_root(const ValidatedProblem& problem, const Bracket& bracket, double tol,
                              JumpConvention conv, const IntegratorConfig& cfg);

struct EigenResiduals {
  double boundary_left = 0.0;   // Gamma_3
  double boundary_right = 0.0;  // Gamma_4
  double transmission_1 = 0.0;  // Gamma_1
  double transmission_2 = 0.0;  // Gamma_2
  double char_value = 0.0;      // w at the refined eigenvalue
  double interface_norm = 0.0;  // |(u(0-), u'(0-), u(0+), u'(0+))|
};

struct Eigenfunction {
  SolutionPath left;
  SolutionPath right;
};

struct AssembledEigenfunction {
  Eigenfunction eigenfunction;
  double norm_sq;  // weighted norm after normalisation (1 up to rounding)
  EigenResiduals residuals;
};

/// Residuals are evaluated on phi as launched (boundary_left is exactly 0).
/// phi at lambda_n normalised so rho12 int_{-pi}^0 u^2 + rho34 int_0^pi u^2 = 1, signed so the first
/// nonzero of (u(-pi), u'(-pi)) is positive. Throws NotAnEigenvalue if Gamma_4 is not small.
AssembledEigenfunction assemble_eigenfunction(const ValidatedProblem& problem, double lambda_n, JumpConvention conv,
                                              const IntegratorConfig& cfg);

struct Eigenpair {
  int index = 0;  // 1-based in ascending lambda
  double lambda = 0.0;
  std::optional<double> s;
  int multiplicity = 1;
  Eigenfunction eigenfunction;
  double norm_sq = 0.0;
  EigenResiduals residuals;
};

struct SpectrumOptions {
  std::optional<double> lambda_min;  // default -(10 + sup|q|)
  double refine_tol = 1e-13;
  double ds = 1.0 / 16.0;  // grid spacing in s = sqrt(lambda)
  int max_refinements = 3;
  double completeness_slack = 2.0;
};

/// The `count` smallest eigenvalues above lambda_min with normalised eigenfunctions.
/// Throws IncompleteSpectrum when the number found keeps disagreeing with the Weyl estimate
/// N(lambda_count) by more than completeness_slack after grid refinement.
std::vector<Eigenpair> find_eigenvalues(const ValidatedProblem& problem, int count, JumpConvention conv,
                                        const IntegratorConfig& cfg, const SpectrumOptions& opts = {});

/// Roots only (no eigenfunction assembly) below lambda_max.
std::vector<Root> find_roots_below(const ValidatedProblem& problem, double lambda_max, JumpConvention conv,
                                   const IntegratorConfig& cfg, const SpectrumOptions& opts = {});

/// (1/pi) int sqrt(max(0, Lambda - q)) over [-pi, pi].
double weyl_count(const ValidatedProblem& problem, double lambda);

/// Oriented composite Simpson of u*v over the (shared) mesh.
double simpson_product(const SolutionPath& u, const SolutionPath& v);

double weighted_inner(const Eigenfunction& u, const Eigenfunction& v, double rho12, double rho34);

/// Entry (i, j) = rho12 int_{-pi}^0 u_i u_j + rho34 int_0^pi u_i u_j. Throws MeshMismatch.
std::vector<std::vector<double>> gram_matrix(std::span<const Eigenpair> eigenpairs, double rho12, double rho34);

/// Leading term of s_n: n - 1/2 in case I, n/2 otherwise.
double asymptotic_s(const CaseTag& tag, int n);

/// Printed: the literal expression attached to each case label.
/// Predicate: the leading term of phi selected by the sin(alpha) predicate (left piece for x <= 0,
/// right piece for x > 0) evaluated at s = asymptotic_s(case, n).
enum class EigenfunctionKeying { Printed, Predicate };

double asymptotic_eigenfunction(const CaseTag& tag, int n, double x, const AsymptoticParams& params,
                                EigenfunctionKeying keying = EigenfunctionKeying::Printed);

/// Families of asymptotic targets: n/2, n - 1/2, n.
enum class TargetFamily { HalfStep, ShiftedInteger, Integer };

std::string to_string(TargetFamily family);
TargetFamily target_family(const CaseTag& tag);
double target_value(TargetFamily family, int n);

struct TargetMatch {
  int n = 0;
  double target = 0.0;
  double error = 0.0;
};

/// Nearest target of the family (within half the target spacing by construction).
TargetMatch match_target(double s, TargetFamily family);

struct FitWindow {
  int n_min = 10;
  int n_max = 40;
};

/// Errors at or below this are indistinguishable from an exact hit at solver accuracy. They are
/// counted but left out of the log fit.
inline constexpr double kFitResolution = 1e-8;

/// log|err| ~ log C - p log n over the window.
struct AsymptoticFit {
  double exponent = 0.0;
  double constant = 0.0;
  bool exact_match = false;  // every error in the window at resolution; exponent is +inf
  int points = 0;            // points used by the fit
  int exact_points = 0;      // points in the window at resolution
  FitWindow window;
  TargetFamily family = TargetFamily::HalfStep;
};

AsymptoticFit fit_power_law(std::span<const int> n, std::span<const double> err, FitWindow window);

/// Matches each s to its nearest target, then fits the errors inside the window.
AsymptoticFit convergence_fit(std::span<const double> s_values, TargetFamily family, FitWindow window);
AsymptoticFit convergence_fit(std::span<const double> s_values, const CaseTag& tag, FitWindow window);

struct SpectrumReport {
  std::vector<Eigenpair> eigenpairs;
  CaseTag tag;
  std::vector<std::optional<TargetMatch>> matches;  // absent for lambda < 0
  std::optional<AsymptoticFit> fit;
  std::optional<AsymptoticFit> integer_fit;  // case I only: errors against n
};

SpectrumReport make_spectrum_report(std::vector<Eigenpair> eigenpairs, const CaseTag& tag, FitWindow window);

}  // namespace tsl
