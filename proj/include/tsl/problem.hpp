#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "tsl/errors.hpp"
#include "tsl/potential.hpp"

namespace tsl {

inline constexpr double kDefaultCaseTolerance = 1e-12;
inline constexpr double kRhoFloor = 1e-14;

/// Left condition: cos(alpha) y(-pi) + sin(alpha) y'(-pi) = 0; right likewise with beta at pi.
struct BoundaryAngles {
  double alpha = 0.0;
  double beta = 0.0;

  /// Angles reduced to [0, pi) for reporting. Evaluation always uses the raw values.
  double reduced_alpha() const;
  double reduced_beta() const;
};

/// Which quantity each column of the transmission matrix multiplies.
///   ValueFirst:      (y(0-), y'(0-), y(0+), y'(0+))
///   DerivativeFirst: (y'(0-), y(0-), y'(0+), y(0+))
enum class ColumnConvention { ValueFirst, DerivativeFirst };

struct TransmissionMatrix {
  std::array<double, 4> row_a{};
  std::array<double, 4> row_b{};
  ColumnConvention columns = ColumnConvention::ValueFirst;

  /// rows (1,0,-1,0)/(0,1,0,-1): y and y' continuous across 0 in either convention.
  static TransmissionMatrix continuity(ColumnConvention columns = ColumnConvention::ValueFirst);
};

/// The six 2x2 column minors rho_kj = a_k b_j - a_j b_k (1-based columns).
struct RhoSet {
  double r12 = 0.0;
  double r13 = 0.0;
  double r14 = 0.0;
  double r23 = 0.0;
  double r24 = 0.0;
  double r34 = 0.0;

  /// rho_kj for any k != j in 1..4; rho_jk = -rho_kj.
  double at(int k, int j) const;

  /// rho12 rho34 - rho13 rho24 + rho14 rho23, zero for every 2x4 matrix.
  double plucker_residual() const;

  bool operator==(const RhoSet&) const = default;
};

/// Throws DegenerateMatrix when every minor is below 1e-14 in magnitude.
RhoSet build_rho(const TransmissionMatrix& t);

enum class ProblemCase { I, II, III, IV };

std::string to_string(ProblemCase c);

struct CaseTag {
  ProblemCase variant = ProblemCase::I;
  bool sin_alpha_zero = false;
  bool sin_beta_zero = false;

  bool operator==(const CaseTag&) const = default;
};

CaseTag classify_case(const BoundaryAngles& angles, double tol = kDefaultCaseTolerance);

struct ProblemSpec {
  BoundaryAngles angles;
  TransmissionMatrix transmission;
  PotentialSpec potential;
};

struct ValidationResult;

/// A problem that passed validation. Only validate_problem can make one.
class ValidatedProblem {
 public:
  const ProblemSpec& spec() const noexcept { return spec_; }
  const BoundaryAngles& angles() const noexcept { return spec_.angles; }
  const TransmissionMatrix& transmission() const noexcept { return spec_.transmission; }
  const PotentialSpec& potential() const noexcept { return spec_.potential; }
  const RhoSet& rho() const noexcept { return rho_; }
  CaseTag case_tag(double tol = kDefaultCaseTolerance) const { return classify_case(spec_.angles, tol); }

  /// sup |q| over [-pi, pi].
  double potential_bound() const noexcept { return potential_bound_; }

  /// Recomputes rho from the matrix; throws InternalError on any mismatch.
  void check_consistency() const;

 private:
  friend ValidationResult validate_problem(const ProblemSpec& spec);
  ValidatedProblem(ProblemSpec spec, RhoSet rho, double bound);

  ProblemSpec spec_;
  RhoSet rho_;
  double potential_bound_ = 0.0;
};

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

struct ValidationResult {
  std::optional<ValidatedProblem> problem;
  std::vector<ValidationIssue> issues;

  bool ok() const noexcept { return problem.has_value(); }
};

/// Collects every violation instead of stopping at the first.
ValidationResult validate_problem(const ProblemSpec& spec);

/// validate_problem, throwing ValidationError with all issues joined.
ValidatedProblem require_valid(const ProblemSpec& spec);

}  // namespace tsl
