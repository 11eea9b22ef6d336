#include "tsl/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsl {
namespace {

double reduce_angle(double a) {
  double r = std::fmod(a, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

double minor(const TransmissionMatrix& t, int k, int j) {
  const auto& a = t.row_a;
  const auto& b = t.row_b;
  return a[k - 1] * b[j - 1] - a[j - 1] * b[k - 1];
}

}  // namespace

double BoundaryAngles::reduced_alpha() const { return reduce_angle(alpha); }
double BoundaryAngles::reduced_beta() const { return reduce_angle(beta); }

TransmissionMatrix TransmissionMatrix::continuity(ColumnConvention columns) {
  return {{1.0, 0.0, -1.0, 0.0}, {0.0, 1.0, 0.0, -1.0}, columns};
}

double RhoSet::at(int k, int j) const {
  if (k == j || k < 1 || j < 1 || k > 4 || j > 4) {
    throw Error(ErrorCode::InternalError, "rho index out of range");
  }
  if (k > j) return -at(j, k);
  switch (k * 10 + j) {
    case 12: return r12;
    case 13: return r13;
    case 14: return r14;
    case 23: return r23;
    case 24: return r24;
    default: return r34;
  }
}

double RhoSet::plucker_residual() const { return r12 * r34 - r13 * r24 + r14 * r23; }

RhoSet build_rho(const TransmissionMatrix& t) {
  RhoSet rho{minor(t, 1, 2), minor(t, 1, 3), minor(t, 1, 4), minor(t, 2, 3), minor(t, 2, 4), minor(t, 3, 4)};
  const double largest = std::max({std::abs(rho.r12), std::abs(rho.r13), std::abs(rho.r14),
                                   std::abs(rho.r23), std::abs(rho.r24), std::abs(rho.r34)});
  if (!(largest >= kRhoFloor)) {
    throw Error(ErrorCode::DegenerateMatrix, "transmission matrix has rank < 2 (all rho_kj vanish)");
  }
  return rho;
}

std::string to_string(ProblemCase c) {
  switch (c) {
    case ProblemCase::I: return "I";
    case ProblemCase::II: return "II";
    case ProblemCase::III: return "III";
    case ProblemCase::IV: return "IV";
  }
  return "?";
}

CaseTag classify_case(const BoundaryAngles& angles, double tol) {
  const bool a0 = std::abs(std::sin(angles.alpha)) <= tol;
  const bool b0 = std::abs(std::sin(angles.beta)) <= tol;
  ProblemCase variant = ProblemCase::I;
  if (!b0 && a0) variant = ProblemCase::II;
  if (b0 && !a0) variant = ProblemCase::III;
  if (b0 && a0) variant = ProblemCase::IV;
  return {variant, a0, b0};
}

ValidatedProblem::ValidatedProblem(ProblemSpec spec, RhoSet rho, double bound)
    : spec_(std::move(spec)), rho_(rho), potential_bound_(bound) {}

void ValidatedProblem::check_consistency() const {
  if (!(build_rho(spec_.transmission) == rho_)) {
    throw Error(ErrorCode::InternalError, "cached rho set diverged from the transmission matrix");
  }
}

ValidationResult validate_problem(const ProblemSpec& spec) {
  ValidationResult result;
  auto issue = [&](ErrorCode code, std::string message) {
    result.issues.push_back({code, std::move(message)});
  };

  if (!std::isfinite(spec.angles.alpha) || !std::isfinite(spec.angles.beta)) {
    issue(ErrorCode::ValidationError, "boundary angles must be finite");
  }

  const auto& t = spec.transmission;
  const bool finite_rows = std::all_of(t.row_a.begin(), t.row_a.end(), [](double v) { return std::isfinite(v); }) &&
                           std::all_of(t.row_b.begin(), t.row_b.end(), [](double v) { return std::isfinite(v); });
  std::optional<RhoSet> rho;
  if (!finite_rows) {
    issue(ErrorCode::ValidationError, "transmission matrix entries must be finite");
  } else {
    try {
      rho = build_rho(t);
    } catch (const Error&) {
      issue(ErrorCode::RankDeficientTransmission, "transmission rows are linearly dependent (rank < 2)");
    }
  }
  if (rho) {
    if (!(rho->r12 > 0.0)) issue(ErrorCode::RhoSignViolation, "rho12 > 0 required (got " + std::to_string(rho->r12) + ")");
    if (!(rho->r34 > 0.0)) issue(ErrorCode::RhoSignViolation, "rho34 > 0 required (got " + std::to_string(rho->r34) + ")");
  }

  double bound = 0.0;
  for (Side side : {Side::Left, Side::Right}) {
    const auto& q = spec.potential.piece(side);
    const char* name = side == Side::Left ? "left" : "right";
    if (!q.evaluable_on(side_begin(side), side_end(side))) {
      issue(ErrorCode::PotentialUnbounded, std::string(name) + " potential is not finite on its whole piece");
    } else {
      bound = std::max(bound, q.sup_abs(side_begin(side), side_end(side)));
    }
  }

  if (result.issues.empty()) {
    result.problem = ValidatedProblem(spec, *rho, bound);
    result.problem->check_consistency();
  }
  return result;
}

ValidatedProblem require_valid(const ProblemSpec& spec) {
  auto result = validate_problem(spec);
  if (!result.ok()) {
    std::ostringstream out;
    for (std::size_t i = 0; i < result.issues.size(); ++i) {
      if (i) out << "; ";
      out << to_string(result.issues[i].code) << ": " << result.issues[i].message;
    }
    throw Error(ErrorCode::ValidationError, out.str());
  }
  return *std::move(result.problem);
}

}  // namespace tsl
