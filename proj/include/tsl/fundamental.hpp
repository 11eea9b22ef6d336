#pragma once

#include <array>

#include "tsl/ivp.hpp"
#include "tsl/problem.hpp"

namespace tsl {

/// How the (y, y') data is carried across x = 0.
///   CramerSolve:  solve both transmission conditions for the far side (they hold exactly).
///   PaperLiteral: the rho-formulas as printed for phi (denominator rho12) and chi (rho34).
enum class JumpConvention { PaperLiteral, CramerSolve };

std::string to_string(JumpConvention conv);

/// 2x2 linear map on (y, y').
struct Mat2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

  double det() const { return a11 * a22 - a12 * a21; }
  StatePair apply(const StatePair& s, double x) const { return {x, a11 * s.y + a12 * s.dy, a21 * s.y + a22 * s.dy}; }
};

/// (y(0-), y'(0-)) -> (y(0+), y'(0+)).
Mat2 left_jump_matrix(const RhoSet& rho, JumpConvention conv, ColumnConvention columns = ColumnConvention::ValueFirst);
/// (y(0+), y'(0+)) -> (y(0-), y'(0-)).
Mat2 right_jump_matrix(const RhoSet& rho, JumpConvention conv, ColumnConvention columns = ColumnConvention::ValueFirst);

StatePair left_jump(const StatePair& at_0minus, const RhoSet& rho, JumpConvention conv,
                    ColumnConvention columns = ColumnConvention::ValueFirst);
StatePair right_jump(const StatePair& at_0plus, const RhoSet& rho, JumpConvention conv,
                     ColumnConvention columns = ColumnConvention::ValueFirst);

/// (Gamma_1, Gamma_2) for the interface values on both sides.
std::array<double, 2> transmission_residuals(const TransmissionMatrix& t, const StatePair& minus,
                                             const StatePair& plus);

enum class FundamentalKind { Phi, Chi };

/// phi is launched from the left boundary data, chi from the right; both are carried across 0.
struct FundamentalPair {
  SolutionPath left;
  SolutionPath right;
  double lambda;
  FundamentalKind kind;
  JumpConvention convention;
};

FundamentalPair build_phi(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                          const IntegratorConfig& cfg);
FundamentalPair build_chi(const ValidatedProblem& problem, double lambda, JumpConvention conv,
                          const IntegratorConfig& cfg);

/// The four solution pieces: phi1 on [-pi,0], phi2 on [0,pi], chi1 on [-pi,0], chi2 on [0,pi].
enum class FundamentalPiece { Phi1, Phi2, Chi1, Chi2 };

struct PicardConfig {
  int max_iterations = 50;
  int mesh_intervals = 1024;
  double tolerance = 1e-10;
};

struct PicardSolution {
  SolutionPath path;
  int iterations;
  double last_difference;
};

/// Successive approximation of the variation-of-parameters integral equation for one piece,
/// with composite Simpson quadrature. Requires lambda > 0. phi2/chi1 take their interface data
/// from the Picard solution of phi1/chi2 carried across 0 by `conv`.
PicardSolution picard_solve(FundamentalPiece which, const ValidatedProblem& problem, double lambda,
                            const PicardConfig& cfg, JumpConvention conv = JumpConvention::CramerSolve);

struct AsymptoticParams {
  double alpha = 0.0;
  double beta = 0.0;
  double rho12 = 1.0;
  double rho24 = 0.0;
  double rho34 = 1.0;

  static AsymptoticParams from(const ValidatedProblem& problem);
};

/// Leading term (remainder dropped) of the large-s expansion of d^k/dx^k of a piece, real s.
/// phi pieces branch on sin(alpha) = 0, chi pieces on sin(beta) = 0.
double asymptotic_fundamental(FundamentalPiece which, const CaseTag& tag, double s, double x, int k,
                              const AsymptoticParams& params);

/// Throws CaseMismatch unless tag agrees with the predicates of the supplied angles.
void require_case(const CaseTag& tag, double alpha, double beta);

}  // namespace tsl
