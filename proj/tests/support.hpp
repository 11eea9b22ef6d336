#pragma once

#include <doctest.h>

#include <functional>
#include <random>

#include "tsl/spectrum.hpp"

namespace tsl::test {

inline TransmissionMatrix coupling() { return {{1, 1, -1, 0}, {0, 1, 0, -1}}; }

inline ValidatedProblem make_problem(double alpha, double beta, TransmissionMatrix t = TransmissionMatrix::continuity(),
                                     PotentialForm q = ZeroForm{}) {
  return require_valid({{alpha, beta}, t, PotentialSpec::uniform(PiecePotential(std::move(q)))});
}

inline ValidatedProblem make_problem(double alpha, double beta, TransmissionMatrix t, PotentialForm left,
                                     PotentialForm right) {
  return require_valid({{alpha, beta}, t, {PiecePotential(std::move(left)), PiecePotential(std::move(right))}});
}

/// Random matrix with rho12 > 0 and rho34 > 0 (rows flipped or redrawn as needed).
inline TransmissionMatrix random_valid_matrix(std::mt19937_64& rng, ColumnConvention columns = ColumnConvention::ValueFirst) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  while (true) {
    TransmissionMatrix t{{u(rng), u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng), u(rng)}, columns};
    auto rho = build_rho(t);
    if (rho.r12 < 0) {
      std::swap(t.row_a, t.row_b);
      rho = build_rho(t);
    }
    if (rho.r12 > 0.2 && rho.r34 > 0.2) return t;
  }
}

inline ErrorCode error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a tsl::Error");
  return ErrorCode::InternalError;
}

}  // namespace tsl::test
