#include <cmath>

#include "support.hpp"

using namespace tsl;
using tsl::test::coupling;
using tsl::test::error_code_of;
using tsl::test::make_problem;

TEST_CASE("Wronskian is antisymmetric and equals 1 for cos and sin") {
  const PiecePotential zero{ZeroForm{}};
  const auto c = integrate_ivp(zero, 1.0, -kPi, 0.0, {0.0, 1.0, 0.0}, IntegratorConfig{});
  const auto s = integrate_ivp(zero, 1.0, -kPi, 0.0, {0.0, 0.0, 1.0}, IntegratorConfig{});
  for (double x : {-3.0, -1.234, 0.0}) {
    CHECK(wronskian_at(c, c, x) == 0.0);
    CHECK(wronskian_at(c, s, x) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(wronskian_at(s, c, x) == -wronskian_at(c, s, x));
  }
  const auto right = integrate_ivp(zero, 1.0, 0.0, kPi, {0.0, 1.0, 0.0}, IntegratorConfig{});
  const auto other = integrate_ivp(zero, 2.0, -kPi, 0.0, {0.0, 1.0, 0.0}, IntegratorConfig{});
  CHECK(error_code_of([&] { wronskian_at(c, right, 0.0); }) == ErrorCode::SideMismatch);
  CHECK(error_code_of([&] { wronskian_at(c, other, -1.0); }) == ErrorCode::SideMismatch);
}

TEST_CASE("Dirichlet characteristic function from the closed form") {
  const auto problem = make_problem(0.0, 0.0);
  const auto a = char_w(problem, 1.0 / 16.0, JumpConvention::CramerSolve, IntegratorConfig{});
  CHECK(a.s.value() == 0.25);
  CHECK(a.w == doctest::Approx(-4.0).epsilon(1e-10));
  CHECK(a.w_boundary_form == doctest::Approx(-4.0).epsilon(1e-10));
  const auto b = char_w(problem, 0.25, JumpConvention::CramerSolve, IntegratorConfig{});
  CHECK(std::abs(b.w) < 1e-9);
  CHECK(char_w_value(problem, 1.0 / 16.0, JumpConvention::CramerSolve, IntegratorConfig{}) ==
        doctest::Approx(-4.0).epsilon(1e-10));
  CHECK_FALSE(char_w(problem, -1.0, JumpConvention::CramerSolve, IntegratorConfig{}).s.has_value());
}

TEST_CASE("characteristic identities hold for random problems under both conventions") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> angle(-kPi, kPi), lam(-5.0, 150.0);
  for (int trial = 0; trial < 12; ++trial) {
    const auto t = tsl::test::random_valid_matrix(rng);
    const auto problem = make_problem(angle(rng), angle(rng), t, CosineForm{1.5, 1.0}, PolynomialForm{{0.5, -0.3}});
    for (auto conv : {JumpConvention::CramerSolve, JumpConvention::PaperLiteral}) {
      const double lambda = lam(rng);
      const auto phi = build_phi(problem, lambda, conv, IntegratorConfig{});
      const auto chi = build_chi(problem, lambda, conv, IntegratorConfig{});
      const auto sample = char_w(problem, lambda, conv, IntegratorConfig{});
      CHECK(sample.consistency_residual <= 1e-8 * (1.0 + std::abs(sample.w)));
      CHECK(std::abs(sample.w_boundary_form - sample.w2) <= 1e-9 * (1.0 + std::abs(sample.w2)));
      CHECK(sample.w == problem.rho().r12 * sample.w2);
      CHECK(wronskian_spread(phi.right, chi.right).spread() <= 1e-9 * (1.0 + std::abs(sample.w2)));
      CHECK(wronskian_spread(phi.left, chi.left).spread() <= 1e-9 * (1.0 + std::abs(sample.w2)));
      CHECK(char_w_value(problem, lambda, conv, IntegratorConfig{}) ==
            doctest::Approx(sample.w).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("w2 / w1 equals the jump determinant over a lambda grid") {
  const auto problem = make_problem(0.4, 1.2, {{2, 1, -1, 0.5}, {0, 1, 0.3, -1.5}}, CosineForm{1.0, 1.0});
  for (auto conv : {JumpConvention::CramerSolve, JumpConvention::PaperLiteral}) {
    const double det = jump_determinant(problem, conv);
    const auto& rho = problem.rho();
    CHECK(det == doctest::Approx(conv == JumpConvention::CramerSolve ? rho.r12 / rho.r34 : rho.r34 / rho.r12));
    std::vector<double> grid;
    for (int i = 0; i < 100; ++i) grid.push_back(-3.0 + 0.97 * i);
    const auto curve = sample_curve(problem, grid, conv, IntegratorConfig{});
    REQUIRE(curve.samples.size() == grid.size());
    for (const auto& c : curve.samples) {
      if (std::abs(c.w1) < 1e-6) continue;
      CHECK(c.w2 / c.w1 == doctest::Approx(det).epsilon(1e-7));
    }
  }
}

TEST_CASE("sampling needs an increasing grid") {
  const auto problem = make_problem(0.0, 0.0);
  const std::vector<double> grid{1.0, 1.0, 2.0};
  CHECK(error_code_of([&] { sample_curve(problem, grid, JumpConvention::CramerSolve, IntegratorConfig{}); }) ==
        ErrorCode::ValidationError);
}

TEST_CASE("closed-form w matches shooting for piecewise constant potentials") {
  const auto problem = make_problem(0.9, -0.4, {{1.5, 0.2, -1, 0.4}, {0.1, 1, 0.2, -0.8}}, ConstantForm{1.0},
                                    ConstantForm{-2.0});
  for (double lambda : {-6.0, -2.0, 0.0, 1.0, 2.0, 7.5, 60.0, 300.0}) {
    for (auto conv : {JumpConvention::CramerSolve, JumpConvention::PaperLiteral}) {
      const double exact = char_w_closed_form(problem, lambda, conv);
      CHECK(char_w_value(problem, lambda, conv, IntegratorConfig{}) ==
            doctest::Approx(exact).epsilon(1e-9).scale(1.0));
    }
  }
  const auto smooth = make_problem(0.0, 0.0, TransmissionMatrix::continuity(), CosineForm{});
  CHECK(error_code_of([&] { char_w_closed_form(smooth, 1.0, JumpConvention::CramerSolve); }) ==
        ErrorCode::ValidationError);
}

TEST_CASE("asymptotic characteristic leading terms") {
  const AsymptoticParams p1{kPi / 2, kPi / 2, 1.0, -1.0, 1.0};
  const auto tag1 = classify_case({p1.alpha, p1.beta});
  CHECK(char_w_asymptotic(tag1, 2.5, p1) == doctest::Approx(6.25));
  CHECK(std::abs(char_w_asymptotic(tag1, 3.0, p1)) < 1e-12);

  const AsymptoticParams p4{0.0, 0.0, 1.0, -1.0, 1.0};
  const auto tag4 = classify_case({p4.alpha, p4.beta});
  CHECK(std::abs(char_w_asymptotic(tag4, 3.5, p4)) < 1e-12);
  CHECK(char_w_asymptotic(tag4, 3.0, p4) == doctest::Approx(1.0));
  CHECK(error_code_of([&] { char_w_asymptotic(tag4, 3.0, p1); }) == ErrorCode::CaseMismatch);
  CHECK(error_code_of([&] { char_w_asymptotic(tag4, 0.0, p4); }) == ErrorCode::ValidationError);
}

TEST_CASE("w / s stays bounded around the case I leading term at half-integers") {
  const auto problem = make_problem(kPi / 2, kPi / 2, coupling());
  const auto params = AsymptoticParams::from(problem);
  double worst = 0.0;
  for (double s = 5.5; s <= 40.5; s += 5.0) {
    const double w = char_w_value(problem, s * s, JumpConvention::CramerSolve, IntegratorConfig{});
    worst = std::max(worst, std::abs(w - char_w_asymptotic(problem.case_tag(), s, params)) / s);
  }
  CHECK(worst <= 3.0);
}
