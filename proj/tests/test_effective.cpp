#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mchom/effective.hpp"

using namespace mchom;

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

TEST_CASE("constant media homogenize to themselves") {
  const auto s = build_space(2, 3, 3);
  const auto m = CoefficientModel::constant(2.0, 1.0, 3.0);
  const Xpt x{0.25, 0.0};
  const auto sol = solve_full(s, m, x);
  const auto t = effective_tensor(s, m, x, sol);
  CHECK(t.k1_star(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(t.k1_star(1, 1) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(t.k1_star(0, 1)) <= 1e-10);
  CHECK(std::abs(t.k1_star(1, 0)) <= 1e-10);
  CHECK(t.k2_star(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.k2_star(1, 1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(t.c11_avg == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.c22_avg == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.q_avg == doctest::Approx(1.0).epsilon(1e-12));

  const auto sr = check_structure(t);
  CHECK(sr.asymmetry <= 1e-10);
  CHECK(sr.min_eig_sum == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("the layered medium recovers harmonic and arithmetic means") {
  // kappa(y1) = 2 + cos(2 pi y1): the homogenized tensor is
  // diag(harmonic mean, arithmetic mean) = diag(sqrt(3), 2).
  const auto m = CoefficientModel::laminate("cosine", 1.0);
  std::vector<double> errs;
  for (int level : {2, 3, 4}) {
    const auto s = build_space(2, level, 4);
    const auto sol = solve_full(s, m, {0.0, 0.0});
    const auto t = effective_tensor(s, m, {0.0, 0.0}, sol);
    // Conforming minimization approaches the exact value from above.
    CHECK(t.k1_star(0, 0) >= kSqrt3 - 1e-12);
    CHECK(std::abs(t.k1_star(0, 0) - kSqrt3) / kSqrt3 <= 0.01);
    CHECK(t.k1_star(1, 1) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(t.k1_star(0, 1)) <= 1e-8);
    // Identical permeabilities make the two tensors coincide.
    CHECK((t.k1_star - t.k2_star).cwiseAbs().maxCoeff() <= 1e-8);
    errs.push_back(t.k1_star(0, 0) - kSqrt3);
  }
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
  CHECK(std::log2(errs[0] / errs[1]) >= 0.9);
  CHECK(std::log2(errs[1] / errs[2]) >= 0.9);
}

TEST_CASE("reference-point tensors match independently computed values") {
  // Reference values computed with an independent implementation on the
  // n = 16 space (base grid 2, three refinements, 3x3 quadrature).
  const auto s = build_space(2, 3, 3);
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt x{0.0, 0.0};
  const auto sol = solve_full(s, m, x);
  const auto t = effective_tensor(s, m, x, sol);

  CHECK(t.k1_star(0, 0) == doctest::Approx(2.8270271893431533).epsilon(1e-12));
  CHECK(t.k1_star(0, 1) ==
        doctest::Approx(-0.0022078504172977323).epsilon(1e-9));
  CHECK(t.k1_star(1, 0) ==
        doctest::Approx(-0.0022701222039697043).epsilon(1e-9));
  CHECK(t.k1_star(1, 1) == doctest::Approx(2.8270894950073675).epsilon(1e-12));
  CHECK(t.k2_star(0, 0) == doctest::Approx(2.8270894950073782).epsilon(1e-12));

  // Published four-digit values for the same setup.
  CHECK(std::abs(t.k1_star(0, 0) - 2.8210) / 2.8210 <= 5e-3);
  CHECK(std::abs(t.k2_star(0, 0) - 2.8341) / 2.8341 <= 5e-3);

  // Structure: near-exact symmetry of the sum and positive definiteness.
  const auto sr = check_structure(t);
  CHECK(sr.asymmetry <= 1e-12);
  CHECK(sr.min_eig_sum == doctest::Approx(5.64963871172926).epsilon(1e-10));

  // Positive definiteness holds across the whole macro interval.
  for (int i = 0; i <= 16; ++i) {
    const Xpt xi{static_cast<double>(i) / 16.0, 0.0};
    const auto ti = effective_tensor(s, m, xi, solve_full(s, m, xi));
    CHECK(check_structure(ti).min_eig_sum > 0.0);
  }
}

TEST_CASE("tensors are invariant under constant shifts of the solution") {
  const auto s = build_space(2, 2, 2);
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt x{0.5, 0.0};
  const auto sol = solve_full(s, m, x);
  const auto t0 = effective_tensor(s, m, x, sol);

  CellSolution shifted = sol;
  for (int dir : {0, 1}) {
    REQUIRE(sol.dirs[dir].size() == 1);
    const auto& f = *sol.dirs[dir].front().fields;
    shifted.dirs[dir] = single_term(
        s, f[0] + Eigen::VectorXd::Constant(s.dim(), 7.5),
        f[1] + Eigen::VectorXd::Constant(s.dim(), 7.5));
  }
  const auto t1 = effective_tensor(s, m, x, shifted);
  CHECK((t1.k1_star - t0.k1_star).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((t1.k2_star - t0.k2_star).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("the quadrature order is already saturated at the default") {
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt x{0.5, 0.0};
  const auto s3 = build_space(2, 3, 3, 3);
  const auto s4 = build_space(2, 3, 3, 4);
  const auto t3 = effective_tensor(s3, m, x, solve_full(s3, m, x));
  const auto t4 = effective_tensor(s4, m, x, solve_full(s4, m, x));
  CHECK(std::abs(t3.k1_star(0, 0) - t4.k1_star(0, 0)) <=
        1e-6 * t3.k1_star(0, 0));
  CHECK(std::abs(t3.k2_star(1, 1) - t4.k2_star(1, 1)) <=
        1e-6 * t3.k2_star(1, 1));
}

TEST_CASE("a solution without both directions is rejected") {
  const auto s = build_space(2, 1, 1);
  const auto m = CoefficientModel::paper4(1.0);
  CellSolution partial = solve_full(s, m, {0.0, 0.0});
  partial.dirs[1].clear();
  CHECK_THROWS_AS(effective_tensor(s, m, {0.0, 0.0}, partial), ConfigError);
}
