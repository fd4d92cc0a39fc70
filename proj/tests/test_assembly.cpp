#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mchom/assembly.hpp"
#include "mchom/cell_solver.hpp"

using namespace mchom;

namespace {

Eigen::VectorXd random_vector(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = unit(rng);
  return v;
}

}  // namespace

TEST_CASE("constant coefficients factor out of the assembled blocks") {
  const auto s = build_space(2, 2, 2);
  const Xpt x{0.3, 0.0};
  const auto unit = assemble_system(s, CoefficientModel::constant(1, 1, 1), x);
  const auto sys =
      assemble_system(s, CoefficientModel::constant(2.0, 0.5, 3.0), x);
  CHECK((sys.A1 - 2.0 * unit.A1).norm() <= 1e-12 * sys.A1.norm());
  CHECK((sys.A2 - 0.5 * unit.A2).norm() <= 1e-12 * sys.A2.norm());
  CHECK((sys.MQ - 3.0 * unit.MQ).norm() <= 1e-12 * sys.MQ.norm());
}

TEST_CASE("the block operator annihilates the constant pair") {
  const auto s = build_space(2, 2, 3);
  const auto sys =
      assemble_system(s, CoefficientModel::paper4(1.0), {0.5, 0.0});
  const Eigen::SparseMatrix<double> K = sys.block_matrix();
  REQUIRE(K.rows() == 2 * sys.dim);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2 * sys.dim);
  CHECK((K * ones).norm() <= 1e-12 * K.norm());

  // Symmetry to round-off.
  const Eigen::SparseMatrix<double> Kt = K.transpose();
  CHECK((K - Kt).norm() <= 1e-12 * K.norm());

  // Block layout: K (u, w) = ((A1+MQ) u - MQ w, -MQ u + (A2+MQ) w).
  const Eigen::VectorXd u = random_vector(sys.dim, 4);
  const Eigen::VectorXd w = random_vector(sys.dim, 5);
  Eigen::VectorXd uw(2 * sys.dim);
  uw << u, w;
  const Eigen::VectorXd top = sys.A1 * u + sys.MQ * (u - w);
  const Eigen::VectorXd bot = sys.A2 * w - sys.MQ * (u - w);
  Eigen::VectorXd expect(2 * sys.dim);
  expect << top, bot;
  CHECK((K * uw - expect).norm() <= 1e-12 * expect.norm());

  // Exchange mass entries are nonnegative (products of shape values).
  for (int c = 0; c < sys.MQ.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.MQ, c); it; ++it) {
      CHECK(it.value() >= 0.0);
    }
  }
}

TEST_CASE("the constraint vector integrates the basis functions") {
  const auto s = build_space(2, 1, 1);  // n = 4
  const auto sys =
      assemble_system(s, CoefficientModel::paper4(0.5), {0.25, 0.0});
  REQUIRE(sys.g.size() == 2 * sys.dim);
  const double cell = s.h() * s.h();
  for (int i = 0; i < 2 * sys.dim; ++i) {
    CHECK(sys.g[i] == doctest::Approx(cell).epsilon(1e-12));
  }
  CHECK(sys.g.sum() == doctest::Approx(2.0).epsilon(1e-12));

  // Bordered form appends g as a symmetric last row/column with zero corner.
  const Eigen::SparseMatrix<double> B = sys.bordered_matrix();
  REQUIRE(B.rows() == 2 * sys.dim + 1);
  const int m = 2 * sys.dim;
  CHECK(B.coeff(m, m) == 0.0);
  for (int i : {0, 7, m - 1}) {
    CHECK(B.coeff(m, i) == doctest::Approx(sys.g[i]));
    CHECK(B.coeff(i, m) == doctest::Approx(sys.g[i]));
  }
}

TEST_CASE("the stiffness trace matches an independent quadrature loop") {
  const auto s = build_space(2, 1, 3);
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt x{0.0, 0.0};
  const auto sys = assemble_system(s, m, x);

  double trace = 0.0;
  for (int i = 0; i < sys.dim; ++i) trace += sys.A1.coeff(i, i);

  double expect = 0.0;
  for (int ey = 0; ey < s.n(); ++ey) {
    for (int ex = 0; ex < s.n(); ++ex) {
      for (int q = 0; q < s.nq(); ++q) {
        const double k1 =
            m.eval(Field::K1, x, s.qpoint_y1(ex, q), s.qpoint_y2(ey, q));
        for (int a = 0; a < 4; ++a) {
          const double g1 = s.dshape_dy1(a, q), g2 = s.dshape_dy2(a, q);
          expect += s.jw(q) * k1 * (g1 * g1 + g2 * g2);
        }
      }
    }
  }
  CHECK(trace == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("plain right-hand sides vanish for constant permeabilities") {
  const auto s = build_space(2, 2, 2);
  const auto m = CoefficientModel::constant(4.0, 2.0, 1.0);
  for (int dir : {0, 1}) {
    const Eigen::VectorXd rhs = assemble_rhs_full(s, m, {0.0, 0.0}, dir);
    REQUIRE(rhs.size() == 2 * s.dim());
    CHECK(rhs.norm() <= 1e-13);
  }
}

TEST_CASE("plain right-hand sides match an independent quadrature loop") {
  const auto s = build_space(2, 3, 3);
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt x{0.5, 0.0};
  for (int dir : {0, 1}) {
    const Eigen::VectorXd rhs = assemble_rhs_full(s, m, x, dir);

    Eigen::VectorXd expect = Eigen::VectorXd::Zero(2 * s.dim());
    for (int ey = 0; ey < s.n(); ++ey) {
      for (int ex = 0; ex < s.n(); ++ex) {
        const auto dofs = s.element_dofs(ex, ey);
        for (int q = 0; q < s.nq(); ++q) {
          const double y1 = s.qpoint_y1(ex, q), y2 = s.qpoint_y2(ey, q);
          const double k1 = m.eval(Field::K1, x, y1, y2);
          const double k2 = m.eval(Field::K2, x, y1, y2);
          for (int a = 0; a < 4; ++a) {
            const double gd = dir == 0 ? s.dshape_dy1(a, q) : s.dshape_dy2(a, q);
            expect[dofs[a]] -= s.jw(q) * k1 * gd;
            expect[s.dim() + dofs[a]] -= s.jw(q) * k2 * gd;
          }
        }
      }
    }
    CHECK((rhs - expect).norm() <= 1e-12 * expect.norm());

    // Each continuum block sums to zero: the load is orthogonal to constants.
    CHECK(std::abs(rhs.head(s.dim()).sum()) <= 1e-12);
    CHECK(std::abs(rhs.tail(s.dim()).sum()) <= 1e-12);
  }
}

TEST_CASE("correction loads vanish when nothing differs") {
  const auto hier = build_space_hierarchy(2, 3);
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt xp{0.5, 0.0};
  const CellSolution parent = solve_full(hier.at(3), m, xp);

  for (int dir : {0, 1}) {
    // Parent at the same macro point: all coefficient differences are zero.
    std::vector<CorrectionParent> same{{xp, 1.0, &parent.dirs[dir]}};
    const Eigen::VectorXd r0 =
        assemble_rhs_correction(hier.at(2), m, xp, same, dir);
    CHECK(r0.norm() == 0.0);
  }

  // A macro-constant model has zero coefficient differences at any distance.
  const auto mc = CoefficientModel::constant(2.0, 1.0, 1.5);
  const CellSolution pc = solve_full(hier.at(3), mc, xp);
  std::vector<CorrectionParent> far{{xp, 1.0, &pc.dirs[0]}};
  const Eigen::VectorXd rc =
      assemble_rhs_correction(hier.at(2), mc, {0.125, 0.0}, far, 0);
  CHECK(rc.norm() == 0.0);
}

TEST_CASE("correction loads scale linearly with the macro offset") {
  // The trigonometric family depends linearly on x1, so halving the offset
  // from the parent halves the correction load exactly.
  const auto hier = build_space_hierarchy(2, 3);
  const auto m = CoefficientModel::paper4(1.0);
  const Xpt xp{0.5, 0.0};
  const CellSolution parent = solve_full(hier.at(3), m, xp);

  for (int dir : {0, 1}) {
    std::vector<CorrectionParent> parents{{xp, 1.0, &parent.dirs[dir]}};
    const Eigen::VectorXd r_far =
        assemble_rhs_correction(hier.at(2), m, {0.375, 0.0}, parents, dir);
    const Eigen::VectorXd r_near =
        assemble_rhs_correction(hier.at(2), m, {0.4375, 0.0}, parents, dir);
    CHECK(r_far.norm() > 0.0);
    CHECK(r_far.norm() / r_near.norm() == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("correction weights must form a partition of unity") {
  const auto hier = build_space_hierarchy(2, 2);
  const auto m = CoefficientModel::paper4(1.0);
  const CellSolution parent = solve_full(hier.at(2), m, {0.5, 0.0});
  std::vector<CorrectionParent> bad{{{0.5, 0.0}, 0.75, &parent.dirs[0]}};
  CHECK_THROWS_AS(assemble_rhs_correction(hier.at(1), m, {0.375, 0.0}, bad, 0),
                  ConfigError);
}

TEST_CASE("non-positive coefficient values are rejected during assembly") {
  // Outside the macro interval the exchange field of this family goes
  // negative; the assembler must refuse rather than produce an indefinite
  // operator.
  const auto s = build_space(2, 1, 1);
  const auto m = CoefficientModel::paper4(1.9);
  CHECK_THROWS_AS(assemble_system(s, m, {2.0, 0.0}), SolveError);
}
