#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mchom/macro_solver.hpp"

using namespace mchom;

namespace {

const double kPi = std::acos(-1.0);

ScalarField constant_field(double v) {
  return [v](double, double) { return v; };
}

TensorField isotropic(double v) {
  return [v](double, double) {
    return (Eigen::Matrix2d() << v, 0.0, 0.0, v).finished();
  };
}

MacroProblem base_problem(int n) {
  MacroProblem p;
  p.mesh = make_macro_mesh({0.0, 0.0}, {1.0, 1.0}, n, n);
  p.c11 = constant_field(1.0);
  p.c22 = constant_field(1.0);
  p.conductivity = isotropic(2.0);
  p.source_q = named_scalar_field("zero");
  p.g1 = named_scalar_field("zero");
  p.g2 = named_scalar_field("zero");
  return p;
}

}  // namespace

TEST_CASE("named fields resolve to their closed forms") {
  CHECK(named_scalar_field("zero")(0.3, 0.7) == 0.0);
  CHECK(named_scalar_field("one")(0.3, 0.7) == 1.0);
  CHECK(named_scalar_field("x1")(0.3, 0.7) == doctest::Approx(0.3));
  CHECK(named_scalar_field("sinpi")(0.5, 0.5) == doctest::Approx(1.0));
  CHECK(named_scalar_field("sinpi")(0.25, 0.5) ==
        doctest::Approx(std::sin(kPi * 0.25)));
  CHECK_THROWS_AS(named_scalar_field("gaussian"), ConfigError);
}

TEST_CASE("the initial field is the capacity-weighted average") {
  const MacroMesh mesh = make_macro_mesh({0.0, 0.0}, {1.0, 1.0}, 4, 4);

  // Equal data passes through.
  const auto g = named_scalar_field("sinpi");
  const Eigen::VectorXd u0 = initial_condition(
      mesh, g, g, constant_field(1.0), constant_field(1.0));
  for (int j = 0; j <= 4; ++j) {
    for (int i = 0; i <= 4; ++i) {
      CHECK(u0[mesh.node(i, j)] ==
            doctest::Approx(g(mesh.x1(i), mesh.x2(j))).epsilon(1e-14));
    }
  }

  // Equal capacities average the two continua.
  const Eigen::VectorXd half = initial_condition(
      mesh, constant_field(1.0), constant_field(0.0), constant_field(1.0),
      constant_field(1.0));
  CHECK(half[mesh.node(2, 2)] == doctest::Approx(0.5));

  // Weighted case: (3 * 0 + 1 * 4) / (3 + 1) = 1.
  const Eigen::VectorXd w = initial_condition(
      mesh, constant_field(0.0), constant_field(4.0), constant_field(3.0),
      constant_field(1.0));
  CHECK(w[mesh.node(1, 3)] == doctest::Approx(1.0));

  // A vanishing capacity sum has no meaningful average.
  CHECK_THROWS_AS(
      initial_condition(mesh, g, g, constant_field(0.0), constant_field(0.0)),
      SolveError);
}

TEST_CASE("network interpolants reproduce lattice data and extend constantly") {
  const MacroHierarchy h =
      build_hierarchy({0.0, 0.0}, {1.0, 1.0}, 1, 0.5, 3);
  std::vector<double> vals(h.points.size());
  for (size_t i = 0; i < h.points.size(); ++i) {
    vals[i] = 1.0 + h.points[i].x.x1 * h.points[i].x.x1;
  }
  const ScalarField f = scalar_from_network(h, vals);
  for (size_t i = 0; i < h.points.size(); ++i) {
    CHECK(f(h.points[i].x.x1, 0.0) == doctest::Approx(vals[i]).epsilon(1e-13));
    // One-dimensional networks are constant in the second coordinate.
    CHECK(f(h.points[i].x.x1, 0.9) == doctest::Approx(vals[i]).epsilon(1e-13));
  }
  // Between abscissae the interpolant is linear.
  const double mid = f(0.5 * (h.points[3].x.x1 + h.points[4].x.x1), 0.2);
  CHECK(mid == doctest::Approx(0.5 * (vals[3] + vals[4])).epsilon(1e-13));

  std::vector<EffectiveTensors> tensors(h.points.size());
  for (size_t i = 0; i < h.points.size(); ++i) {
    tensors[i].x = h.points[i].x;
    tensors[i].k1_star = Eigen::Matrix2d::Identity() * (1.0 + h.points[i].x.x1);
    tensors[i].k2_star = Eigen::Matrix2d::Identity();
  }
  const TensorField cond = conductivity_from_network(h, tensors);
  const Eigen::Matrix2d at0 = cond(0.0, 0.5);
  CHECK(at0(0, 0) == doctest::Approx(2.0).epsilon(1e-13));
  const Eigen::Matrix2d at1 = cond(1.0, 0.5);
  CHECK(at1(1, 1) == doctest::Approx(3.0).epsilon(1e-13));

  CHECK_THROWS_AS(scalar_from_network(h, std::vector<double>(5, 1.0)),
                  ConfigError);
}

TEST_CASE("zero data stays zero and energy never grows") {
  MacroProblem p = base_problem(8);
  p.t_end = 0.01;
  p.dt = 1e-3;
  const Trajectory still = solve_homogenized(p);
  REQUIRE(still.fields.size() == 2);  // t = 0 and t_end
  CHECK(still.fields.back().norm() == 0.0);
  CHECK(still.min_value == 0.0);

  // A sine bump decays; the capacity-weighted energy is non-increasing.
  p.g1 = p.g2 = named_scalar_field("sinpi");
  const MacroOperators ops(p);
  Eigen::VectorXd u = ops.initial();
  double prev = ops.energy(u);
  CHECK(prev > 0.0);
  for (int s = 0; s < 10; ++s) {
    u = ops.step(u);
    const double e = ops.energy(u);
    CHECK(e <= prev * (1.0 + 1e-12));
    prev = e;
  }
  CHECK_THROWS_AS(ops.step(Eigen::VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("the decay rate matches the separable heat solution") {
  // With capacity 2, conductivity 2 I and u0 = sin(pi x1) sin(pi x2), the
  // exact solution is u0 exp(-2 pi^2 t).
  MacroProblem p = base_problem(32);
  p.g1 = p.g2 = named_scalar_field("sinpi");
  p.dt = 1e-4;
  p.t_end = 0.01;
  const Trajectory traj = solve_homogenized(p);
  REQUIRE(traj.fields.size() == 2);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(0.01));

  const auto& mesh = p.mesh;
  const double factor = std::exp(-2.0 * kPi * kPi * 0.01);
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= mesh.n2; ++j) {
    for (int i = 0; i <= mesh.n1; ++i) {
      const double exact = factor * std::sin(kPi * mesh.x1(i)) *
                           std::sin(kPi * mesh.x2(j));
      const double got = traj.fields.back()[mesh.node(i, j)];
      num += (got - exact) * (got - exact);
      den += exact * exact;
    }
  }
  CHECK(std::sqrt(num / den) <= 0.02);
  // Consistent-mass time stepping may undershoot slightly, never visibly.
  CHECK(traj.min_value >= -1e-6);
}

TEST_CASE("long runs settle into the steady balance") {
  MacroProblem p = base_problem(16);
  p.source_q = named_scalar_field("one");
  p.dt = 0.01;
  p.t_end = 2.0;
  p.snapshot_times = {0.5, 1.0};
  const Trajectory traj = solve_homogenized(p);
  REQUIRE(traj.times.size() == 4);
  CHECK(traj.times[1] == doctest::Approx(0.5));
  CHECK(traj.final_steady_residual <= 1e-3);
  CHECK(traj.min_value >= -1e-6);  // nonnegative forcing, zero start

  const MacroOperators ops(p);
  const Eigen::VectorXd steady = ops.solve_steady();
  CHECK(ops.steady_residual(steady) <= 1e-12);
  CHECK((traj.fields.back() - steady).norm() <= 1e-3 * steady.norm());

  // The steady field of a positive source is positive inside.
  CHECK(steady[p.mesh.node(8, 8)] > 0.0);
}

TEST_CASE("anisotropic conductivities steer the steady profile") {
  MacroProblem p = base_problem(16);
  p.source_q = named_scalar_field("one");
  // Strong transport in x1 flattens the profile along x1.
  p.conductivity = [](double, double) {
    return (Eigen::Matrix2d() << 10.0, 0.0, 0.0, 1.0).finished();
  };
  const MacroOperators fast1(p);
  const Eigen::VectorXd ua = fast1.solve_steady();
  p.conductivity = isotropic(1.0);
  const MacroOperators iso(p);
  const Eigen::VectorXd ui = iso.solve_steady();
  CHECK(ua[p.mesh.node(8, 8)] < ui[p.mesh.node(8, 8)]);
}

TEST_CASE("invalid macroscale problems are rejected") {
  MacroProblem p = base_problem(8);

  MacroProblem neg = p;
  neg.c11 = constant_field(-2.0);
  neg.c22 = constant_field(1.0);
  CHECK_THROWS_AS(MacroOperators{neg}, SolveError);

  MacroProblem indef = p;
  indef.conductivity = [](double x1, double) {
    const double d = x1 > 0.5 ? -1.0 : 1.0;
    return (Eigen::Matrix2d() << d, 0.0, 0.0, 1.0).finished();
  };
  CHECK_THROWS_AS(MacroOperators{indef}, SolveError);

  MacroProblem baddt = p;
  baddt.dt = 0.0;
  CHECK_THROWS_AS(MacroOperators{baddt}, ConfigError);

  MacroProblem offgrid = p;
  offgrid.dt = 1e-3;
  offgrid.t_end = 0.0015;  // not a multiple of dt
  CHECK_THROWS_AS(solve_homogenized(offgrid), ConfigError);

  MacroProblem oob = p;
  oob.dt = 1e-3;
  oob.t_end = 0.01;
  oob.snapshot_times = {0.02};
  CHECK_THROWS_AS(solve_homogenized(oob), ConfigError);

  CHECK_THROWS_AS(make_macro_mesh({0.0, 0.0}, {0.0, 1.0}, 8, 8), ConfigError);
  CHECK_THROWS_AS(make_macro_mesh({0.0, 0.0}, {1.0, 1.0}, 0, 8), ConfigError);

  // A mesh with no interior nodes cannot host the Dirichlet problem.
  MacroProblem hollow = p;
  hollow.mesh = make_macro_mesh({0.0, 0.0}, {1.0, 1.0}, 1, 8);
  CHECK_THROWS_AS(MacroOperators{hollow}, ConfigError);
}
