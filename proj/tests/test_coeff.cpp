#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mchom/coefficients.hpp"

using namespace mchom;

namespace {
const Xpt x0{0.0, 0.0};
const Xpt x1{1.0, 0.0};
}  // namespace

TEST_CASE("the parametric trigonometric family evaluates its closed forms") {
  const auto m = CoefficientModel::paper4(1.0);
  CHECK(m.eval(Field::K1, x0, 0.25, 0.25) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(m.eval(Field::Q, x1, 0.25, 0.25) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(m.eval(Field::K1, x0, 0.125, 0.125) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(m.eval(Field::K2, x0, 0.125, 0.375) ==
        doctest::Approx(3.0 + 2.0 * std::sin(0.25 * std::acos(-1.0)) *
                                  std::cos(0.75 * std::acos(-1.0)))
            .epsilon(1e-12));

  // K2 is K1 with the cell coordinates swapped.
  for (double y1 : {0.1, 0.37, 0.82}) {
    for (double y2 : {0.05, 0.6, 0.93}) {
      CHECK(m.eval(Field::K2, x1, y1, y2) ==
            doctest::Approx(m.eval(Field::K1, x1, y2, y1)).epsilon(1e-15));
    }
  }
  // Capacities default to one.
  CHECK(m.eval(Field::C11, x1, 0.3, 0.4) == 1.0);
  CHECK(m.eval(Field::C22, x0, 0.9, 0.1) == 1.0);
}

TEST_CASE("constant models are constant and report their minimum") {
  const auto m = CoefficientModel::constant(2.0, 2.5, 3.0);
  for (double t : {0.0, 0.31, 0.77, 1.0}) {
    CHECK(m.eval(Field::K1, {t, 0.0}, t, 1.0 - t) == 2.0);
    CHECK(m.eval(Field::K2, {t, 0.0}, 1.0 - t, t) == 2.5);
    CHECK(m.eval(Field::Q, {t, 0.0}, t, t) == 3.0);
  }
  CHECK(m.coercivity() == doctest::Approx(2.0));
  CHECK(m.lipschitz_estimate() == 0.0);
}

TEST_CASE("evaluations are exactly periodic in the cell coordinates") {
  const auto models = {CoefficientModel::paper4(1.0),
                       CoefficientModel::laminate("cosine", 1.0)};
  for (const auto& m : models) {
    for (Field f : {Field::K1, Field::K2, Field::Q}) {
      // Dyadic coordinates, so the +/-1 shifts below are exact in binary
      // floating point and the wrapped value recovers t bit-for-bit.
      for (double t : {0.0, 0.25, 0.59375, 0.90625}) {
        const Xpt x{0.4, 0.0};
        CHECK(m.eval(f, x, 0.0, t) == m.eval(f, x, 1.0, t));
        CHECK(m.eval(f, x, t, 0.0) == m.eval(f, x, t, 1.0));
        CHECK(m.eval(f, x, t + 1.0, t) == m.eval(f, x, t, t));
        CHECK(m.eval(f, x, t, t - 1.0) == m.eval(f, x, t, t));
      }
    }
  }
}

TEST_CASE("fields stay above the declared lower bound") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& m :
       {CoefficientModel::paper4(1.0), CoefficientModel::paper4(1.5),
        CoefficientModel::paper4(0.1),
        CoefficientModel::laminate("cosine", 0.5),
        CoefficientModel::constant(2.0, 2.0, 3.0)}) {
    const double c = m.coercivity();
    CHECK(c > 0.0);
    double min_seen = 1e300;
    for (int s = 0; s < 10000; ++s) {
      const Xpt x{unit(rng), 0.0};
      const double y1 = unit(rng), y2 = unit(rng);
      for (Field f : {Field::K1, Field::K2, Field::Q}) {
        min_seen = std::min(min_seen, m.eval(f, x, y1, y2));
      }
    }
    CHECK(min_seen >= c - 1e-12);
  }
}

TEST_CASE("the layered model varies in the first cell coordinate only") {
  const auto m = CoefficientModel::laminate("cosine", 0.75);
  const double pi = std::acos(-1.0);
  for (double y1 : {0.0, 0.2, 0.55}) {
    const double expected = 2.0 + std::cos(2.0 * pi * y1);
    for (double y2 : {0.0, 0.4, 0.9}) {
      CHECK(m.eval(Field::K1, x0, y1, y2) ==
            doctest::Approx(expected).epsilon(1e-15));
      CHECK(m.eval(Field::K2, x1, y1, y2) ==
            doctest::Approx(expected).epsilon(1e-15));
      CHECK(m.eval(Field::Q, x0, y1, y2) == 0.75);
    }
  }
  CHECK(m.coercivity() == doctest::Approx(0.75));
  CHECK_THROWS_AS(CoefficientModel::laminate("sawtooth", 1.0), ConfigError);
}

TEST_CASE("tabulated models interpolate their samples multilinearly") {
  TabulatedField k1{0.0, 1.0, 3, 3, {}}, k2, q;
  const auto fill = [](TabulatedField& t, double c0, double cx, double cy1,
                       double cy2) {
    t.nx = 3;
    t.ny = 3;
    t.x_lo = 0.0;
    t.x_hi = 1.0;
    t.data.clear();
    for (int ix = 0; ix < 3; ++ix) {
      for (int iy1 = 0; iy1 < 3; ++iy1) {
        for (int iy2 = 0; iy2 < 3; ++iy2) {
          t.data.push_back(c0 + cx * (0.5 * ix) + cy1 * (0.5 * iy1) +
                           cy2 * (0.5 * iy2));
        }
      }
    }
  };
  fill(k1, 1.0, 0.5, 0.25, 0.125);
  fill(k2, 2.0, -0.5, 0.0, 0.25);
  fill(q, 1.5, 0.25, 0.125, 0.0);
  const auto m = CoefficientModel::tabulated(k1, k2, q);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    const double x = unit(rng), y1 = 0.999 * unit(rng), y2 = 0.999 * unit(rng);
    CHECK(m.eval(Field::K1, {x, 0.0}, y1, y2) ==
          doctest::Approx(1.0 + 0.5 * x + 0.25 * y1 + 0.125 * y2)
              .epsilon(1e-12));
    CHECK(m.eval(Field::K2, {x, 0.0}, y1, y2) ==
          doctest::Approx(2.0 - 0.5 * x + 0.25 * y2).epsilon(1e-12));
  }
  // Cell coordinates wrap, so y = 1 reads the samples at y = 0.
  CHECK(m.eval(Field::K1, {0.5, 0.0}, 1.0, 0.5) ==
        doctest::Approx(m.eval(Field::K1, {0.5, 0.0}, 0.0, 0.5)));
  // The smallest sample is the declared lower bound.
  CHECK(m.coercivity() == doctest::Approx(1.0));
  // Queries outside the sampled macro interval are refused.
  CHECK_THROWS_AS(m.eval(Field::K1, {1.5, 0.0}, 0.5, 0.5), SolveError);
  CHECK_THROWS_AS(m.eval(Field::Q, {-0.25, 0.0}, 0.5, 0.5), SolveError);

  TabulatedField bad = k1;
  bad.data.pop_back();
  CHECK_THROWS_AS(CoefficientModel::tabulated(bad, k2, q), ConfigError);
  TabulatedField neg = k1;
  neg.data[4] = -0.5;
  CHECK_THROWS_AS(CoefficientModel::tabulated(neg, k2, q), ConfigError);
}

TEST_CASE("the macro-Lipschitz estimate behaves as documented") {
  CHECK(CoefficientModel::constant(1.0, 2.0, 3.0).lipschitz_estimate() == 0.0);
  const double l1 = CoefficientModel::paper4(1.0).lipschitz_estimate();
  CHECK(l1 >= 1.0 - 1e-9);
  CHECK(l1 <= 2.0);
  // The family is linear in a * x1, so the estimate scales exactly with a.
  const double l01 = CoefficientModel::paper4(0.1).lipschitz_estimate();
  CHECK(l01 == doctest::Approx(0.1 * l1).epsilon(1e-12));
}

TEST_CASE("invalid model parameters are rejected up front") {
  CHECK_THROWS_AS(CoefficientModel::paper4(2.0), ConfigError);
  CHECK_THROWS_AS(CoefficientModel::paper4(-0.1), ConfigError);
  CHECK_THROWS_AS(CoefficientModel::constant(0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(CoefficientModel::constant(1.0, 1.0, -2.0), ConfigError);
}
