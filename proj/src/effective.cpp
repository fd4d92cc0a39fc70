#include "mchom/effective.hpp"

#include <cmath>

namespace mchom {

EffectiveTensors effective_tensor(const PeriodicFESpace& eval_space,
                                  const CoefficientModel& model, const Xpt& x,
                                  const CellSolution& sol) {
  for (int dir = 0; dir < 2; ++dir) {
    if (sol.dirs[dir].empty()) {
      throw ConfigError("effective_tensor: missing solution direction");
    }
  }
  EffectiveTensors out;
  out.x = x;
  const int n = eval_space.n(), nq = eval_space.nq();
  double c11 = 0.0, c22 = 0.0;
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      for (int q = 0; q < nq; ++q) {
        const double y1 = eval_space.qpoint_y1(ex, q);
        const double y2 = eval_space.qpoint_y2(ey, q);
        const double w = eval_space.jw(q);
        const double k1 = model.eval(Field::K1, x, y1, y2);
        const double k2 = model.eval(Field::K2, x, y1, y2);
        c11 += w * model.eval(Field::C11, x, y1, y2);
        c22 += w * model.eval(Field::C22, x, y1, y2);
        for (int j = 0; j < 2; ++j) {
          const EvalResult n1 = eval_field_sum(sol.dirs[j], 0, y1, y2);
          const EvalResult n2 = eval_field_sum(sol.dirs[j], 1, y1, y2);
          const double d1[2] = {n1.dy1, n1.dy2};
          const double d2[2] = {n2.dy1, n2.dy2};
          for (int i = 0; i < 2; ++i) {
            const double delta = (i == j) ? 1.0 : 0.0;
            out.k1_star(i, j) += w * k1 * (delta + d1[i]);
            out.k2_star(i, j) += w * k2 * (delta + d2[i]);
          }
        }
      }
    }
  }
  out.c11_avg = c11;
  out.c22_avg = c22;
  out.q_avg = 1.0;
  return out;
}

StructureReport check_structure(const EffectiveTensors& t) {
  const Eigen::Matrix2d s = t.k1_star + t.k2_star;
  StructureReport r;
  r.asymmetry = (s - s.transpose()).cwiseAbs().maxCoeff();
  const Eigen::Matrix2d sym = 0.5 * (s + s.transpose());
  // Closed-form eigenvalues of a symmetric 2x2 matrix.
  const double tr = sym(0, 0) + sym(1, 1);
  const double disc = std::sqrt((sym(0, 0) - sym(1, 1)) *
                                    (sym(0, 0) - sym(1, 1)) +
                                4.0 * sym(0, 1) * sym(0, 1));
  r.min_eig_sum = 0.5 * (tr - disc);
  return r;
}

}  // namespace mchom
