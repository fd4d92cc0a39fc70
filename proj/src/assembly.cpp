#include "mchom/assembly.hpp"

#include <cmath>

namespace mchom {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::SparseMatrix<double> from_triplets(int rows, int cols,
                                          const Triplets& t) {
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> CoupledSystem::block_matrix() const {
  Triplets t;
  t.reserve(static_cast<size_t>(4) * (A1.nonZeros() + A2.nonZeros() +
                                      2 * MQ.nonZeros()));
  auto add_block = [&](const Eigen::SparseMatrix<double>& m, int r0, int c0,
                       double s) {
    for (int k = 0; k < m.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
        t.emplace_back(r0 + static_cast<int>(it.row()),
                       c0 + static_cast<int>(it.col()), s * it.value());
      }
    }
  };
  add_block(A1, 0, 0, 1.0);
  add_block(MQ, 0, 0, 1.0);
  add_block(MQ, 0, dim, -1.0);
  add_block(MQ, dim, 0, -1.0);
  add_block(A2, dim, dim, 1.0);
  add_block(MQ, dim, dim, 1.0);
  return from_triplets(2 * dim, 2 * dim, t);
}

Eigen::SparseMatrix<double> CoupledSystem::bordered_matrix() const {
  const Eigen::SparseMatrix<double> K = block_matrix();
  Triplets t;
  t.reserve(static_cast<size_t>(K.nonZeros()) + 4 * dim);
  for (int k = 0; k < K.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     it.value());
    }
  }
  for (int i = 0; i < 2 * dim; ++i) {
    if (g[i] != 0.0) {
      t.emplace_back(i, 2 * dim, g[i]);
      t.emplace_back(2 * dim, i, g[i]);
    }
  }
  return from_triplets(2 * dim + 1, 2 * dim + 1, t);
}

CoupledSystem assemble_system(const PeriodicFESpace& space,
                              const CoefficientModel& model, const Xpt& x) {
  const int n = space.n(), nq = space.nq(), dim = space.dim();
  CoupledSystem sys;
  sys.space = &space;
  sys.dim = dim;
  sys.g = Eigen::VectorXd::Zero(2 * dim);
  Triplets t1, t2, tq;
  const size_t guess = static_cast<size_t>(n) * n * 16;
  t1.reserve(guess);
  t2.reserve(guess);
  tq.reserve(guess);
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      const auto dofs = space.element_dofs(ex, ey);
      for (int q = 0; q < nq; ++q) {
        const double y1 = space.qpoint_y1(ex, q);
        const double y2 = space.qpoint_y2(ey, q);
        const double k1 = model.eval(Field::K1, x, y1, y2);
        const double k2 = model.eval(Field::K2, x, y1, y2);
        const double qv = model.eval(Field::Q, x, y1, y2);
        if (!(k1 > 0.0) || !(k2 > 0.0) || !(qv > 0.0)) {
          throw SolveError("non-positive coefficient at a quadrature point");
        }
        const double w = space.jw(q);
        for (int a = 0; a < 4; ++a) {
          const double ga1 = space.dshape_dy1(a, q);
          const double ga2 = space.dshape_dy2(a, q);
          const double sa = space.shape(a, q);
          sys.g[dofs[a]] += w * sa;
          for (int b = 0; b < 4; ++b) {
            const double grad_ab =
                ga1 * space.dshape_dy1(b, q) + ga2 * space.dshape_dy2(b, q);
            const double mass_ab = sa * space.shape(b, q);
            t1.emplace_back(dofs[a], dofs[b], w * k1 * grad_ab);
            t2.emplace_back(dofs[a], dofs[b], w * k2 * grad_ab);
            tq.emplace_back(dofs[a], dofs[b], w * qv * mass_ab);
          }
        }
      }
    }
  }
  sys.A1 = from_triplets(dim, dim, t1);
  sys.A2 = from_triplets(dim, dim, t2);
  sys.MQ = from_triplets(dim, dim, tq);
  sys.g.tail(dim) = sys.g.head(dim);
  return sys;
}

Eigen::VectorXd assemble_rhs_full(const PeriodicFESpace& space,
                                  const CoefficientModel& model, const Xpt& x,
                                  int dir) {
  if (dir < 0 || dir > 1) {
    throw ConfigError("assemble_rhs_full: direction must be 0 or 1");
  }
  const int n = space.n(), nq = space.nq(), dim = space.dim();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * dim);
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      const auto dofs = space.element_dofs(ex, ey);
      for (int q = 0; q < nq; ++q) {
        const double y1 = space.qpoint_y1(ex, q);
        const double y2 = space.qpoint_y2(ey, q);
        const double k1 = model.eval(Field::K1, x, y1, y2);
        const double k2 = model.eval(Field::K2, x, y1, y2);
        const double w = space.jw(q);
        for (int a = 0; a < 4; ++a) {
          const double ga = (dir == 0) ? space.dshape_dy1(a, q)
                                       : space.dshape_dy2(a, q);
          b[dofs[a]] -= w * k1 * ga;
          b[dim + dofs[a]] -= w * k2 * ga;
        }
      }
    }
  }
  return b;
}

Eigen::VectorXd assemble_rhs_correction(
    const PeriodicFESpace& space, const CoefficientModel& model, const Xpt& x,
    const std::vector<CorrectionParent>& parents, int dir) {
  if (dir < 0 || dir > 1) {
    throw ConfigError("assemble_rhs_correction: direction must be 0 or 1");
  }
  double wsum = 0.0;
  for (const CorrectionParent& p : parents) {
    if (p.fields == nullptr) {
      throw ConfigError("assemble_rhs_correction: missing parent solution");
    }
    wsum += p.cj;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw ConfigError(
        "assemble_rhs_correction: parent weights must sum to 1");
  }
  const int n = space.n(), nq = space.nq(), dim = space.dim();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * dim);
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      const auto dofs = space.element_dofs(ex, ey);
      for (int q = 0; q < nq; ++q) {
        const double y1 = space.qpoint_y1(ex, q);
        const double y2 = space.qpoint_y2(ey, q);
        const double w = space.jw(q);
        const double k1x = model.eval(Field::K1, x, y1, y2);
        const double k2x = model.eval(Field::K2, x, y1, y2);
        const double qx = model.eval(Field::Q, x, y1, y2);
        // Accumulated over parents: flux-style contributions per continuum
        // (components of a vector against grad phi) and the exchange term
        // value against (phi_1 - phi_2).
        double f1y1 = 0, f1y2 = 0, f2y1 = 0, f2y2 = 0, exch = 0;
        for (const CorrectionParent& p : parents) {
          const double dk1 = k1x - model.eval(Field::K1, p.xj, y1, y2);
          const double dk2 = k2x - model.eval(Field::K2, p.xj, y1, y2);
          const double dq = model.eval(Field::Q, p.xj, y1, y2) - qx;
          const EvalResult n1 = eval_field_sum(*p.fields, 0, y1, y2);
          const EvalResult n2 = eval_field_sum(*p.fields, 1, y1, y2);
          const double e1 = (dir == 0) ? 1.0 : 0.0;
          const double e2 = (dir == 1) ? 1.0 : 0.0;
          f1y1 += p.cj * dk1 * (n1.dy1 + e1);
          f1y2 += p.cj * dk1 * (n1.dy2 + e2);
          f2y1 += p.cj * dk2 * (n2.dy1 + e1);
          f2y2 += p.cj * dk2 * (n2.dy2 + e2);
          exch += p.cj * dq * (n1.value - n2.value);
        }
        for (int a = 0; a < 4; ++a) {
          const double ga1 = space.dshape_dy1(a, q);
          const double ga2 = space.dshape_dy2(a, q);
          const double sa = space.shape(a, q);
          b[dofs[a]] += w * (-(f1y1 * ga1 + f1y2 * ga2) + exch * sa);
          b[dim + dofs[a]] += w * (-(f2y1 * ga1 + f2y2 * ga2) - exch * sa);
        }
      }
    }
  }
  return b;
}

}  // namespace mchom
