#include "mchom/cell_solver.hpp"

#include <cmath>

namespace mchom {

ConstrainedSolver::ConstrainedSolver(const CoupledSystem& sys,
                                     const SolveOptions& opt)
    : sys_(&sys), opt_(opt) {
  direct_ = !opt.force_iterative &&
            (2 * static_cast<std::int64_t>(sys.dim) + 1 <=
             opt.direct_dim_limit);
  K_ = sys.block_matrix();
  if (direct_) {
    lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    Eigen::SparseMatrix<double> bordered = sys.bordered_matrix();
    bordered.makeCompressed();
    lu_->compute(bordered);
    if (lu_->info() != Eigen::Success) {
      throw SolveError(
          "singular factorization of the constrained cell system");
    }
  } else {
    inv_diag_ = K_.diagonal();
    for (int i = 0; i < inv_diag_.size(); ++i) {
      if (!(inv_diag_[i] > 0.0)) {
        throw SolveError("non-positive diagonal in the coupled operator");
      }
      inv_diag_[i] = 1.0 / inv_diag_[i];
    }
  }
}

Eigen::VectorXd ConstrainedSolver::solve(const Eigen::VectorXd& rhs,
                                         double* residual_out) const {
  const int m = 2 * sys_->dim;
  if (rhs.size() != m) {
    throw ConfigError("solve_constrained: rhs length mismatch");
  }
  const double bnorm = rhs.norm();
  Eigen::VectorXd u(m);
  double lambda = 0.0;
  if (direct_) {
    Eigen::VectorXd ext = Eigen::VectorXd::Zero(m + 1);
    ext.head(m) = rhs;
    const Eigen::VectorXd sol = lu_->solve(ext);
    if (lu_->info() != Eigen::Success) {
      throw SolveError("back substitution failed in the cell solver");
    }
    u = sol.head(m);
    lambda = sol[m];
  } else {
    // Conjugate gradients on the singular consistent system K u = rhs.  The
    // kernel is the constant pair; the Jacobi-preconditioned directions are
    // projected against it so iterates stay in its orthogonal complement,
    // and the zero-mean normalization is enforced at the end.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    auto deflate = [&](Eigen::VectorXd& v) {
      v.array() -= v.sum() / m;
    };
    u.setZero();
    Eigen::VectorXd r = rhs;
    deflate(r);
    Eigen::VectorXd z = inv_diag_.cwiseProduct(r);
    deflate(z);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double stop = opt_.tol * std::max(bnorm, 1e-300);
    int it = 0;
    while (r.norm() > stop) {
      if (++it > opt_.max_iter) {
        throw SolveError("constrained CG did not converge within max_iter");
      }
      const Eigen::VectorXd Kp = K_ * p;
      const double alpha = rz / p.dot(Kp);
      u += alpha * p;
      r -= alpha * Kp;
      z = inv_diag_.cwiseProduct(r);
      deflate(z);
      const double rz_new = r.dot(z);
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
    // Shift along the kernel to meet the zero-mean constraint exactly.
    const double gsum = sys_->g.sum();
    u -= (sys_->g.dot(u) / gsum) * ones;
  }
  const double res =
      (K_ * u + lambda * sys_->g - rhs).norm() / std::max(bnorm, 1.0);
  if (!(res <= opt_.tol)) {
    throw SolveError("cell solve residual " + std::to_string(res) +
                     " exceeds tolerance");
  }
  if (residual_out) *residual_out = res;
  return u;
}

Eigen::VectorXd solve_constrained(const CoupledSystem& sys,
                                  const Eigen::VectorXd& rhs,
                                  const SolveOptions& opt,
                                  double* residual_out) {
  return ConstrainedSolver(sys, opt).solve(rhs, residual_out);
}

FieldSum single_term(const PeriodicFESpace& space, Eigen::VectorXd n1,
                     Eigen::VectorXd n2) {
  FieldTerm t;
  t.space = &space;
  t.weight = 1.0;
  t.fields = std::make_shared<const std::array<Eigen::VectorXd, 2>>(
      std::array<Eigen::VectorXd, 2>{std::move(n1), std::move(n2)});
  return {t};
}

CellSolution solve_full(const PeriodicFESpace& space,
                        const CoefficientModel& model, const Xpt& x,
                        const SolveOptions& opt) {
  const CoupledSystem sys = assemble_system(space, model, x);
  const ConstrainedSolver solver(sys, opt);
  CellSolution sol;
  sol.x = x;
  sol.level_solved = space.level();
  sol.provenance = Provenance::AnchorFull;
  for (int dir = 0; dir < 2; ++dir) {
    const Eigen::VectorXd b = assemble_rhs_full(space, model, x, dir);
    double res = 0.0;
    const Eigen::VectorXd u = solver.solve(b, &res);
    sol.residual_norm = std::max(sol.residual_norm, res);
    sol.pair_mean = std::max(sol.pair_mean, std::abs(sys.g.dot(u)));
    sol.dirs[dir] =
        single_term(space, u.head(sys.dim), u.tail(sys.dim));
  }
  return sol;
}

EnergyNormParts energy_norm_parts(const PeriodicFESpace& eval_space,
                                  const FieldSum& a, const FieldSum* b) {
  for (const FieldSum* s : {&a, b}) {
    if (!s) continue;
    for (const FieldTerm& t : *s) {
      if (t.space->level() > eval_space.level() ||
          t.space->base_n() != eval_space.base_n()) {
        throw ConfigError(
            "energy_norm: evaluation space is coarser than an operand");
      }
    }
  }
  const int n = eval_space.n(), nq = eval_space.nq();
  double g1 = 0, g2 = 0, d = 0;
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      for (int q = 0; q < nq; ++q) {
        const double y1 = eval_space.qpoint_y1(ex, q);
        const double y2 = eval_space.qpoint_y2(ey, q);
        EvalResult r1 = eval_field_sum(a, 0, y1, y2);
        EvalResult r2 = eval_field_sum(a, 1, y1, y2);
        if (b) {
          const EvalResult s1 = eval_field_sum(*b, 0, y1, y2);
          const EvalResult s2 = eval_field_sum(*b, 1, y1, y2);
          r1.value -= s1.value;
          r1.dy1 -= s1.dy1;
          r1.dy2 -= s1.dy2;
          r2.value -= s2.value;
          r2.dy1 -= s2.dy1;
          r2.dy2 -= s2.dy2;
        }
        const double w = eval_space.jw(q);
        g1 += w * (r1.dy1 * r1.dy1 + r1.dy2 * r1.dy2);
        g2 += w * (r2.dy1 * r2.dy1 + r2.dy2 * r2.dy2);
        const double dv = r1.value - r2.value;
        d += w * dv * dv;
      }
    }
  }
  return {std::sqrt(g1), std::sqrt(g2), std::sqrt(d)};
}

double energy_norm(const FieldSum& a) {
  return energy_norm_parts(finest_space({&a}), a).total();
}

double energy_norm_diff(const FieldSum& a, const FieldSum& b) {
  return energy_norm_parts(finest_space({&a, &b}), a, &b).total();
}

}  // namespace mchom
