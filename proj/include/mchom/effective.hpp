#pragma once

#include <Eigen/Dense>

#include "mchom/cell_solver.hpp"

namespace mchom {

/// Homogenized tensors at one macro point, plus the cell averages the
/// macroscale solver consumes.  Entry (i, j) of k_star holds the integral
/// over the cell of K(x,y) (delta_ij + d N^j / d y_i).
struct EffectiveTensors {
  Xpt x;
  Eigen::Matrix2d k1_star = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d k2_star = Eigen::Matrix2d::Zero();
  double c11_avg = 1.0;
  double c22_avg = 1.0;
  double q_avg = 1.0;  ///< cell average of the source weight
};

/// Computes the tensors by quadrature on eval_space (the finest involved
/// space); each summand of a mixed-representation solution is evaluated on
/// its native space.  Only gradients of N enter, so the result is invariant
/// under constant shifts of the solution.
EffectiveTensors effective_tensor(const PeriodicFESpace& eval_space,
                                  const CoefficientModel& model, const Xpt& x,
                                  const CellSolution& sol);

/// Structural diagnostics: asymmetry of the tensor sum and the smallest
/// eigenvalue of its symmetric part (closed form for 2x2).
struct StructureReport {
  double asymmetry = 0.0;    ///< max |(S - S^T)_ij| for S = k1 + k2
  double min_eig_sum = 0.0;  ///< smallest eigenvalue of sym(k1 + k2)
};

StructureReport check_structure(const EffectiveTensors& t);

}  // namespace mchom
