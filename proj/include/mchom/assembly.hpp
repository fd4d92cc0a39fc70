#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "mchom/coefficients.hpp"
#include "mchom/fe_space.hpp"

namespace mchom {

/// The coupled two-continuum cell operator at one macro point, in block form
///   K = [[A1 + MQ, -MQ], [-MQ, A2 + MQ]]
/// where A1, A2 are the stiffness blocks of the two permeabilities and MQ is
/// the exchange mass block with weight Q.  K is symmetric positive
/// semidefinite with kernel spanned by the constant pair (1, 1); the
/// constraint vector g realizes the zero-mean normalization
/// g . (u1, u2) = integral over the cell of (u1 + u2).
struct CoupledSystem {
  const PeriodicFESpace* space = nullptr;
  int dim = 0;
  Eigen::SparseMatrix<double> A1, A2, MQ;
  Eigen::VectorXd g;  ///< length 2*dim

  /// Assembled 2dim x 2dim block matrix K.
  Eigen::SparseMatrix<double> block_matrix() const;

  /// K with the constraint appended as one symmetric border row/column.
  Eigen::SparseMatrix<double> bordered_matrix() const;
};

/// Assembles the coupled system with coefficients evaluated at (x, y_quad).
/// Throws SolveError if a non-positive coefficient value is met at a
/// quadrature point.
CoupledSystem assemble_system(const PeriodicFESpace& space,
                              const CoefficientModel& model, const Xpt& x);

/// Right-hand side of the plain cell problem for unit macroscopic gradient
/// direction dir (0 or 1): block k holds -integral of K_k e_dir . grad(phi).
Eigen::VectorXd assemble_rhs_full(const PeriodicFESpace& space,
                                  const CoefficientModel& model, const Xpt& x,
                                  int dir);

/// One parent entering a hierarchical correction: its macro point, its
/// interpolation weight, and its already-computed solution pair for the
/// direction being assembled.
struct CorrectionParent {
  Xpt xj;
  double cj = 1.0;
  const FieldSum* fields = nullptr;
};

/// Right-hand side of the correction problem at macro point x from weighted
/// parents {(x_j, c_j, N(x_j))} with sum of c_j equal to 1.  Per continuum k
/// it assembles the three coefficient-difference terms
///   -sum_j c_j (K_k(x,y) - K_k(x_j,y)) grad N_k(x_j) . grad phi_k
///   -sum_j c_j (K_k(x,y) - K_k(x_j,y)) e_dir . grad phi_k
///   +sum_j c_j (Q(x_j,y) - Q(x,y)) (N_1(x_j) - N_2(x_j)) (phi_1 - phi_2)
/// with parent solutions evaluated on their own (finer) spaces at the target
/// space's quadrature points.  Differences are formed pointwise at
/// quadrature points.
Eigen::VectorXd assemble_rhs_correction(
    const PeriodicFESpace& space, const CoefficientModel& model, const Xpt& x,
    const std::vector<CorrectionParent>& parents, int dir);

}  // namespace mchom
