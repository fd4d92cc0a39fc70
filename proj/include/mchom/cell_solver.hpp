#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cstdint>
#include <memory>
#include <vector>

#include "mchom/assembly.hpp"

namespace mchom {

struct SolveOptions {
  double tol = 1e-10;          ///< relative residual tolerance
  int max_iter = 20000;        ///< iteration cap of the CG path
  std::int64_t direct_dim_limit = 100000;  ///< direct factorization up to here
  bool force_iterative = false;
};

/// Solver for the constrained coupled system, reusable across right-hand
/// sides at one (x, level): sparse direct factorization of the bordered
/// symmetric system below direct_dim_limit unknowns, projected
/// diagonally-preconditioned conjugate gradients above.
class ConstrainedSolver {
 public:
  ConstrainedSolver(const CoupledSystem& sys, const SolveOptions& opt = {});

  /// Returns the unique solution with zero combined mean; throws SolveError
  /// on singular factorization or non-convergence.  residual_out, when
  /// given, receives the achieved relative residual.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs,
                        double* residual_out = nullptr) const;

  bool direct() const { return direct_; }

 private:
  const CoupledSystem* sys_;
  SolveOptions opt_;
  bool direct_;
  Eigen::SparseMatrix<double> K_;
  Eigen::VectorXd inv_diag_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu_;
};

/// One-shot convenience wrapper around ConstrainedSolver.
Eigen::VectorXd solve_constrained(const CoupledSystem& sys,
                                  const Eigen::VectorXd& rhs,
                                  const SolveOptions& opt = {},
                                  double* residual_out = nullptr);

enum class Provenance { AnchorFull, Corrected };

/// Cell-problem solution at one macro point: a weighted-sum representation
/// of the pair (N_1, N_2) for each unit direction, plus bookkeeping.
struct CellSolution {
  Xpt x;
  int level_solved = 0;
  Provenance provenance = Provenance::AnchorFull;
  std::vector<int> parent_points;     ///< hierarchy point indices (corrected)
  std::vector<double> parent_weights;
  double residual_norm = 0.0;  ///< max over directions
  double pair_mean = 0.0;      ///< recorded integral of (N1 + N2) over the cell
  double correction_energy = 0.0;  ///< analysis norm of the locally solved
                                   ///< part, max over directions (corrected
                                   ///< points only; 0 for anchors)
  std::array<FieldSum, 2> dirs;
};

/// Builds a single-term representation from plain nodal vectors.
FieldSum single_term(const PeriodicFESpace& space, Eigen::VectorXd n1,
                     Eigen::VectorXd n2);

/// Solves the plain (uncorrected) cell problem at x on the given space for
/// both directions, reusing one factorization.
CellSolution solve_full(const PeriodicFESpace& space,
                        const CoefficientModel& model, const Xpt& x,
                        const SolveOptions& opt = {});

/// The three parts of the analysis norm of a pair (phi_1, phi_2):
/// L2 norms of grad phi_1, grad phi_2, and of phi_1 - phi_2.  The norm is
/// their plain sum.
struct EnergyNormParts {
  double grad1 = 0.0;
  double grad2 = 0.0;
  double diff = 0.0;
  double total() const { return grad1 + grad2 + diff; }
};

/// Computes the norm parts of a (or of a - b when b is given) by quadrature
/// on eval_space, which must be at least as fine as every space appearing in
/// the operands.
EnergyNormParts energy_norm_parts(const PeriodicFESpace& eval_space,
                                  const FieldSum& a,
                                  const FieldSum* b = nullptr);

/// Norm of a single operand, evaluated on the finest space it references.
double energy_norm(const FieldSum& a);

/// Norm of a - b, evaluated on the finest space either operand references.
double energy_norm_diff(const FieldSum& a, const FieldSum& b);

}  // namespace mchom
