#pragma once

#include <cstddef>
#include <vector>

#include "mchom/cell_solver.hpp"
#include "mchom/coefficients.hpp"
#include "mchom/effective.hpp"
#include "mchom/fe_space.hpp"
#include "mchom/macro_hierarchy.hpp"

namespace mchom {

/// Degree-of-freedom accounting for one hierarchy level: |S_l| correction
/// (or anchor) problems, each on the space of level L - l.
struct DofLedgerRow {
  int macro_level = 0;
  int fe_level = 0;
  std::size_t points = 0;
  std::size_t space_dim = 0;
  std::size_t dofs = 0;  ///< points * space_dim, per field per direction
};

/// Exact DOF counts of the hierarchical strategy against the flat reference
/// strategy (every point solved on the finest space).  The headline totals
/// are per field per direction; grand totals carry the factor
/// (2 fields) x (macro_dim directions).
struct DofLedger {
  std::vector<DofLedgerRow> rows;
  std::size_t hier_total = 0;        ///< per field per direction
  std::size_t full_total = 0;        ///< per field per direction
  std::size_t hier_grand_total = 0;  ///< x 2 fields x directions
  std::size_t full_grand_total = 0;
};

DofLedger dof_budget(const MacroHierarchy& hierarchy,
                     const SpaceHierarchy& spaces);

struct HierOptions {
  int interp_points = 1;  ///< 1 or 2^macro_dim
  int workers = 1;
  bool reproducible = false;  ///< drop wall-clock measurements from results
  SolveOptions solver{};
};

struct PhaseTiming {
  int macro_level = 0;
  double seconds = 0.0;
};

/// Result of the hierarchical run: one solution per point of the finest
/// macrogrid, indexed like MacroHierarchy::points, in the native mixed
/// representation (local correction plus weighted references to parent
/// terms on finer spaces).
struct HierRunResult {
  std::vector<CellSolution> solutions;
  DofLedger ledger;
  std::vector<PhaseTiming> timings;  ///< empty under reproducible
};

/// Runs the three-step hierarchical algorithm: anchors (level-0 points)
/// solved fully on the finest space, then level by level each point of S_l
/// gets a correction solved on space level L - l against its interpolated
/// parents, combined as correction + sum_j c_j * parent_j.
HierRunResult hierarchical_solve(const CoefficientModel& model,
                                 const MacroHierarchy& hierarchy,
                                 const SpaceHierarchy& spaces,
                                 const HierOptions& opts = {});

/// Reference strategy: the plain cell problem at every macrogrid point,
/// solved on the finest space.  Indexed like MacroHierarchy::points.
std::vector<CellSolution> full_reference_solve(const CoefficientModel& model,
                                               const MacroHierarchy& hierarchy,
                                               const SpaceHierarchy& spaces,
                                               const HierOptions& opts = {});

/// Per-point outcome of hierarchical vs reference: percentage relative
/// errors 100 |full - hier| / |full| of every effective-tensor entry, the
/// largest absolute off-diagonal discrepancy, and the analysis-norm
/// distance between the solution pairs (max over directions).
struct PointComparison {
  Xpt x;
  int level = 0;
  double k1_err_pct[2][2] = {{0, 0}, {0, 0}};
  double k2_err_pct[2][2] = {{0, 0}, {0, 0}};
  double offdiag_absdiff = 0.0;
  double energy_diff = 0.0;
  double correction_energy = 0.0;
  double max_diag_err_pct = 0.0;  ///< max over the four diagonal entries
};

struct LevelSummary {
  int level = 0;
  std::size_t count = 0;
  double max_err_pct = 0.0;   ///< over diagonal entries of points in S_l
  double mean_err_pct = 0.0;  ///< of per-point max_diag_err_pct
  double max_energy_diff = 0.0;
  double median_correction_energy = 0.0;
};

struct ComparisonReport {
  std::vector<PointComparison> points;  ///< hierarchy point order
  std::vector<LevelSummary> levels;
  double max_err_pct = 0.0;
  double max_energy_diff = 0.0;
};

/// Compares a hierarchical run against the reference solves point by point.
/// Effective tensors of both operands are evaluated with quadrature on the
/// finest space.  Throws ConfigError when the point sets disagree.
ComparisonReport compare(const CoefficientModel& model,
                         const MacroHierarchy& hierarchy,
                         const SpaceHierarchy& spaces,
                         const HierRunResult& hier,
                         const std::vector<CellSolution>& full);

/// Effective tensors for every point of a solution set, evaluated with
/// quadrature on the finest space.  Parallel over points.
std::vector<EffectiveTensors> effective_tensors_all(
    const CoefficientModel& model, const MacroHierarchy& hierarchy,
    const SpaceHierarchy& spaces, const std::vector<CellSolution>& sols,
    int workers = 1);

}  // namespace mchom
