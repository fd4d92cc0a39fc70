#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mchom/effective.hpp"
#include "mchom/errors.hpp"
#include "mchom/macro_hierarchy.hpp"

namespace mchom {

using ScalarField = std::function<double(double, double)>;
using TensorField = std::function<Eigen::Matrix2d(double, double)>;

/// Named closed-form fields accepted by run configurations for initial data
/// and sources: "zero", "one", "x1", "sinpi" (= sin(pi x1) sin(pi x2)).
ScalarField named_scalar_field(const std::string& name);

/// Piecewise-multilinear interpolant of per-lattice-point scalar values on
/// the finest macrogrid; constant in x2 for one-dimensional networks.
/// Reproduces the stored values exactly at lattice abscissae.
ScalarField scalar_from_network(const MacroHierarchy& hierarchy,
                                const std::vector<double>& values);

/// Same, entrywise, for the conductivity tensor k1* + k2*.
TensorField conductivity_from_network(
    const MacroHierarchy& hierarchy,
    const std::vector<EffectiveTensors>& tensors);

/// Uniform rectangular grid on a box with bilinear elements and the
/// homogeneous Dirichlet condition on the whole boundary.
struct MacroMesh {
  std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};
  int n1 = 8, n2 = 8;  ///< elements per axis
  double hx = 0.125, hy = 0.125;

  int nodes() const { return (n1 + 1) * (n2 + 1); }
  int node(int i, int j) const { return j * (n1 + 1) + i; }
  double x1(int i) const { return lo[0] + i * hx; }
  double x2(int j) const { return lo[1] + j * hy; }
  bool boundary(int i, int j) const {
    return i == 0 || i == n1 || j == 0 || j == n2;
  }
};

MacroMesh make_macro_mesh(const std::array<double, 2>& lo,
                          const std::array<double, 2>& hi, int n1, int n2);

/// The homogenized parabolic problem: capacity (c11 + c22) u_t =
/// div(conductivity grad u) + 2 q on the mesh box, u = 0 on the boundary,
/// advanced with implicit Euler at fixed dt.
struct MacroProblem {
  MacroMesh mesh;
  ScalarField c11, c22;     ///< capacity weights; capacity = c11 + c22
  TensorField conductivity; ///< k1* + k2*
  ScalarField source_q;     ///< the assembled load is 2 q
  ScalarField g1, g2;       ///< per-continuum initial data
  double dt = 1e-3;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
};

/// Nodal weighted average (c11 g1 + c22 g2) / (c11 + c22); throws SolveError
/// on a non-positive denominator.
Eigen::VectorXd initial_condition(const MacroMesh& mesh, const ScalarField& g1,
                                  const ScalarField& g2,
                                  const ScalarField& c11,
                                  const ScalarField& c22);

/// Assembled, factored operators of one problem; checks capacity positivity
/// and conductivity positive-definiteness at every quadrature point.
class MacroOperators {
 public:
  explicit MacroOperators(const MacroProblem& p);

  const MacroMesh& mesh() const { return p_.mesh; }

  /// Initial field with the Dirichlet condition applied on the boundary.
  Eigen::VectorXd initial() const;

  /// One implicit-Euler step (M + dt K) u+ = M u + dt F on interior nodes;
  /// boundary entries of the returned field are zero.
  Eigen::VectorXd step(const Eigen::VectorXd& u) const;

  /// 0.5 u^T M u (capacity-weighted, interior).
  double energy(const Eigen::VectorXd& u) const;

  /// Relative residual |K u - F| / max(|F|, 1) of the steady equation.
  double steady_residual(const Eigen::VectorXd& u) const;

  /// Solution of the steady problem K u = F.
  Eigen::VectorXd solve_steady() const;

 private:
  Eigen::VectorXd restrict_interior(const Eigen::VectorXd& full) const;
  Eigen::VectorXd extend_full(const Eigen::VectorXd& interior) const;

  MacroProblem p_;
  std::vector<int> reduced_index_;  ///< node -> interior index or -1
  std::vector<int> interior_nodes_;
  Eigen::SparseMatrix<double> M_, K_;
  Eigen::VectorXd F_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> stepper_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> fields;  ///< full nodal snapshots
  double min_value = 0.0;  ///< smallest nodal value over every computed step
  double final_steady_residual = 0.0;
};

/// Implicit-Euler time loop from the weighted initial condition to t_end,
/// recording t = 0, the requested snapshot times (rounded to the nearest
/// step), and t_end.  t_end must be a multiple of dt.
Trajectory solve_homogenized(const MacroProblem& p);

}  // namespace mchom
