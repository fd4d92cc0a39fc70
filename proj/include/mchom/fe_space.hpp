#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "mchom/errors.hpp"

namespace mchom {

/// Gauss-Legendre rule mapped to [0,1]; weights sum to 1.
struct GaussRule {
  std::vector<double> pts;
  std::vector<double> wts;
};

/// Returns the npts-point Gauss-Legendre rule on [0,1] (npts >= 1).
GaussRule gauss_rule(int npts);

/// One level of the nested hierarchy of conforming bilinear (Q1) spaces on
/// the unit cell [0,1]^2 with periodic identification of opposite faces.
/// n cells per side, n = base_n * 2^level; dim = n^2 after identification.
/// Immutable after construction and shareable across threads.
class PeriodicFESpace {
 public:
  PeriodicFESpace(int base_n, int level, int L, int qorder);

  int base_n() const { return base_n_; }
  int level() const { return level_; }
  int max_level() const { return L_; }
  int n() const { return n_; }
  double h() const { return h_; }
  int dim() const { return dim_; }
  int qorder() const { return qorder_; }
  int nq() const { return static_cast<int>(qw_.size()); }  // points per element

  /// Periodic DOF index of grid node (i, j); any integers accepted.
  int dof(int i, int j) const {
    return mod(j) * n_ + mod(i);
  }

  /// Corner DOFs of element (ex, ey), in the corner order
  /// (0,0), (1,0), (1,1), (0,1) of the reference square.
  std::array<int, 4> element_dofs(int ex, int ey) const {
    return {dof(ex, ey), dof(ex + 1, ey), dof(ex + 1, ey + 1),
            dof(ex, ey + 1)};
  }

  // Reference quadrature data, index q in [0, nq):
  double qx(int q) const { return qx_[q]; }   ///< reference coordinate in [0,1]
  double qy(int q) const { return qy_[q]; }
  double qweight(int q) const { return qw_[q]; }
  double jw(int q) const { return qw_[q] * h_ * h_; }  ///< weight x Jacobian
  /// Shape value of corner node a at quadrature point q.
  double shape(int a, int q) const { return shp_[a][q]; }
  /// Physical gradient components of shape a at quadrature point q.
  double dshape_dy1(int a, int q) const { return dshp1_[a][q]; }
  double dshape_dy2(int a, int q) const { return dshp2_[a][q]; }

  /// Global coordinates of quadrature point q in element (ex, ey).
  double qpoint_y1(int ex, int q) const { return (ex + qx_[q]) * h_; }
  double qpoint_y2(int ey, int q) const { return (ey + qy_[q]) * h_; }

 private:
  int mod(int i) const {
    int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  int base_n_, level_, L_, n_, qorder_, dim_;
  double h_;
  std::vector<double> qx_, qy_, qw_;
  std::array<std::vector<double>, 4> shp_, dshp1_, dshp2_;
};

/// Builds one space of the hierarchy.  Throws ConfigError on invalid sizes
/// and when the DOF count would exceed max_dim.
PeriodicFESpace build_space(int base_n, int level, int L, int qorder = 3,
                            std::int64_t max_dim = (std::int64_t{1} << 24));

/// All levels 0..L of the nested hierarchy, built once and shared.
/// Element addresses are stable for the lifetime of the object.
struct SpaceHierarchy {
  int base_n = 2;
  int L = 3;
  int qorder = 3;
  std::vector<PeriodicFESpace> spaces;

  const PeriodicFESpace& at(int level) const {
    if (level < 0 || level > L) throw ConfigError("space level out of range");
    return spaces[static_cast<size_t>(level)];
  }
};

SpaceHierarchy build_space_hierarchy(int base_n, int L, int qorder = 3,
                                     std::int64_t max_dim = (std::int64_t{1}
                                                             << 24));

/// Value and physical gradient of an FE function at one cell point.
struct EvalResult {
  double value = 0.0;
  double dy1 = 0.0;
  double dy2 = 0.0;
};

/// Evaluates the periodic FE function with nodal coefficients v at (y1, y2).
/// Points on an element edge use the element to the right/above (and points
/// at y = 1 the last element); the value is continuous, the gradient takes
/// the one-sided limit there.
EvalResult eval_nodal(const PeriodicFESpace& s, const Eigen::VectorXd& v,
                      double y1, double y2);

/// Bilinear interpolation from explicit corner values (corner order as in
/// element_dofs) at reference coordinates (xi, eta) in [0,1]^2; gradients
/// are returned in physical units for element size h.
EvalResult eval_element_corners(const std::array<double, 4>& corners,
                                double xi, double eta, double h);

/// Re-represents v on a finer nested space of the same base_n; the
/// represented function is unchanged (exact for bilinear elements on nested
/// dyadic grids).  Throws ConfigError for non-nested spaces.
Eigen::VectorXd prolong(const Eigen::VectorXd& v, const PeriodicFESpace& from,
                        const PeriodicFESpace& to);

/// Per-element values and gradients of an FE function at all quadrature
/// points: index [element = ey*n + ex][q].
struct QuadratureFieldData {
  std::vector<std::vector<double>> value, dy1, dy2;
};
QuadratureFieldData values_and_gradients_at_quadrature(
    const PeriodicFESpace& s, const Eigen::VectorXd& v);

/// One weighted summand of a cell-solution representation: a pair of nodal
/// fields (one per continuum) living on some space of the hierarchy.
/// Vectors are shared, so combinations reference parent storage instead of
/// copying it.
struct FieldTerm {
  const PeriodicFESpace* space = nullptr;
  double weight = 1.0;
  std::shared_ptr<const std::array<Eigen::VectorXd, 2>> fields;
};

/// A cell-solution pair represented as a weighted sum of nodal fields on
/// (possibly different) nested spaces.  Evaluation always resolves each
/// summand on its native space; nothing is ever projected to a coarser one.
using FieldSum = std::vector<FieldTerm>;

/// Evaluates component k (0 or 1) of the weighted sum at a cell point.
EvalResult eval_field_sum(const FieldSum& sum, int k, double y1, double y2);

/// The finest space appearing in the given sums (throws if all empty).
const PeriodicFESpace& finest_space(
    std::initializer_list<const FieldSum*> sums);

}  // namespace mchom
