#pragma once

#include <array>
#include <vector>

#include "mchom/coefficients.hpp"

namespace mchom {

/// One macroscopic lattice point.  Coordinates are kept as exact integer
/// multiples k of the finest grid spacing H * 2^-L per axis, so set
/// membership, levels and distances are computed without floating-point
/// comparisons.
struct MacroPoint {
  std::array<long, 2> k{0, 0};
  Xpt x;
  int level = 0;  ///< the disjoint level set S_level this point belongs to
};

struct ParentRef {
  int point_index = 0;
  double weight = 1.0;
};

/// Nested macrogrids T_0 subset ... subset T_L on an axis-aligned box, with
/// the disjoint level sets S_l = T_l \ T_{l-1}, parent selection for the
/// hierarchical corrections, and the FE-level assignment
/// (points of S_l solve their corrections on space level L - l).
class MacroHierarchy {
 public:
  int macro_dim = 1;
  double H = 0.5;
  int L = 3;
  std::array<double, 2> lo{0.0, 0.0}, hi{1.0, 1.0};
  long m0 = 2;         ///< level-0 cells per axis (extent / H)
  long units = 8;      ///< finest subdivisions per H cell: 2^L
  long axis_points = 17;  ///< lattice nodes per axis at level L
  std::vector<MacroPoint> points;           ///< all of T_L in lattice order
  std::vector<std::vector<int>> levels;     ///< S_l as indices into points

  /// Grid spacing of T_l.
  double spacing(int l) const { return H / static_cast<double>(1L << l); }

  /// Index of the lattice point with integer coordinates k; -1 if outside.
  int index_of(const std::array<long, 2>& k) const;

  /// FE space level assigned to a point of S_l.
  int space_level(int point_index) const {
    return L - points[static_cast<size_t>(point_index)].level;
  }

  /// Parents of a non-anchor point.
  ///
  /// n_points = 1: the nearest point of the next-coarser grid T_{l-1}
  /// (a corner of the containing cell), weight 1.  Equidistant candidates
  /// are broken first toward the parent on the lowest hierarchy level --
  /// which keeps correction chains shallow and measurably tightens the
  /// worst-case effective-tensor error -- then toward the lexicographically
  /// smallest coordinate.
  ///
  /// n_points = 2^macro_dim: the corners of the containing T_{l-1} cell with
  /// multilinear interpolation weights; zero-weight corners are dropped.
  ///
  /// Throws ConfigError for anchor points (level 0) or other n_points.
  std::vector<ParentRef> select_parents(int point_index, int n_points) const;
};

/// Builds the hierarchy.  H must divide the domain extent; for macro_dim = 1
/// only the first axis of the box is used.
MacroHierarchy build_hierarchy(const std::array<double, 2>& lo,
                               const std::array<double, 2>& hi, int macro_dim,
                               double H, int L);

}  // namespace mchom
