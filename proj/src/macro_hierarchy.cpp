#include "mchom/macro_hierarchy.hpp"

#include <algorithm>
#include <cmath>

namespace mchom {

namespace {

/// Number of times 2 divides k (k > 0).
int trailing_zeros(long k) {
  int t = 0;
  while ((k & 1L) == 0) {
    k >>= 1;
    ++t;
  }
  return t;
}

}  // namespace

int MacroHierarchy::index_of(const std::array<long, 2>& k) const {
  for (int d = 0; d < macro_dim; ++d) {
    if (k[d] < 0 || k[d] >= axis_points) return -1;
  }
  if (macro_dim == 1) return static_cast<int>(k[0]);
  return static_cast<int>(k[1] * axis_points + k[0]);
}

MacroHierarchy build_hierarchy(const std::array<double, 2>& lo,
                               const std::array<double, 2>& hi, int macro_dim,
                               double H, int L) {
  if (macro_dim != 1 && macro_dim != 2) {
    throw ConfigError("build_hierarchy: macro_dim must be 1 or 2");
  }
  if (!(H > 0.0)) throw ConfigError("build_hierarchy: H must be positive");
  if (L < 0) throw ConfigError("build_hierarchy: L must be >= 0");
  const double extent = hi[0] - lo[0];
  if (!(extent > 0.0)) throw ConfigError("build_hierarchy: empty domain");
  if (macro_dim == 2 && std::abs((hi[1] - lo[1]) - extent) > 1e-12) {
    throw ConfigError("build_hierarchy: 2-D domains must be square");
  }
  const double ratio = extent / H;
  const long m0 = static_cast<long>(std::llround(ratio));
  if (m0 < 1 || std::abs(ratio - static_cast<double>(m0)) > 1e-9) {
    throw ConfigError("build_hierarchy: H must divide the domain extent");
  }
  MacroHierarchy h;
  h.macro_dim = macro_dim;
  h.H = H;
  h.L = L;
  h.lo = lo;
  h.hi = hi;
  h.m0 = m0;
  h.units = 1L << L;
  h.axis_points = m0 * h.units + 1;
  h.levels.assign(static_cast<size_t>(L) + 1, {});
  const double delta = H / static_cast<double>(h.units);
  const long n2 = (macro_dim == 2) ? h.axis_points : 1;
  h.points.reserve(static_cast<size_t>(h.axis_points) * n2);
  for (long k2 = 0; k2 < n2; ++k2) {
    for (long k1 = 0; k1 < h.axis_points; ++k1) {
      MacroPoint p;
      p.k = {k1, k2};
      p.x.x1 = lo[0] + k1 * delta;
      p.x.x2 = (macro_dim == 2) ? lo[1] + k2 * delta : 0.0;
      int min_tz = L;  // a zero coordinate lies on every grid of the nest
      for (int d = 0; d < macro_dim; ++d) {
        if (p.k[d] != 0) min_tz = std::min(min_tz, trailing_zeros(p.k[d]));
      }
      p.level = L - min_tz;
      h.levels[static_cast<size_t>(p.level)].push_back(
          static_cast<int>(h.points.size()));
      h.points.push_back(p);
    }
  }
  return h;
}

std::vector<ParentRef> MacroHierarchy::select_parents(int point_index,
                                                      int n_points) const {
  const MacroPoint& p = points.at(static_cast<size_t>(point_index));
  const int l = p.level;
  if (l < 1) {
    throw ConfigError("select_parents: anchor points have no parents");
  }
  const int want_interp = 1 << macro_dim;
  if (n_points != 1 && n_points != want_interp) {
    throw ConfigError("select_parents: n_points must be 1 or 2^macro_dim");
  }
  // Containing cell of the next-coarser grid T_{l-1}, in finest units.
  const long s = 1L << (L - l + 1);
  std::array<long, 2> base{0, 0};
  std::array<double, 2> frac{0.0, 0.0};
  for (int d = 0; d < macro_dim; ++d) {
    base[d] = p.k[d] / s;
    frac[d] = static_cast<double>(p.k[d] - base[d] * s) /
              static_cast<double>(s);
  }

  struct Corner {
    std::array<long, 2> k;
    double weight;
    long dist2;
    int level;
    int index;
  };
  std::vector<Corner> corners;
  const int n2 = (macro_dim == 2) ? 2 : 1;
  for (int d2 = 0; d2 < n2; ++d2) {
    for (int d1 = 0; d1 < 2; ++d1) {
      Corner c;
      c.k = {(base[0] + d1) * s, macro_dim == 2 ? (base[1] + d2) * s : 0};
      c.weight = (d1 ? frac[0] : 1.0 - frac[0]);
      if (macro_dim == 2) c.weight *= (d2 ? frac[1] : 1.0 - frac[1]);
      c.index = index_of(c.k);
      if (c.index < 0 || c.weight == 0.0) continue;
      const long e1 = c.k[0] - p.k[0];
      const long e2 = macro_dim == 2 ? c.k[1] - p.k[1] : 0;
      c.dist2 = e1 * e1 + e2 * e2;
      c.level = points[static_cast<size_t>(c.index)].level;
      corners.push_back(c);
    }
  }

  std::vector<ParentRef> out;
  if (n_points == 1) {
    const Corner* best = nullptr;
    for (const Corner& c : corners) {
      if (!best) {
        best = &c;
        continue;
      }
      const auto key = [](const Corner& c) {
        return std::make_tuple(c.dist2, c.level, c.k[0], c.k[1]);
      };
      if (key(c) < key(*best)) best = &c;
    }
    out.push_back({best->index, 1.0});
  } else {
    for (const Corner& c : corners) out.push_back({c.index, c.weight});
  }
  return out;
}

}  // namespace mchom
