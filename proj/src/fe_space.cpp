#include "mchom/fe_space.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace mchom {

GaussRule gauss_rule(int npts) {
  if (npts < 1) throw ConfigError("gauss_rule: need at least one point");
  GaussRule r;
  if (npts == 1) {
    r.pts = {0.5};
    r.wts = {1.0};
    return r;
  }
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Legendre
  // recurrence, weights come from the first eigenvector components.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  r.pts.resize(npts);
  r.wts.resize(npts);
  for (int k = 0; k < npts; ++k) {
    const double t = es.eigenvalues()(k);          // node on [-1, 1]
    const double w = 2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
    r.pts[k] = 0.5 * (t + 1.0);                    // map to [0, 1]
    r.wts[k] = 0.5 * w;                            // weights sum to 1
  }
  return r;
}

namespace {

/// Shape values of the four corner nodes at reference point (xi, eta),
/// corner order (0,0), (1,0), (1,1), (0,1).
std::array<double, 4> shape_values(double xi, double eta) {
  return {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
}

std::array<double, 4> shape_dxi(double eta) {
  return {-(1 - eta), (1 - eta), eta, -eta};
}

std::array<double, 4> shape_deta(double xi) {
  return {-(1 - xi), -xi, xi, (1 - xi)};
}

}  // namespace

PeriodicFESpace::PeriodicFESpace(int base_n, int level, int L, int qorder)
    : base_n_(base_n), level_(level), L_(L), qorder_(qorder) {
  if (base_n < 2) throw ConfigError("build_space: base_n must be >= 2");
  if (level < 0 || level > L) {
    throw ConfigError("build_space: level must lie in [0, L]");
  }
  if (qorder < 1 || qorder > 10) {
    throw ConfigError("build_space: quadrature order must lie in [1, 10]");
  }
  n_ = base_n << level;
  h_ = 1.0 / n_;
  dim_ = n_ * n_;
  const GaussRule g = gauss_rule(qorder);
  const int nq = qorder * qorder;
  qx_.resize(nq);
  qy_.resize(nq);
  qw_.resize(nq);
  for (auto& v : shp_) v.resize(nq);
  for (auto& v : dshp1_) v.resize(nq);
  for (auto& v : dshp2_) v.resize(nq);
  int q = 0;
  for (int j = 0; j < qorder; ++j) {
    for (int i = 0; i < qorder; ++i, ++q) {
      const double xi = g.pts[i], eta = g.pts[j];
      qx_[q] = xi;
      qy_[q] = eta;
      qw_[q] = g.wts[i] * g.wts[j];
      const auto sv = shape_values(xi, eta);
      const auto dx = shape_dxi(eta);
      const auto de = shape_deta(xi);
      for (int a = 0; a < 4; ++a) {
        shp_[a][q] = sv[a];
        dshp1_[a][q] = dx[a] / h_;  // physical gradients on size-h squares
        dshp2_[a][q] = de[a] / h_;
      }
    }
  }
}

PeriodicFESpace build_space(int base_n, int level, int L, int qorder,
                            std::int64_t max_dim) {
  if (level >= 0 && base_n >= 2) {
    const std::int64_t n = std::int64_t{base_n} << level;
    if (n * n > max_dim) {
      throw ConfigError("build_space: DOF count " + std::to_string(n * n) +
                        " exceeds the configured budget of " +
                        std::to_string(max_dim));
    }
  }
  return PeriodicFESpace(base_n, level, L, qorder);
}

SpaceHierarchy build_space_hierarchy(int base_n, int L, int qorder,
                                     std::int64_t max_dim) {
  if (L < 0) throw ConfigError("build_space_hierarchy: L must be >= 0");
  SpaceHierarchy h;
  h.base_n = base_n;
  h.L = L;
  h.qorder = qorder;
  h.spaces.reserve(static_cast<size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) {
    h.spaces.push_back(build_space(base_n, l, L, qorder, max_dim));
  }
  return h;
}

EvalResult eval_element_corners(const std::array<double, 4>& c, double xi,
                                double eta, double h) {
  EvalResult r;
  const auto sv = shape_values(xi, eta);
  const auto dx = shape_dxi(eta);
  const auto de = shape_deta(xi);
  for (int a = 0; a < 4; ++a) {
    r.value += sv[a] * c[a];
    r.dy1 += dx[a] / h * c[a];
    r.dy2 += de[a] / h * c[a];
  }
  return r;
}

EvalResult eval_nodal(const PeriodicFESpace& s, const Eigen::VectorXd& v,
                      double y1, double y2) {
  if (v.size() != s.dim()) {
    throw ConfigError("eval_nodal: vector length does not match space dim");
  }
  const int n = s.n();
  const double u1 = y1 * n, u2 = y2 * n;
  const int e1 = std::min(static_cast<int>(std::floor(u1)), n - 1);
  const int e2 = std::min(static_cast<int>(std::floor(u2)), n - 1);
  const auto dofs = s.element_dofs(e1, e2);
  const std::array<double, 4> c = {v[dofs[0]], v[dofs[1]], v[dofs[2]],
                                   v[dofs[3]]};
  return eval_element_corners(c, u1 - e1, u2 - e2, s.h());
}

Eigen::VectorXd prolong(const Eigen::VectorXd& v, const PeriodicFESpace& from,
                        const PeriodicFESpace& to) {
  if (from.base_n() != to.base_n() || to.level() < from.level()) {
    throw ConfigError("prolong: spaces are not nested");
  }
  if (v.size() != from.dim()) {
    throw ConfigError("prolong: vector length does not match source space");
  }
  Eigen::VectorXd out(to.dim());
  const int nt = to.n();
  for (int j = 0; j < nt; ++j) {
    for (int i = 0; i < nt; ++i) {
      out[to.dof(i, j)] =
          eval_nodal(from, v, static_cast<double>(i) / nt,
                     static_cast<double>(j) / nt)
              .value;
    }
  }
  return out;
}

QuadratureFieldData values_and_gradients_at_quadrature(
    const PeriodicFESpace& s, const Eigen::VectorXd& v) {
  if (v.size() != s.dim()) {
    throw ConfigError(
        "values_and_gradients_at_quadrature: vector length mismatch");
  }
  const int n = s.n(), nq = s.nq();
  QuadratureFieldData out;
  out.value.assign(static_cast<size_t>(n) * n, {});
  out.dy1.assign(static_cast<size_t>(n) * n, {});
  out.dy2.assign(static_cast<size_t>(n) * n, {});
  for (int ey = 0; ey < n; ++ey) {
    for (int ex = 0; ex < n; ++ex) {
      const auto dofs = s.element_dofs(ex, ey);
      const size_t e = static_cast<size_t>(ey) * n + ex;
      out.value[e].resize(nq);
      out.dy1[e].resize(nq);
      out.dy2[e].resize(nq);
      for (int q = 0; q < nq; ++q) {
        double val = 0, d1 = 0, d2 = 0;
        for (int a = 0; a < 4; ++a) {
          const double c = v[dofs[a]];
          val += s.shape(a, q) * c;
          d1 += s.dshape_dy1(a, q) * c;
          d2 += s.dshape_dy2(a, q) * c;
        }
        out.value[e][q] = val;
        out.dy1[e][q] = d1;
        out.dy2[e][q] = d2;
      }
    }
  }
  return out;
}

EvalResult eval_field_sum(const FieldSum& sum, int k, double y1, double y2) {
  EvalResult r;
  for (const FieldTerm& t : sum) {
    const EvalResult e = eval_nodal(*t.space, (*t.fields)[k], y1, y2);
    r.value += t.weight * e.value;
    r.dy1 += t.weight * e.dy1;
    r.dy2 += t.weight * e.dy2;
  }
  return r;
}

const PeriodicFESpace& finest_space(
    std::initializer_list<const FieldSum*> sums) {
  const PeriodicFESpace* best = nullptr;
  for (const FieldSum* s : sums) {
    if (!s) continue;
    for (const FieldTerm& t : *s) {
      if (!best || t.space->level() > best->level()) best = t.space;
    }
  }
  if (!best) throw ConfigError("finest_space: no terms given");
  return *best;
}

}  // namespace mchom
