#include "mchom/macro_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mchom/fe_space.hpp"

namespace mchom {

namespace {

constexpr int kQuadPoints = 3;  // per axis

struct Corner {
  int di, dj;
};
constexpr Corner kCorners[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

double shape(int a, double xi, double eta) {
  switch (a) {
    case 0: return (1.0 - xi) * (1.0 - eta);
    case 1: return xi * (1.0 - eta);
    case 2: return xi * eta;
    default: return (1.0 - xi) * eta;
  }
}

double dshape_xi(int a, double eta) {
  switch (a) {
    case 0: return -(1.0 - eta);
    case 1: return 1.0 - eta;
    case 2: return eta;
    default: return -eta;
  }
}

double dshape_eta(int a, double xi) {
  switch (a) {
    case 0: return -(1.0 - xi);
    case 1: return -xi;
    case 2: return xi;
    default: return 1.0 - xi;
  }
}

void check_tensor_spd(const Eigen::Matrix2d& m) {
  const Eigen::Matrix2d sym = 0.5 * (m + m.transpose());
  const double tr = sym(0, 0) + sym(1, 1);
  const double disc = std::sqrt((sym(0, 0) - sym(1, 1)) *
                                    (sym(0, 0) - sym(1, 1)) +
                                4.0 * sym(0, 1) * sym(0, 1));
  if (0.5 * (tr - disc) <= 0.0) {
    throw SolveError("conductivity is not positive definite at a point");
  }
}

struct LatticeInterp {
  int macro_dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  double spacing = 1.0;
  long axis_points = 2;

  /// Cell index and local coordinate along one axis, clamped to the lattice.
  void locate(double x, int axis, long* cell, double* frac) const {
    const double s = (x - lo[static_cast<size_t>(axis)]) / spacing;
    long c = static_cast<long>(std::floor(s));
    c = std::clamp(c, 0L, axis_points - 2);
    *cell = c;
    *frac = std::clamp(s - static_cast<double>(c), 0.0, 1.0);
  }

  template <typename T>
  T eval(const std::vector<T>& grid, double x1, double x2) const {
    long i = 0, j = 0;
    double fx = 0.0, fy = 0.0;
    locate(x1, 0, &i, &fx);
    if (macro_dim == 1) {
      return (1.0 - fx) * grid[static_cast<size_t>(i)] +
             fx * grid[static_cast<size_t>(i + 1)];
    }
    locate(x2, 1, &j, &fy);
    const auto at = [&](long a, long b) -> const T& {
      return grid[static_cast<size_t>(b * axis_points + a)];
    };
    return (1.0 - fx) * (1.0 - fy) * at(i, j) + fx * (1.0 - fy) * at(i + 1, j) +
           fx * fy * at(i + 1, j + 1) + (1.0 - fx) * fy * at(i, j + 1);
  }
};

LatticeInterp make_lattice(const MacroHierarchy& hierarchy) {
  LatticeInterp lat;
  lat.macro_dim = hierarchy.macro_dim;
  lat.lo = hierarchy.lo;
  lat.spacing = hierarchy.spacing(hierarchy.L);
  lat.axis_points = hierarchy.axis_points;
  return lat;
}

/// Reorders per-point values into a dense lattice grid (row index k1, then
/// k2 for two-dimensional networks).
template <typename T, typename Get>
std::vector<T> lattice_grid(const MacroHierarchy& hierarchy, Get&& get) {
  const long axis = hierarchy.axis_points;
  const long rows = hierarchy.macro_dim == 1 ? 1 : axis;
  std::vector<T> grid(static_cast<size_t>(axis * rows));
  for (long j = 0; j < rows; ++j) {
    for (long i = 0; i < axis; ++i) {
      const int p = hierarchy.index_of({i, j});
      if (p < 0) throw ConfigError("network does not cover the lattice");
      grid[static_cast<size_t>(j * axis + i)] = get(static_cast<size_t>(p));
    }
  }
  return grid;
}

}  // namespace

ScalarField named_scalar_field(const std::string& name) {
  if (name == "zero") return [](double, double) { return 0.0; };
  if (name == "one") return [](double, double) { return 1.0; };
  if (name == "x1") return [](double x1, double) { return x1; };
  if (name == "sinpi") {
    return [](double x1, double x2) {
      return std::sin(std::numbers::pi * x1) * std::sin(std::numbers::pi * x2);
    };
  }
  throw ConfigError("unknown field name: " + name +
                    " (expected zero, one, x1 or sinpi)");
}

ScalarField scalar_from_network(const MacroHierarchy& hierarchy,
                                const std::vector<double>& values) {
  if (values.size() != hierarchy.points.size()) {
    throw ConfigError("network value count does not match the lattice");
  }
  const LatticeInterp lat = make_lattice(hierarchy);
  auto grid = lattice_grid<double>(
      hierarchy, [&](std::size_t p) { return values[p]; });
  return [lat, grid = std::move(grid)](double x1, double x2) {
    return lat.eval(grid, x1, x2);
  };
}

TensorField conductivity_from_network(
    const MacroHierarchy& hierarchy,
    const std::vector<EffectiveTensors>& tensors) {
  if (tensors.size() != hierarchy.points.size()) {
    throw ConfigError("network value count does not match the lattice");
  }
  const LatticeInterp lat = make_lattice(hierarchy);
  auto grid = lattice_grid<Eigen::Matrix2d>(hierarchy, [&](std::size_t p) {
    return Eigen::Matrix2d(tensors[p].k1_star + tensors[p].k2_star);
  });
  return [lat, grid = std::move(grid)](double x1, double x2) {
    return lat.eval(grid, x1, x2);
  };
}

MacroMesh make_macro_mesh(const std::array<double, 2>& lo,
                          const std::array<double, 2>& hi, int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw ConfigError("mesh needs at least one element");
  if (!(hi[0] > lo[0]) || !(hi[1] > lo[1])) {
    throw ConfigError("mesh box is empty");
  }
  MacroMesh mesh;
  mesh.lo = lo;
  mesh.hi = hi;
  mesh.n1 = n1;
  mesh.n2 = n2;
  mesh.hx = (hi[0] - lo[0]) / n1;
  mesh.hy = (hi[1] - lo[1]) / n2;
  return mesh;
}

Eigen::VectorXd initial_condition(const MacroMesh& mesh, const ScalarField& g1,
                                  const ScalarField& g2,
                                  const ScalarField& c11,
                                  const ScalarField& c22) {
  Eigen::VectorXd u0(mesh.nodes());
  for (int j = 0; j <= mesh.n2; ++j) {
    for (int i = 0; i <= mesh.n1; ++i) {
      const double x1 = mesh.x1(i), x2 = mesh.x2(j);
      const double w1 = c11(x1, x2), w2 = c22(x1, x2);
      const double denom = w1 + w2;
      if (!(denom > 0.0)) {
        throw SolveError("non-positive capacity in the initial condition");
      }
      u0[mesh.node(i, j)] = (w1 * g1(x1, x2) + w2 * g2(x1, x2)) / denom;
    }
  }
  return u0;
}

MacroOperators::MacroOperators(const MacroProblem& p) : p_(p) {
  const MacroMesh& mesh = p_.mesh;
  if (!(p_.dt > 0.0)) throw ConfigError("dt must be positive");

  reduced_index_.assign(static_cast<size_t>(mesh.nodes()), -1);
  for (int j = 0; j <= mesh.n2; ++j) {
    for (int i = 0; i <= mesh.n1; ++i) {
      if (!mesh.boundary(i, j)) {
        reduced_index_[static_cast<size_t>(mesh.node(i, j))] =
            static_cast<int>(interior_nodes_.size());
        interior_nodes_.push_back(mesh.node(i, j));
      }
    }
  }
  const int m = static_cast<int>(interior_nodes_.size());
  if (m == 0) throw ConfigError("mesh has no interior nodes");

  const GaussRule rule = gauss_rule(kQuadPoints);
  std::vector<Eigen::Triplet<double>> tm, tk;
  F_ = Eigen::VectorXd::Zero(m);

  for (int ey = 0; ey < mesh.n2; ++ey) {
    for (int ex = 0; ex < mesh.n1; ++ex) {
      int dofs[4];
      for (int a = 0; a < 4; ++a) {
        dofs[a] = reduced_index_[static_cast<size_t>(
            mesh.node(ex + kCorners[a].di, ey + kCorners[a].dj))];
      }
      for (int qy = 0; qy < kQuadPoints; ++qy) {
        for (int qx = 0; qx < kQuadPoints; ++qx) {
          const double xi = rule.pts[static_cast<size_t>(qx)];
          const double eta = rule.pts[static_cast<size_t>(qy)];
          const double w = rule.wts[static_cast<size_t>(qx)] *
                           rule.wts[static_cast<size_t>(qy)] * mesh.hx *
                           mesh.hy;
          const double x1 = mesh.x1(ex) + xi * mesh.hx;
          const double x2 = mesh.x2(ey) + eta * mesh.hy;

          const double cap = p_.c11(x1, x2) + p_.c22(x1, x2);
          if (!(cap > 0.0)) {
            throw SolveError("non-positive capacity at a quadrature point");
          }
          const Eigen::Matrix2d kappa = p_.conductivity(x1, x2);
          check_tensor_spd(kappa);
          const double load = 2.0 * p_.source_q(x1, x2);

          double N[4], G1[4], G2[4];
          for (int a = 0; a < 4; ++a) {
            N[a] = shape(a, xi, eta);
            G1[a] = dshape_xi(a, eta) / mesh.hx;
            G2[a] = dshape_eta(a, xi) / mesh.hy;
          }
          for (int a = 0; a < 4; ++a) {
            if (dofs[a] < 0) continue;
            F_[dofs[a]] += w * load * N[a];
            const double fa1 = kappa(0, 0) * G1[a] + kappa(0, 1) * G2[a];
            const double fa2 = kappa(1, 0) * G1[a] + kappa(1, 1) * G2[a];
            for (int b = 0; b < 4; ++b) {
              if (dofs[b] < 0) continue;
              tm.emplace_back(dofs[a], dofs[b], w * cap * N[a] * N[b]);
              tk.emplace_back(dofs[a], dofs[b],
                              w * (fa1 * G1[b] + fa2 * G2[b]));
            }
          }
        }
      }
    }
  }

  M_.resize(m, m);
  M_.setFromTriplets(tm.begin(), tm.end());
  K_.resize(m, m);
  K_.setFromTriplets(tk.begin(), tk.end());

  Eigen::SparseMatrix<double> lhs = M_ + p_.dt * K_;
  stepper_.compute(lhs);
  if (stepper_.info() != Eigen::Success) {
    throw SolveError("time-step operator factorization failed");
  }
}

Eigen::VectorXd MacroOperators::restrict_interior(
    const Eigen::VectorXd& full) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(interior_nodes_.size()));
  for (std::size_t r = 0; r < interior_nodes_.size(); ++r) {
    v[static_cast<Eigen::Index>(r)] = full[interior_nodes_[r]];
  }
  return v;
}

Eigen::VectorXd MacroOperators::extend_full(
    const Eigen::VectorXd& interior) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p_.mesh.nodes());
  for (std::size_t r = 0; r < interior_nodes_.size(); ++r) {
    full[interior_nodes_[r]] = interior[static_cast<Eigen::Index>(r)];
  }
  return full;
}

Eigen::VectorXd MacroOperators::initial() const {
  Eigen::VectorXd u0 =
      initial_condition(p_.mesh, p_.g1, p_.g2, p_.c11, p_.c22);
  return extend_full(restrict_interior(u0));
}

Eigen::VectorXd MacroOperators::step(const Eigen::VectorXd& u) const {
  if (u.size() != p_.mesh.nodes()) {
    throw ConfigError("field length does not match the mesh");
  }
  const Eigen::VectorXd ui = restrict_interior(u);
  const Eigen::VectorXd rhs = M_ * ui + p_.dt * F_;
  const Eigen::VectorXd next = stepper_.solve(rhs);
  if (stepper_.info() != Eigen::Success) {
    throw SolveError("time-step solve failed");
  }
  return extend_full(next);
}

double MacroOperators::energy(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd ui = restrict_interior(u);
  return 0.5 * ui.dot(M_ * ui);
}

double MacroOperators::steady_residual(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd ui = restrict_interior(u);
  return (K_ * ui - F_).norm() / std::max(F_.norm(), 1.0);
}

Eigen::VectorXd MacroOperators::solve_steady() const {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(K_);
  if (chol.info() != Eigen::Success) {
    throw SolveError("steady operator factorization failed");
  }
  const Eigen::VectorXd ui = chol.solve(F_);
  if (chol.info() != Eigen::Success) {
    throw SolveError("steady solve failed");
  }
  return extend_full(ui);
}

Trajectory solve_homogenized(const MacroProblem& p) {
  if (p.t_end < 0.0) throw ConfigError("t_end must be non-negative");
  const MacroOperators ops(p);

  long nsteps = 0;
  if (p.t_end > 0.0) {
    nsteps = std::lround(p.t_end / p.dt);
    if (nsteps < 1 ||
        std::abs(static_cast<double>(nsteps) * p.dt - p.t_end) >
            1e-9 * std::max(1.0, p.t_end)) {
      throw ConfigError("t_end must be a positive multiple of dt");
    }
  }

  std::vector<long> record{0, nsteps};
  for (double t : p.snapshot_times) {
    const long s = std::lround(t / p.dt);
    if (s < 0 || s > nsteps) {
      throw ConfigError("snapshot time outside [0, t_end]");
    }
    record.push_back(s);
  }
  std::sort(record.begin(), record.end());
  record.erase(std::unique(record.begin(), record.end()), record.end());

  Trajectory traj;
  Eigen::VectorXd u = ops.initial();
  traj.min_value = u.minCoeff();
  std::size_t next_record = 0;
  for (long s = 0; s <= nsteps; ++s) {
    if (s > 0) {
      u = ops.step(u);
      traj.min_value = std::min(traj.min_value, u.minCoeff());
    }
    if (next_record < record.size() && record[next_record] == s) {
      traj.times.push_back(static_cast<double>(s) * p.dt);
      traj.fields.push_back(u);
      ++next_record;
    }
  }
  traj.final_steady_residual = ops.steady_residual(u);
  return traj;
}

}  // namespace mchom
