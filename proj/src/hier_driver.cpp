#include "mchom/hier_driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <memory>
#include <thread>
#include <vector>

#include "mchom/assembly.hpp"
#include "mchom/errors.hpp"

namespace mchom {

namespace {

/// Applies fn to every index in idxs on a small worker pool.  Work items are
/// claimed through an atomic counter; each item is computed independently
/// and written to its own slot, so results do not depend on the schedule.
template <typename F>
void parallel_for_indices(const std::vector<int>& idxs, int workers, F&& fn) {
  const int nw = std::max(
      1, std::min<int>(workers, static_cast<int>(idxs.size())));
  if (nw <= 1) {
    for (int i : idxs) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(nw));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nw));
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= idxs.size()) break;
          fn(idxs[t]);
        }
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<int> all_indices(std::size_t n) {
  std::vector<int> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
  return idx;
}

void check_consistent(const MacroHierarchy& hierarchy,
                      const SpaceHierarchy& spaces) {
  if (hierarchy.L != spaces.L) {
    throw ConfigError("hierarchy and space ladder disagree on L");
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

DofLedger dof_budget(const MacroHierarchy& hierarchy,
                     const SpaceHierarchy& spaces) {
  check_consistent(hierarchy, spaces);
  DofLedger ledger;
  for (int l = 0; l <= hierarchy.L; ++l) {
    DofLedgerRow row;
    row.macro_level = l;
    row.fe_level = hierarchy.L - l;
    row.points = hierarchy.levels[static_cast<size_t>(l)].size();
    row.space_dim = static_cast<std::size_t>(spaces.at(row.fe_level).dim());
    row.dofs = row.points * row.space_dim;
    ledger.hier_total += row.dofs;
    ledger.rows.push_back(row);
  }
  const auto finest_dim =
      static_cast<std::size_t>(spaces.at(hierarchy.L).dim());
  ledger.full_total = hierarchy.points.size() * finest_dim;
  const std::size_t factor = 2u * 2u;  // two fields, two directions
  ledger.hier_grand_total = ledger.hier_total * factor;
  ledger.full_grand_total = ledger.full_total * factor;
  return ledger;
}

HierRunResult hierarchical_solve(const CoefficientModel& model,
                                 const MacroHierarchy& hierarchy,
                                 const SpaceHierarchy& spaces,
                                 const HierOptions& opts) {
  check_consistent(hierarchy, spaces);
  const int expected_multi = 1 << hierarchy.macro_dim;
  if (opts.interp_points != 1 && opts.interp_points != expected_multi) {
    throw ConfigError("interp_points must be 1 or 2^macro_dim");
  }
  HierRunResult result;
  result.solutions.resize(hierarchy.points.size());
  result.ledger = dof_budget(hierarchy, spaces);

  for (int l = 0; l <= hierarchy.L; ++l) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int>& level_idxs =
        hierarchy.levels[static_cast<size_t>(l)];
    const PeriodicFESpace& space = spaces.at(hierarchy.L - l);

    if (l == 0) {
      parallel_for_indices(level_idxs, opts.workers, [&](int i) {
        result.solutions[static_cast<size_t>(i)] =
            solve_full(space, model, hierarchy.points[static_cast<size_t>(i)].x,
                       opts.solver);
      });
    } else {
      parallel_for_indices(level_idxs, opts.workers, [&](int i) {
        const MacroPoint& point = hierarchy.points[static_cast<size_t>(i)];
        const std::vector<ParentRef> parents =
            hierarchy.select_parents(i, opts.interp_points);

        CellSolution sol;
        sol.x = point.x;
        sol.level_solved = hierarchy.L - l;
        sol.provenance = Provenance::Corrected;
        for (const ParentRef& p : parents) {
          const CellSolution& ps =
              result.solutions[static_cast<size_t>(p.point_index)];
          if (ps.dirs[0].empty()) {
            throw SolveError("parent solution missing: level ordering bug");
          }
          sol.parent_points.push_back(p.point_index);
          sol.parent_weights.push_back(p.weight);
        }

        const CoupledSystem sys = assemble_system(space, model, point.x);
        const ConstrainedSolver solver(sys, opts.solver);
        const int dim = sys.dim;

        for (int dir = 0; dir < 2; ++dir) {
          std::vector<CorrectionParent> cp;
          cp.reserve(parents.size());
          for (const ParentRef& p : parents) {
            const CellSolution& ps =
                result.solutions[static_cast<size_t>(p.point_index)];
            cp.push_back(CorrectionParent{
                ps.x, p.weight, &ps.dirs[static_cast<size_t>(dir)]});
          }
          const Eigen::VectorXd rhs =
              assemble_rhs_correction(space, model, point.x, cp, dir);
          double residual = 0.0;
          const Eigen::VectorXd u = solver.solve(rhs, &residual);
          sol.residual_norm = std::max(sol.residual_norm, residual);
          sol.pair_mean =
              std::max(sol.pair_mean, std::abs(sys.g.dot(u)));

          FieldSum sum = single_term(space, u.head(dim), u.tail(dim));
          const EnergyNormParts own = energy_norm_parts(space, sum);
          sol.correction_energy =
              std::max(sol.correction_energy, own.total());
          for (const ParentRef& p : parents) {
            const CellSolution& ps =
                result.solutions[static_cast<size_t>(p.point_index)];
            for (const FieldTerm& term : ps.dirs[static_cast<size_t>(dir)]) {
              FieldTerm scaled = term;
              scaled.weight *= p.weight;
              sum.push_back(std::move(scaled));
            }
          }
          sol.dirs[static_cast<size_t>(dir)] = std::move(sum);
        }
        result.solutions[static_cast<size_t>(i)] = std::move(sol);
      });
    }

    if (!opts.reproducible) {
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - t0;
      result.timings.push_back(PhaseTiming{l, dt.count()});
    }
  }
  return result;
}

std::vector<CellSolution> full_reference_solve(const CoefficientModel& model,
                                               const MacroHierarchy& hierarchy,
                                               const SpaceHierarchy& spaces,
                                               const HierOptions& opts) {
  check_consistent(hierarchy, spaces);
  const PeriodicFESpace& space = spaces.at(hierarchy.L);
  std::vector<CellSolution> out(hierarchy.points.size());
  parallel_for_indices(all_indices(hierarchy.points.size()), opts.workers,
                       [&](int i) {
                         out[static_cast<size_t>(i)] = solve_full(
                             space, model,
                             hierarchy.points[static_cast<size_t>(i)].x,
                             opts.solver);
                       });
  return out;
}

ComparisonReport compare(const CoefficientModel& model,
                         const MacroHierarchy& hierarchy,
                         const SpaceHierarchy& spaces,
                         const HierRunResult& hier,
                         const std::vector<CellSolution>& full) {
  check_consistent(hierarchy, spaces);
  if (hier.solutions.size() != hierarchy.points.size() ||
      full.size() != hierarchy.points.size()) {
    throw ConfigError("compare: point sets disagree");
  }
  for (std::size_t i = 0; i < full.size(); ++i) {
    const Xpt& a = hier.solutions[i].x;
    const Xpt& b = full[i].x;
    if (std::abs(a.x1 - b.x1) > 1e-12 || std::abs(a.x2 - b.x2) > 1e-12) {
      throw ConfigError("compare: point sets disagree");
    }
  }

  const PeriodicFESpace& eval_space = spaces.at(hierarchy.L);
  ComparisonReport report;
  report.points.resize(hierarchy.points.size());

  parallel_for_indices(
      all_indices(hierarchy.points.size()), 1, [&](int idx) {
        const std::size_t i = static_cast<size_t>(idx);
        const MacroPoint& point = hierarchy.points[i];
        PointComparison& pc = report.points[i];
        pc.x = point.x;
        pc.level = point.level;
        pc.correction_energy = hier.solutions[i].correction_energy;

        const EffectiveTensors th =
            effective_tensor(eval_space, model, point.x, hier.solutions[i]);
        const EffectiveTensors tf =
            effective_tensor(eval_space, model, point.x, full[i]);
        for (int r = 0; r < 2; ++r) {
          for (int c = 0; c < 2; ++c) {
            const double f1 = tf.k1_star(r, c), h1 = th.k1_star(r, c);
            const double f2 = tf.k2_star(r, c), h2 = th.k2_star(r, c);
            pc.k1_err_pct[r][c] = 100.0 * std::abs(f1 - h1) / std::abs(f1);
            pc.k2_err_pct[r][c] = 100.0 * std::abs(f2 - h2) / std::abs(f2);
            if (r != c) {
              pc.offdiag_absdiff = std::max(
                  {pc.offdiag_absdiff, std::abs(f1 - h1), std::abs(f2 - h2)});
            }
          }
        }
        pc.max_diag_err_pct =
            std::max({pc.k1_err_pct[0][0], pc.k1_err_pct[1][1],
                      pc.k2_err_pct[0][0], pc.k2_err_pct[1][1]});
        for (int dir = 0; dir < 2; ++dir) {
          const double d = energy_norm_parts(
                               eval_space,
                               hier.solutions[i].dirs[static_cast<size_t>(dir)],
                               &full[i].dirs[static_cast<size_t>(dir)])
                               .total();
          pc.energy_diff = std::max(pc.energy_diff, d);
        }
      });

  for (int l = 0; l <= hierarchy.L; ++l) {
    LevelSummary summary;
    summary.level = l;
    std::vector<double> corrections;
    double sum_err = 0.0;
    for (int i : hierarchy.levels[static_cast<size_t>(l)]) {
      const PointComparison& pc = report.points[static_cast<size_t>(i)];
      ++summary.count;
      summary.max_err_pct = std::max(summary.max_err_pct, pc.max_diag_err_pct);
      summary.max_energy_diff =
          std::max(summary.max_energy_diff, pc.energy_diff);
      sum_err += pc.max_diag_err_pct;
      corrections.push_back(pc.correction_energy);
    }
    if (summary.count > 0) {
      summary.mean_err_pct = sum_err / static_cast<double>(summary.count);
    }
    summary.median_correction_energy = median_of(std::move(corrections));
    report.levels.push_back(summary);
    report.max_err_pct = std::max(report.max_err_pct, summary.max_err_pct);
    report.max_energy_diff =
        std::max(report.max_energy_diff, summary.max_energy_diff);
  }
  return report;
}

std::vector<EffectiveTensors> effective_tensors_all(
    const CoefficientModel& model, const MacroHierarchy& hierarchy,
    const SpaceHierarchy& spaces, const std::vector<CellSolution>& sols,
    int workers) {
  check_consistent(hierarchy, spaces);
  if (sols.size() != hierarchy.points.size()) {
    throw ConfigError("effective_tensors_all: point sets disagree");
  }
  const PeriodicFESpace& eval_space = spaces.at(hierarchy.L);
  std::vector<EffectiveTensors> out(sols.size());
  parallel_for_indices(all_indices(sols.size()), workers, [&](int i) {
    out[static_cast<size_t>(i)] =
        effective_tensor(eval_space, model,
                         hierarchy.points[static_cast<size_t>(i)].x,
                         sols[static_cast<size_t>(i)]);
  });
  return out;
}

}  // namespace mchom
