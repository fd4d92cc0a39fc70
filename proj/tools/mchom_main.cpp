#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mchom/config.hpp"
#include "mchom/hier_driver.hpp"
#include "mchom/macro_solver.hpp"
#include "mchom/report.hpp"

namespace {

using mchom::RunConfig;
using mchom::RunMode;
using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";
constexpr const char* kOutputDirEnvVar = "MCHOM_OUTPUT_DIR";

struct CliOverrides {
  std::string config_path;
  std::optional<std::string> mode;
  std::optional<int> interp;
  std::optional<int> workers;
  bool reproducible = false;
  std::optional<std::string> output_dir;
  bool paper_format = false;
};

void add_common_options(CLI::App* cmd, CliOverrides* o, bool config_required) {
  auto* cfg = cmd->add_option("--config", o->config_path,
                              "run configuration file (JSON)");
  if (config_required) cfg->required();
  cmd->add_option_function<std::string>(
      "--mode", [o](const std::string& v) { o->mode = v; },
      "override mode: hier, full or both");
  cmd->add_option_function<int>(
      "--interp", [o](int v) { o->interp = v; },
      "override interpolation points (1 or 2^macro_dim)");
  cmd->add_option_function<int>(
      "--workers", [o](int v) { o->workers = v; },
      "override worker count");
  cmd->add_flag("--reproducible", o->reproducible,
                "bitwise-stable outputs: timings omitted");
  cmd->add_option_function<std::string>(
      "--output-dir", [o](const std::string& v) { o->output_dir = v; },
      "override output directory");
  cmd->add_flag("--paper-format", o->paper_format,
                "round stdout tables to 4 decimals (CSVs stay exact)");
}

RunConfig load_config(const CliOverrides& o) {
  RunConfig c = mchom::parse_config_file(o.config_path);
  if (o.mode) c.mode = mchom::run_mode_from_string(*o.mode);
  if (o.interp) {
    if (*o.interp != 1 && *o.interp != (1 << c.macro_dim)) {
      throw mchom::ConfigError("--interp must be 1 or 2^macro_dim");
    }
    c.interp_points = *o.interp;
  }
  if (o.workers) {
    if (*o.workers < 1) throw mchom::ConfigError("--workers must be >= 1");
    c.workers = *o.workers;
  }
  if (o.reproducible) c.reproducible = true;
  if (const char* env = std::getenv(kOutputDirEnvVar)) c.output_dir = env;
  if (o.output_dir) c.output_dir = *o.output_dir;  // flag beats env var
  return c;
}

std::filesystem::path out_path(const RunConfig& c, const std::string& name) {
  return std::filesystem::path(c.output_dir) / name;
}

/// Everything computed by one run, gathered before any file is written.
struct RunOutputs {
  mchom::MacroHierarchy hierarchy;
  mchom::SpaceHierarchy spaces;
  mchom::DofLedger ledger;
  std::optional<mchom::HierRunResult> hier;
  std::vector<mchom::CellSolution> full;
  std::vector<mchom::EffectiveTensors> tensors_hier, tensors_full;
  std::optional<mchom::ComparisonReport> comparison;
  double full_seconds = 0.0;
  double total_seconds = 0.0;
};

json structure_json(const std::vector<mchom::EffectiveTensors>& tensors) {
  double max_asym_rel = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& t : tensors) {
    const mchom::StructureReport r = mchom::check_structure(t);
    const double scale = (t.k1_star + t.k2_star).norm();
    max_asym_rel = std::max(max_asym_rel, r.asymmetry / scale);
    min_eig = std::min(min_eig, r.min_eig_sum);
  }
  return json{{"max_asymmetry_rel", max_asym_rel}, {"min_eig_sum", min_eig}};
}

RunOutputs execute_cell_runs(const RunConfig& c) {
  const auto t_start = std::chrono::steady_clock::now();
  RunOutputs r{mchom::build_hierarchy(c.lo, c.hi, c.macro_dim, c.H, c.L),
               mchom::build_space_hierarchy(c.base_n, c.L, c.qorder)};
  r.ledger = mchom::dof_budget(r.hierarchy, r.spaces);

  mchom::HierOptions opts;
  opts.interp_points = c.interp_points;
  opts.workers = c.workers;
  opts.reproducible = c.reproducible;
  opts.solver = c.solver;

  if (c.mode != RunMode::Full) {
    r.hier = mchom::hierarchical_solve(c.model, r.hierarchy, r.spaces, opts);
    r.tensors_hier = mchom::effective_tensors_all(
        c.model, r.hierarchy, r.spaces, r.hier->solutions, c.workers);
  }
  if (c.mode != RunMode::Hier) {
    const auto t0 = std::chrono::steady_clock::now();
    r.full = mchom::full_reference_solve(c.model, r.hierarchy, r.spaces, opts);
    r.full_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    r.tensors_full = mchom::effective_tensors_all(
        c.model, r.hierarchy, r.spaces, r.full, c.workers);
  }
  if (c.mode == RunMode::Both) {
    r.comparison =
        mchom::compare(c.model, r.hierarchy, r.spaces, *r.hier, r.full);
  }
  r.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return r;
}

json base_manifest(const char* command, const RunConfig& c,
                   const RunOutputs& r) {
  json m;
  m["artifact"] = json{{"name", "mchom"}, {"version", kVersion}};
  m["command"] = command;
  m["config"] = mchom::config_echo(c);
  m["model_info"] = json{{"coercivity", c.model.coercivity()},
                         {"lipschitz_estimate", c.model.lipschitz_estimate()}};
  m["hierarchy"] = mchom::hierarchy_json(r.hierarchy);
  m["dof_ledger"] = mchom::ledger_json(r.ledger);
  if (r.hier) m["parents"] = mchom::parents_json(r.hier->solutions);
  if (r.comparison) m["comparison"] = mchom::comparison_json(*r.comparison);
  json structure;
  if (r.hier) structure["hier"] = structure_json(r.tensors_hier);
  if (!r.full.empty()) structure["full"] = structure_json(r.tensors_full);
  m["structure"] = std::move(structure);
  if (!c.reproducible) {
    m["timings"] = mchom::timings_json(
        r.hier ? r.hier->timings : std::vector<mchom::PhaseTiming>{},
        r.full_seconds, r.total_seconds);
  }
  return m;
}

void write_outputs(const RunConfig& c, json manifest,
                   std::vector<std::pair<std::string, std::string>> files) {
  json names = json::array();
  names.push_back("manifest.json");
  for (const auto& [name, content] : files) names.push_back(name);
  manifest["outputs"] = std::move(names);
  mchom::write_text_file(out_path(c, "manifest.json").string(),
                         manifest.dump(2) + "\n");
  for (const auto& [name, content] : files) {
    mchom::write_text_file(out_path(c, name).string(), content);
  }
}

int run_solve(const CliOverrides& o) {
  const RunConfig c = load_config(o);
  const RunOutputs r = execute_cell_runs(c);

  std::vector<std::pair<std::string, std::string>> files;
  if (r.hier) {
    files.emplace_back("kstar_hier.csv",
                       mchom::kstar_csv(r.hierarchy, r.tensors_hier));
  }
  if (!r.full.empty()) {
    files.emplace_back("kstar_full.csv",
                       mchom::kstar_csv(r.hierarchy, r.tensors_full));
  }
  if (r.comparison) {
    files.emplace_back("errors.csv",
                       mchom::errors_csv(r.hierarchy, *r.comparison));
  }
  write_outputs(c, base_manifest("solve", c, r), std::move(files));

  const auto& tensors = r.hier ? r.tensors_hier : r.tensors_full;
  std::cout << mchom::kstar_table(r.hierarchy, tensors, o.paper_format);
  if (r.comparison) {
    std::cout << '\n'
              << mchom::errors_table(r.hierarchy, *r.comparison,
                                     o.paper_format);
  }
  std::cout << "outputs written to " << c.output_dir << '\n';
  return 0;
}

int run_budget(const CliOverrides& o) {
  const RunConfig c = load_config(o);
  const mchom::MacroHierarchy hierarchy =
      mchom::build_hierarchy(c.lo, c.hi, c.macro_dim, c.H, c.L);
  const mchom::SpaceHierarchy spaces =
      mchom::build_space_hierarchy(c.base_n, c.L, c.qorder);
  std::cout << mchom::budget_table(mchom::dof_budget(hierarchy, spaces));
  return 0;
}

std::string snapshot_name(const char* tag, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%s_%03zu.csv", tag, index);
  return buf;
}

int run_simulate(const CliOverrides& o) {
  const RunConfig c = load_config(o);
  if (!c.macro_solver) {
    throw mchom::ConfigError(
        "simulate requires a macro_solver block in the configuration");
  }
  const mchom::MacroSolverConfig& ms = *c.macro_solver;
  const RunOutputs r = execute_cell_runs(c);

  const mchom::MacroMesh mesh =
      mchom::make_macro_mesh(c.lo, c.hi, ms.mesh_n, ms.mesh_n);
  const auto make_problem = [&](const std::vector<mchom::EffectiveTensors>&
                                    tensors) {
    std::vector<double> c11v, c22v, qv;
    for (const auto& t : tensors) {
      c11v.push_back(t.c11_avg);
      c22v.push_back(t.c22_avg);
      qv.push_back(t.q_avg);
    }
    mchom::MacroProblem p;
    p.mesh = mesh;
    p.c11 = mchom::scalar_from_network(r.hierarchy, c11v);
    p.c22 = mchom::scalar_from_network(r.hierarchy, c22v);
    p.conductivity = mchom::conductivity_from_network(r.hierarchy, tensors);
    const mchom::ScalarField q_named = mchom::named_scalar_field(ms.q);
    const mchom::ScalarField q_avg =
        mchom::scalar_from_network(r.hierarchy, qv);
    p.source_q = [q_named, q_avg](double x1, double x2) {
      return q_named(x1, x2) * q_avg(x1, x2);
    };
    p.g1 = mchom::named_scalar_field(ms.g1);
    p.g2 = mchom::named_scalar_field(ms.g2);
    p.dt = ms.dt;
    p.t_end = ms.t_end;
    p.snapshot_times = ms.snapshot_times;
    return p;
  };

  std::optional<mchom::Trajectory> traj_hier, traj_full;
  if (r.hier) traj_hier = mchom::solve_homogenized(make_problem(r.tensors_hier));
  if (!r.full.empty()) {
    traj_full = mchom::solve_homogenized(make_problem(r.tensors_full));
  }

  json manifest = base_manifest("simulate", c, r);
  std::vector<std::pair<std::string, std::string>> files;
  json trajectory;
  const auto add_traj = [&](const char* tag, const mchom::Trajectory& t) {
    json names = json::array();
    for (std::size_t s = 0; s < t.fields.size(); ++s) {
      const std::string name = snapshot_name(tag, s);
      files.emplace_back(name, mchom::snapshot_csv(mesh, t.fields[s]));
      names.push_back(name);
    }
    trajectory[tag] =
        json{{"times", t.times},
             {"snapshots", std::move(names)},
             {"min_value", t.min_value},
             {"final_steady_residual", t.final_steady_residual}};
  };
  if (traj_hier) add_traj("hier", *traj_hier);
  if (traj_full) add_traj("full", *traj_full);
  if (traj_hier && traj_full) {
    const Eigen::VectorXd& uh = traj_hier->fields.back();
    const Eigen::VectorXd& uf = traj_full->fields.back();
    const double denom = std::max(uf.norm(), 1e-300);
    trajectory["final_rel_l2_diff"] = (uh - uf).norm() / denom;
  }
  trajectory["mesh_n"] = ms.mesh_n;
  manifest["trajectory"] = std::move(trajectory);
  write_outputs(c, std::move(manifest), std::move(files));

  const mchom::Trajectory& shown = traj_hier ? *traj_hier : *traj_full;
  std::cout << "simulated to t = " << mchom::fmt_g17(shown.times.back())
            << " (" << shown.times.size() << " snapshots, min value "
            << mchom::fmt_g17(shown.min_value) << ")\n"
            << "outputs written to " << c.output_dir << '\n';
  return 0;
}

int run_check(const CliOverrides& o) {
  int failures = 0;
  const auto check = [&](const char* name, const std::function<bool()>& fn) {
    bool ok = false;
    std::string detail;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      detail = e.what();
    }
    std::cout << (ok ? "ok: " : "failed: ") << name;
    if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
    std::cout << '\n';
    if (!ok) ++failures;
  };

  if (!o.config_path.empty()) {
    check("configuration file parses and validates", [&] {
      (void)load_config(o);
      return true;
    });
  }

  check("constant medium has zero correctors and k* = k I", [] {
    const auto model = mchom::CoefficientModel::constant(2.0, 2.0, 3.0);
    const mchom::SpaceHierarchy spaces = mchom::build_space_hierarchy(2, 2);
    const mchom::CellSolution sol =
        mchom::solve_full(spaces.at(2), model, {0.0, 0.0});
    for (int dir = 0; dir < 2; ++dir) {
      for (int k = 0; k < 2; ++k) {
        if ((*sol.dirs[dir][0].fields)[k].cwiseAbs().maxCoeff() > 1e-10) {
          return false;
        }
      }
    }
    const auto t = mchom::effective_tensor(spaces.at(2), model, {0.0, 0.0}, sol);
    return (t.k1_star - 2.0 * Eigen::Matrix2d::Identity()).norm() < 1e-9 &&
           (t.k2_star - 2.0 * Eigen::Matrix2d::Identity()).norm() < 1e-9;
  });

  check("effective tensor sum is symmetric positive definite", [] {
    const auto model = mchom::CoefficientModel::paper4(1.0);
    const mchom::SpaceHierarchy spaces = mchom::build_space_hierarchy(2, 2);
    const mchom::CellSolution sol =
        mchom::solve_full(spaces.at(2), model, {0.5, 0.0});
    const auto t = mchom::effective_tensor(spaces.at(2), model, {0.5, 0.0}, sol);
    const auto s = mchom::check_structure(t);
    return s.asymmetry <= 1e-8 * (t.k1_star + t.k2_star).norm() &&
           s.min_eig_sum > 0.0;
  });

  check("degree-of-freedom ledger matches the reference arithmetic", [] {
    const auto hierarchy =
        mchom::build_hierarchy({0.0, 0.0}, {1.0, 1.0}, 1, 0.5, 3);
    const auto spaces = mchom::build_space_hierarchy(2, 3);
    const auto ledger = mchom::dof_budget(hierarchy, spaces);
    return ledger.hier_total == 992 && ledger.full_total == 4352;
  });

  check("weighted initial condition", [] {
    const auto mesh = mchom::make_macro_mesh({0.0, 0.0}, {1.0, 1.0}, 4, 4);
    const auto c3 = [](double, double) { return 3.0; };
    const auto c1 = [](double, double) { return 1.0; };
    const auto g0 = [](double, double) { return 0.0; };
    const auto g4 = [](double, double) { return 4.0; };
    const Eigen::VectorXd u0 = mchom::initial_condition(mesh, g0, g4, c3, c1);
    return std::abs(u0[mesh.node(2, 2)] - 1.0) < 1e-14;
  });

  check("implicit-Euler energy decay", [] {
    mchom::MacroProblem p;
    p.mesh = mchom::make_macro_mesh({0.0, 0.0}, {1.0, 1.0}, 8, 8);
    p.c11 = [](double, double) { return 1.0; };
    p.c22 = [](double, double) { return 1.0; };
    p.conductivity = [](double, double) {
      return Eigen::Matrix2d(2.0 * Eigen::Matrix2d::Identity());
    };
    p.source_q = [](double, double) { return 0.0; };
    p.g1 = mchom::named_scalar_field("sinpi");
    p.g2 = p.g1;
    p.dt = 1e-3;
    const mchom::MacroOperators ops(p);
    Eigen::VectorXd u = ops.initial();
    double e = ops.energy(u);
    for (int s = 0; s < 5; ++s) {
      u = ops.step(u);
      const double en = ops.energy(u);
      if (en > e + 1e-14) return false;
      e = en;
    }
    return true;
  });

  check("hierarchical run is deterministic", [] {
    const auto model = mchom::CoefficientModel::paper4(1.0);
    const auto hierarchy =
        mchom::build_hierarchy({0.0, 0.0}, {1.0, 1.0}, 1, 0.5, 1);
    const auto spaces = mchom::build_space_hierarchy(2, 1);
    mchom::HierOptions opts;
    opts.reproducible = true;
    const auto run = [&] {
      const auto h = mchom::hierarchical_solve(model, hierarchy, spaces, opts);
      return mchom::kstar_csv(
          hierarchy, mchom::effective_tensors_all(model, hierarchy, spaces,
                                                  h.solutions));
    };
    return run() == run();
  });

  if (failures == 0) {
    std::cout << "all checks passed\n";
    return 0;
  }
  std::cerr << failures << " check(s) failed\n";
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchical numerical homogenization for two-continuum "
               "multiscale media"};
  app.set_version_flag("--version", std::string("mchom ") + kVersion);
  app.require_subcommand(1);

  CliOverrides solve_o, budget_o, simulate_o, check_o;
  CLI::App* solve = app.add_subcommand(
      "solve", "compute effective tensors (hier, full or both)");
  add_common_options(solve, &solve_o, true);
  CLI::App* budget = app.add_subcommand(
      "budget", "print the degree-of-freedom ledger without solving");
  add_common_options(budget, &budget_o, true);
  CLI::App* simulate = app.add_subcommand(
      "simulate", "solve cell problems, then the homogenized equation");
  add_common_options(simulate, &simulate_o, true);
  CLI::App* check = app.add_subcommand(
      "check", "run the built-in invariant suite");
  add_common_options(check, &check_o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(solve_o);
    if (budget->parsed()) return run_budget(budget_o);
    if (simulate->parsed()) return run_simulate(simulate_o);
    if (check->parsed()) return run_check(check_o);
  } catch (const mchom::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const mchom::SolveError& e) {
    std::cerr << "solve error: " << e.what() << '\n';
    return 3;
  } catch (const mchom::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
