#include "mchom/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mchom {

namespace {

using json = nlohmann::ordered_json;

void append_row(std::string* out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out->push_back(',');
    out->append(cells[i]);
  }
  out->push_back('\n');
}

std::string fmt_display(double v, bool paper_format) {
  return paper_format ? fmt_fixed(v, 4) : fmt_g17(v);
}

}  // namespace

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string kstar_csv(const MacroHierarchy& hierarchy,
                      const std::vector<EffectiveTensors>& tensors) {
  if (tensors.size() != hierarchy.points.size()) {
    throw ConfigError("tensor row count does not match the lattice");
  }
  std::string out =
      "x1,x2,level,k1_11,k1_12,k1_21,k1_22,k2_11,k2_12,k2_21,k2_22\n";
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const MacroPoint& p = hierarchy.points[i];
    const EffectiveTensors& t = tensors[i];
    std::vector<std::string> cells{fmt_g17(p.x.x1), fmt_g17(p.x.x2),
                                   std::to_string(p.level)};
    for (const Eigen::Matrix2d* m : {&t.k1_star, &t.k2_star}) {
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) cells.push_back(fmt_g17((*m)(r, c)));
      }
    }
    append_row(&out, cells);
  }
  return out;
}

std::string errors_csv(const MacroHierarchy& hierarchy,
                       const ComparisonReport& report) {
  if (report.points.size() != hierarchy.points.size()) {
    throw ConfigError("comparison row count does not match the lattice");
  }
  std::string out =
      "x1,x2,level,k1_11_pct,k1_12_pct,k1_21_pct,k1_22_pct,"
      "k2_11_pct,k2_12_pct,k2_21_pct,k2_22_pct,"
      "energy_diff,offdiag_absdiff,correction_energy\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointComparison& pc = report.points[i];
    std::vector<std::string> cells{fmt_g17(pc.x.x1), fmt_g17(pc.x.x2),
                                   std::to_string(pc.level)};
    for (const auto& m : {pc.k1_err_pct, pc.k2_err_pct}) {
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) cells.push_back(fmt_g17(m[r][c]));
      }
    }
    cells.push_back(fmt_g17(pc.energy_diff));
    cells.push_back(fmt_g17(pc.offdiag_absdiff));
    cells.push_back(fmt_g17(pc.correction_energy));
    append_row(&out, cells);
  }
  return out;
}

std::string snapshot_csv(const MacroMesh& mesh, const Eigen::VectorXd& u) {
  if (u.size() != mesh.nodes()) {
    throw ConfigError("field length does not match the mesh");
  }
  std::string out = "x1,x2,u\n";
  for (int j = 0; j <= mesh.n2; ++j) {
    for (int i = 0; i <= mesh.n1; ++i) {
      append_row(&out, {fmt_g17(mesh.x1(i)), fmt_g17(mesh.x2(j)),
                        fmt_g17(u[mesh.node(i, j)])});
    }
  }
  return out;
}

json hierarchy_json(const MacroHierarchy& hierarchy) {
  json h;
  h["macro_dim"] = hierarchy.macro_dim;
  h["H"] = hierarchy.H;
  h["L"] = hierarchy.L;
  h["axis_points"] = hierarchy.axis_points;
  h["point_count"] = hierarchy.points.size();
  json pts = json::array();
  for (const MacroPoint& p : hierarchy.points) {
    pts.push_back(json{{"k", {p.k[0], p.k[1]}},
                       {"x", {p.x.x1, p.x.x2}},
                       {"level", p.level}});
  }
  h["points"] = std::move(pts);
  json levels = json::array();
  for (const auto& level : hierarchy.levels) levels.push_back(level);
  h["levels"] = std::move(levels);
  return h;
}

json ledger_json(const DofLedger& ledger) {
  json rows = json::array();
  for (const DofLedgerRow& r : ledger.rows) {
    rows.push_back(json{{"macro_level", r.macro_level},
                        {"fe_level", r.fe_level},
                        {"points", r.points},
                        {"space_dim", r.space_dim},
                        {"dofs", r.dofs}});
  }
  return json{{"rows", std::move(rows)},
              {"hier_total", ledger.hier_total},
              {"full_total", ledger.full_total},
              {"hier_grand_total", ledger.hier_grand_total},
              {"full_grand_total", ledger.full_grand_total}};
}

json comparison_json(const ComparisonReport& report) {
  json levels = json::array();
  for (const LevelSummary& s : report.levels) {
    levels.push_back(
        json{{"level", s.level},
             {"points", s.count},
             {"max_err_pct", s.max_err_pct},
             {"mean_err_pct", s.mean_err_pct},
             {"max_energy_diff", s.max_energy_diff},
             {"median_correction_energy", s.median_correction_energy}});
  }
  return json{{"max_err_pct", report.max_err_pct},
              {"max_energy_diff", report.max_energy_diff},
              {"levels", std::move(levels)}};
}

json parents_json(const std::vector<CellSolution>& sols) {
  json out = json::array();
  for (std::size_t i = 0; i < sols.size(); ++i) {
    if (sols[i].provenance != Provenance::Corrected) continue;
    out.push_back(json{{"point", i},
                       {"parents", sols[i].parent_points},
                       {"weights", sols[i].parent_weights}});
  }
  return out;
}

json timings_json(const std::vector<PhaseTiming>& phases, double full_seconds,
                  double total_seconds) {
  json ph = json::array();
  for (const PhaseTiming& t : phases) {
    ph.push_back(json{{"macro_level", t.macro_level},
                      {"seconds", t.seconds}});
  }
  return json{{"hier_phases", std::move(ph)},
              {"full_seconds", full_seconds},
              {"total_seconds", total_seconds}};
}

std::string kstar_table(const MacroHierarchy& hierarchy,
                        const std::vector<EffectiveTensors>& tensors,
                        bool paper_format) {
  std::ostringstream os;
  os << "x1          level  k1_11     k1_22     k2_11     k2_22\n";
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const MacroPoint& p = hierarchy.points[i];
    const EffectiveTensors& t = tensors[i];
    os << fmt_fixed(p.x.x1, 6);
    if (hierarchy.macro_dim == 2) os << ' ' << fmt_fixed(p.x.x2, 6);
    os << "  " << p.level << "      " << fmt_display(t.k1_star(0, 0), true)
       << "    " << fmt_display(t.k1_star(1, 1), true) << "    "
       << fmt_display(t.k2_star(0, 0), true) << "    "
       << fmt_display(t.k2_star(1, 1), true) << '\n';
  }
  if (!paper_format) {
    os << "(display rounded to 4 decimals; CSVs keep full precision)\n";
  }
  return os.str();
}

std::string errors_table(const MacroHierarchy& hierarchy,
                         const ComparisonReport& report, bool paper_format) {
  std::ostringstream os;
  os << "x1          level  k1_11_pct   k2_11_pct   energy_diff\n";
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointComparison& pc = report.points[i];
    os << fmt_fixed(pc.x.x1, 6);
    if (hierarchy.macro_dim == 2) os << ' ' << fmt_fixed(pc.x.x2, 6);
    os << "  " << pc.level << "      "
       << fmt_display(pc.k1_err_pct[0][0], paper_format) << "  "
       << fmt_display(pc.k2_err_pct[0][0], paper_format) << "  "
       << fmt_display(pc.energy_diff, paper_format) << '\n';
  }
  os << "max percentage error over diagonal entries: "
     << fmt_display(report.max_err_pct, paper_format) << '\n';
  return os.str();
}

std::string budget_table(const DofLedger& ledger) {
  std::ostringstream os;
  os << "level  fe_level  points  space_dim  dofs\n";
  for (const DofLedgerRow& r : ledger.rows) {
    os << r.macro_level << "      " << r.fe_level << "         " << r.points
       << "       " << r.space_dim << "        " << r.dofs << '\n';
  }
  os << "hierarchical total (per field per direction): " << ledger.hier_total
     << '\n'
     << "full-solve total  (per field per direction): " << ledger.full_total
     << '\n'
     << "hierarchical grand total: " << ledger.hier_grand_total << '\n'
     << "full-solve grand total:   " << ledger.full_grand_total << '\n';
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + p.parent_path().string() +
                    ": " + ec.message());
    }
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace mchom
