#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mchom/hier_driver.hpp"
#include "mchom/macro_solver.hpp"

namespace mchom {

/// Full round-trip decimal form of a double (17 significant digits):
/// parsing the string recovers the exact bit pattern.
std::string fmt_g17(double v);

/// Fixed-point display form used by the table views.
std::string fmt_fixed(double v, int digits = 4);

/// CSV of effective tensors, one row per macrogrid point in lattice order:
/// x1, x2, level, then the k1* and k2* entries row-major.
std::string kstar_csv(const MacroHierarchy& hierarchy,
                      const std::vector<EffectiveTensors>& tensors);

/// CSV of the hierarchical-vs-reference comparison, one row per point:
/// percentage relative errors of every tensor entry, the analysis-norm
/// difference, the largest off-diagonal absolute discrepancy, and the
/// analysis norm of the point's local correction.
std::string errors_csv(const MacroHierarchy& hierarchy,
                       const ComparisonReport& report);

/// CSV of one macro snapshot: x1, x2, u at every mesh node.
std::string snapshot_csv(const MacroMesh& mesh, const Eigen::VectorXd& u);

nlohmann::ordered_json hierarchy_json(const MacroHierarchy& hierarchy);
nlohmann::ordered_json ledger_json(const DofLedger& ledger);
nlohmann::ordered_json comparison_json(const ComparisonReport& report);
nlohmann::ordered_json parents_json(const std::vector<CellSolution>& sols);
nlohmann::ordered_json timings_json(const std::vector<PhaseTiming>& phases,
                                    double full_seconds,
                                    double total_seconds);

/// Human-readable stdout tables.  With paper_format the values are rounded
/// to four decimals for display; CSV output is never rounded.
std::string kstar_table(const MacroHierarchy& hierarchy,
                        const std::vector<EffectiveTensors>& tensors,
                        bool paper_format);
std::string errors_table(const MacroHierarchy& hierarchy,
                         const ComparisonReport& report, bool paper_format);
std::string budget_table(const DofLedger& ledger);

/// Writes content to path, creating parent directories; throws IoError.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mchom
