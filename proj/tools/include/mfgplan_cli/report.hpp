#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mfgplan/estimates.hpp"
#include "mfgplan/moser.hpp"
#include "mfgplan/planning_solver.hpp"
#include "mfgplan/problem.hpp"

namespace mfgplan::cli {

using Json = nlohmann::json;

// Finite values as numbers; nan, inf and -inf as strings.
Json number(double v);

Json to_json(const ValidationReport& report);
// Wall time is deliberately left out so that reports are reproducible.
Json to_json(const SolveReport& report);
Json to_json(const BoundCertificate& certificate);
Json to_json(const MoserCertificateResult& result);
Json to_json(const SupNormReport& report);
Json to_json(const ConvexityDefect& defect);
Json to_json(const DisplacementDefects& defects);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// t, f, f', f''.
Table energy_table(const EnergyTrajectory& f);
// t, f, f'', f'' + c f, lemma bound (nan when c T^2 >= 2).
Table convexity_table(const EnergyTrajectory& f, const ConvexityDefect& defect);
// n, q_n, gamma_n, ell_n, log M_{q_n}, M_{q_n}^{1/q_n}, Psi_n.
Table moser_table(const MoserCertificateResult& result, const MoserSchedule& schedule);

// Tab-separated, header line first, numbers with 17 significant digits.
std::string format_table(const Table& table);

enum class ReportFormat { table, structured };

struct ReportRecords {
  // File stem of the structured summary.
  std::string stem = "summary";
  Json summary = Json::object();
  std::vector<std::pair<std::string, Table>> tables;
};

// Writes <dir>/<name>.tsv per table (table) or <dir>/<stem>.json (structured),
// creating dir. Returns the written paths; throws on unwritable paths.
std::vector<std::string> emit_report(const ReportRecords& records, ReportFormat format, const std::string& dir);

}  // namespace mfgplan::cli
