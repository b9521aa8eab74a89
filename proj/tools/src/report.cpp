#include "mfgplan_cli/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfgplan/error.hpp"

namespace mfgplan::cli {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["delta_v_sup"] = number(r.delta_v_sup);
  j["p_sup"] = number(r.p_sup);
  j["p"] = optional_number(r.p);
  j["epsilon"] = optional_number(r.epsilon);
  j["p_admissible"] = r.p_admissible ? Json(*r.p_admissible) : Json(nullptr);
  j["k0"] = number(r.k0);
  j["positive_lower_bound"] = r.positive_lower_bound;
  j["grid"] = {{"nx", r.nx}, {"ny", r.ny}, {"nt", r.nt}};
  return j;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_fixed_point_residual"] = r.residual_history.empty() ? Json(nullptr) : number(r.residual_history.back());
  Json history = Json::array();
  for (double v : r.residual_history) history.push_back(number(v));
  j["residual_history"] = std::move(history);
  Json energy = Json::array();
  for (double v : r.energy_history) energy.push_back(number(v));
  j["energy_history"] = std::move(energy);
  j["final_energy"] = number(r.final_energy);
  j["continuity_residual"] = number(r.continuity_residual);
  j["mass_error"] = number(r.mass_error);
  j["min_density"] = number(r.min_density);
  j["pde_residuals"] = {{"hjb_l2", number(r.residuals.hjb_l2)},
                        {"fp_l2", number(r.residuals.fp_l2)},
                        {"bc_linf", number(r.residuals.bc_linf)}};
  j["value_recovered"] = r.value_recovered;
  j["masked_fraction"] = number(r.masked_fraction);
  j["note"] = r.note;
  return j;
}

Json to_json(const BoundCertificate& c) {
  Json j;
  j["kind"] = bound_kind_name(c.kind);
  j["inputs"] = {{"a", number(c.a)},         {"b", number(c.b)},
                 {"c", number(c.c)},         {"T", number(c.horizon)},
                 {"p", number(c.p)},         {"epsilon", number(c.epsilon)},
                 {"s", number(c.s)}};
  j["bound"] = number(c.bound);
  j["observed"] = optional_number(c.observed);
  j["tolerance"] = number(c.tolerance);
  j["pass"] = c.pass;
  return j;
}

Json to_json(const MoserCertificateResult& r) {
  Json j;
  j["inputs"] = {{"alpha", number(r.params.alpha)},
                 {"r", number(r.params.r)},
                 {"C", number(r.params.C)},
                 {"M_start", number(r.params.start_moment)},
                 {"M_r", number(r.params.base_moment)},
                 {"beta", number(kMoserBeta)},
                 {"horizon", r.horizon}};
  if (r.params.poincare.is_constant()) {
    j["inputs"]["C_ell"] = number(r.params.poincare(0.0));
  } else {
    Json knots = Json::array();
    for (const auto& [ell, value] : r.params.poincare.knots()) knots.push_back({number(ell), number(value)});
    j["inputs"]["C_ell"] = std::move(knots);
  }
  j["n0"] = r.n0;
  j["N0"] = r.N0;
  j["rho"] = number(r.rho);
  j["reduced_constant"] = number(r.reduced_constant);
  j["log_cap"] = number(r.log_cap);
  j["cap"] = number(r.cap);
  Json samples = Json::array();
  for (std::size_t i = 0; i < r.indices.size(); ++i) {
    samples.push_back({{"n", r.indices[i]}, {"normalized", number(r.normalized[i])}, {"psi", number(r.psi[i])}});
  }
  j["normalized_sequence"] = std::move(samples);
  j["final_normalized"] = r.normalized.empty() ? Json(nullptr) : number(r.normalized.back());
  j["bounded"] = r.bounded;
  j["converged"] = r.converged;
  return j;
}

Json to_json(const SupNormReport& r) {
  Json j;
  j["max_density"] = number(r.max_density);
  j["min_density"] = number(r.min_density);
  j["max_inverse_density"] = optional_number(r.max_inverse);
  j["vacuum"] = r.vacuum;
  j["argmin"] = {{"slice", r.argmin_slice}, {"t", number(r.argmin_t)}, {"x", number(r.argmin_x)}, {"y", number(r.argmin_y)}};
  return j;
}

Json to_json(const ConvexityDefect& d) {
  return {{"min", number(d.min)}, {"argmin_slice", d.argmin}, {"c", number(d.c)}};
}

Json to_json(const DisplacementDefects& d) { return {{"d1", number(d.d1)}, {"d2", optional_number(d.d2)}}; }

Table energy_table(const EnergyTrajectory& f) {
  Table t{{"t", "f", "df", "d2f"}, {}};
  for (std::size_t k = 0; k < f.values.size(); ++k) t.rows.push_back({f.times[k], f.values[k], f.first[k], f.second[k]});
  return t;
}

Table convexity_table(const EnergyTrajectory& f, const ConvexityDefect& defect) {
  Table t{{"t", "f", "d2f", "d2f_plus_cf", "lemma_bound"}, {}};
  const double horizon = f.times.back();
  const double ct2 = defect.c * horizon * horizon;
  const double bound = ct2 < 2.0 ? 2.0 * (f.values.front() + f.values.back()) / (2.0 - ct2)
                                  : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    t.rows.push_back({f.times[k], f.values[k], f.second[k], defect.pointwise[k], bound});
  }
  return t;
}

Table moser_table(const MoserCertificateResult& r, const MoserSchedule& s) {
  Table t{{"n", "q", "gamma", "ell", "log_M", "normalized", "psi"}, {}};
  for (std::size_t i = 0; i < r.indices.size(); ++i) {
    const auto n = static_cast<std::size_t>(r.indices[i]);
    t.rows.push_back({static_cast<double>(n), s.q[n], s.gamma[n], s.ell[n], r.log_moments[i], r.normalized[i], r.psi[i]});
  }
  return t;
}

std::string format_table(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "\t" : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "\t" : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

std::vector<std::string> emit_report(const ReportRecords& records, ReportFormat format, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  if (format == ReportFormat::table) {
    for (const auto& [name, table] : records.tables) {
      const auto path = std::filesystem::path(dir) / (name + ".tsv");
      write_text(path, format_table(table));
      written.push_back(path.string());
    }
  } else {
    const auto path = std::filesystem::path(dir) / (records.stem + ".json");
    write_text(path, records.summary.dump(2) + "\n");
    written.push_back(path.string());
  }
  return written;
}

}  // namespace mfgplan::cli
