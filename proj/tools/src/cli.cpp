#include "mfgplan_cli/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "mfgplan/error.hpp"
#include "mfgplan/estimates.hpp"
#include "mfgplan/example34.hpp"
#include "mfgplan/field_io.hpp"
#include "mfgplan/moser.hpp"
#include "mfgplan/planning_solver.hpp"
#include "mfgplan/residuals.hpp"
#include "mfgplan_cli/report.hpp"
#include "mfgplan_cli/run_config.hpp"

namespace mfgplan::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string show(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

std::string show_bool(bool b) { return b ? "true" : "false"; }

std::string exponent_tag(double s) {
  std::ostringstream out;
  out << s;
  return out.str();
}

double order(double coarse, double fine, double ratio) { return std::log(coarse / fine) / std::log(ratio); }

std::filesystem::path out_path(const std::string& dir, const std::string& file) {
  return std::filesystem::path(dir) / file;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

// Options shared by validate and solve for selecting the problem.
struct ProblemSource {
  std::string config_path;
  std::string scenario_name;
  std::optional<int> nx;
  std::optional<int> ny;
  std::optional<int> nt;

  void add(CLI::App& app) {
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--scenario", scenario_name, "Built-in scenario: trivial, bump, small-cosine-potential, example34");
    app.add_option("--nx", nx, "Override problem.nx");
    app.add_option("--ny", ny, "Override problem.ny");
    app.add_option("--nt", nt, "Override problem.nt");
  }

  RunConfig load() const {
    if (config_path.empty() == scenario_name.empty()) throw Error("give exactly one of --config and --scenario");
    RunConfig c = config_path.empty() ? scenario(scenario_name) : load_config(config_path);
    if (nx) c.problem.nx = *nx;
    if (ny) c.problem.ny = *ny;
    if (nt) c.problem.nt = *nt;
    return c;
  }
};

void print_certificate(std::ostream& out, const BoundCertificate& c) {
  out << bound_kind_name(c.kind) << ": bound=" << show(c.bound);
  if (c.observed) out << " observed=" << show(*c.observed);
  out << " tolerance=" << show(c.tolerance) << " pass=" << show_bool(c.pass) << "\n";
}

int cmd_validate(const ProblemSource& source, std::optional<double> p, const std::string& out_dir, std::ostream& out) {
  const RunConfig config = source.load();
  const PlanningProblem problem = build_problem(config);
  const ValidationReport report = validate_problem(problem, p);
  out << "potential=" << potential_name(problem.potential()) << "\n"
      << "grid=" << report.nx << "x" << report.ny << "x" << report.nt << "\n"
      << "delta_v_sup=" << show(report.delta_v_sup) << "\n"
      << "p_sup=" << show(report.p_sup) << "\n"
      << "k0=" << show(report.k0) << "\n"
      << "positive_lower_bound=" << show_bool(report.positive_lower_bound) << "\n"
      << "m0_rescale=" << show(problem.m0_rescale()) << "\n"
      << "mT_rescale=" << show(problem.mT_rescale()) << "\n";
  if (p) {
    out << "p=" << show(*p) << "\nepsilon=" << show(*report.epsilon) << "\np_admissible=" << show_bool(*report.p_admissible)
        << "\n";
  }
  if (!out_dir.empty()) {
    ReportRecords records;
    records.stem = "validation";
    records.summary = to_json(report);
    emit_report(records, ReportFormat::structured, out_dir);
  }
  return p && !*report.p_admissible ? kExitCheckFailed : kExitOk;
}

// Energy trajectory, convexity defect and tables for one exponent.
void analyse_exponent(const ScalarField& m, const ScalarField& V, double s, std::optional<double> c, Json& summary,
                      ReportRecords& records) {
  const EnergyTrajectory f = energy_trajectory(m, s);
  const ConvexityDefect defect = c ? convexity_defect(f, *c) : convexity_defect(f, V);
  const std::string tag = exponent_tag(s);
  records.tables.emplace_back("energy_s" + tag, energy_table(f));
  records.tables.emplace_back("convexity_s" + tag, convexity_table(f, defect));
  double max_f = -std::numeric_limits<double>::infinity();
  for (double v : f.values) max_f = std::max(max_f, v);
  summary["energy"][tag] = {{"max_f", number(max_f)}, {"convexity_defect", to_json(defect)}};
}

int cmd_solve(const ProblemSource& source, std::optional<int> max_iters, std::optional<double> tolerance,
              const std::string& out_override, std::ostream& out, std::ostream& err) {
  RunConfig config = source.load();
  if (max_iters) config.solver.max_iters = *max_iters;
  if (tolerance) config.solver.tolerance = *tolerance;
  const std::string out_dir = out_override.empty() ? config.output_dir : out_override;
  const PlanningProblem problem = build_problem(config);
  const SolverConfig solver = build_solver_config(config);
  const PlanningSolution solution = solve_planning(problem, solver);
  const SolveReport& report = solution.report;
  err << "solve: " << report.iterations << " iterations in " << std::fixed << std::setprecision(3) << report.wall_seconds
      << " s\n"
      << std::defaultfloat;

  bool all_pass = report.converged;
  Json summary;
  summary["validation"] = to_json(validate_problem(problem));
  summary["solve"] = to_json(report);
  ReportRecords records;
  records.stem = "report";
  Table history{{"iteration", "fixed_point_residual", "energy"}, {}};
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    history.rows.push_back({static_cast<double>(i + 1), report.residual_history[i], report.energy_history[i]});
  }
  records.tables.emplace_back("history", std::move(history));

  out << "iterations=" << report.iterations << "\n"
      << "converged=" << show_bool(report.converged) << "\n"
      << "fixed_point_residual=" << show(report.residual_history.back()) << "\n"
      << "final_energy=" << show(report.final_energy) << "\n"
      << "continuity_residual=" << show(report.continuity_residual) << "\n"
      << "mass_error=" << show(report.mass_error) << "\n"
      << "min_density=" << show(report.min_density) << "\n"
      << "hjb_l2=" << show(report.residuals.hjb_l2) << "\n"
      << "fp_l2=" << show(report.residuals.fp_l2) << "\n";
  if (!report.note.empty()) out << "note=" << report.note << "\n";

  const ScalarField& V = problem.potential_samples();
  for (double s : config.analysis.exponents) analyse_exponent(solution.m, V, s, std::nullopt, summary, records);
  const SupNormReport sup = supnorm_monitor(solution.m, config.analysis.vacuum_floor);
  summary["supnorm"] = to_json(sup);

  Json certificates = Json::array();
  for (double p : config.analysis.certificate_p) {
    const Theorem13Certificates certs =
        theorem13_bound(problem, p, solution.m, config.analysis.inverse, config.analysis.tolerance);
    print_certificate(out, certs.density);
    certificates.push_back(to_json(certs.density));
    all_pass = all_pass && certs.density.pass;
    if (certs.inverse) {
      print_certificate(out, *certs.inverse);
      certificates.push_back(to_json(*certs.inverse));
      all_pass = all_pass && certs.inverse->pass;
    }
  }
  summary["certificates"] = std::move(certificates);

  if (config.analysis.moser) {
    MoserParams params;
    params.alpha = config.analysis.moser_alpha;
    params.r = config.analysis.moser_r;
    params.C = config.analysis.moser_C;
    params.poincare = PoincareConstants::constant(config.analysis.moser_Cl);
    params.start_moment = config.analysis.moser_M;
    params.base_moment = config.analysis.moser_Mr;
    params.time_horizon = config.problem.horizon;
    const MoserCertificateResult moser = moser_certificate(params, config.analysis.moser_horizon);
    summary["moser"] = to_json(moser);
    all_pass = all_pass && moser.bounded;
  }

  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_field(out_path(out_dir, "m.field").string(), solution.m, "m");
    write_field(out_path(out_dir, "w.field").string(), solution.w, "w");
    if (report.value_recovered) write_field(out_path(out_dir, "u.field").string(), solution.u, "u");
    records.summary = std::move(summary);
    emit_report(records, ReportFormat::table, out_dir);
    emit_report(records, ReportFormat::structured, out_dir);
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

struct MonitorOptions {
  std::string m_path;
  std::string u_path;
  std::string v_path;
  double alpha = 1.0;
  std::vector<double> exponents{1.0, 2.0};
  std::optional<double> c;
  std::optional<double> p;
  bool inverse = false;
  double tolerance = 0.05;
  double vacuum_floor = kDefaultVacuumFloor;
  std::string out_dir;
};

int cmd_monitor(const MonitorOptions& o, std::ostream& out) {
  const ScalarField m = read_scalar_field(o.m_path);
  if (m.layout() != TimeLayout::nodes) throw Error("monitor: --m must be sampled on time nodes");
  const TorusGrid& grid = m.grid();
  ScalarField V(grid);
  if (!o.v_path.empty()) {
    V = read_scalar_field(o.v_path);
    if (!(V.grid() == grid) || V.layout() != TimeLayout::nodes) throw Error("monitor: --V does not match the grid of --m");
  }
  bool all_pass = true;
  Json summary;
  ReportRecords records;
  records.stem = "monitor";
  for (double s : o.exponents) {
    analyse_exponent(m, V, s, o.c, summary, records);
    out << "s=" << show(s) << " convexity_defect=" << show(summary["energy"][exponent_tag(s)]["convexity_defect"]["min"].is_number()
                                                               ? summary["energy"][exponent_tag(s)]["convexity_defect"]["min"].get<double>()
                                                               : kNan)
        << "\n";
  }
  const SupNormReport sup = supnorm_monitor(m, o.vacuum_floor);
  summary["supnorm"] = to_json(sup);
  out << "max_density=" << show(sup.max_density) << "\nmin_density=" << show(sup.min_density)
      << "\nvacuum=" << show_bool(sup.vacuum) << "\nargmin_t=" << show(sup.argmin_t) << "\nargmin_x=" << show(sup.argmin_x)
      << "\n";
  if (sup.max_inverse) out << "max_inverse_density=" << show(*sup.max_inverse) << "\n";

  const Coupling coupling = Coupling::power(o.alpha);
  if (!o.u_path.empty()) {
    const ScalarField u = read_scalar_field(o.u_path);
    if (!(u.grid() == grid) || u.layout() != TimeLayout::nodes) throw Error("monitor: --u does not match the grid of --m");
    Json identity = Json::object();
    for (double s : o.exponents) {
      if (s > 0.0 && s < 1.0) continue;
      const DisplacementDefects d = displacement_identity_check(m, u, V, coupling, s);
      identity[exponent_tag(s)] = to_json(d);
      out << "s=" << show(s) << " d1_defect=" << show(d.d1);
      if (d.d2) out << " d2_defect=" << show(*d.d2);
      out << "\n";
    }
    summary["displacement_identity"] = std::move(identity);
  }
  if (o.p) {
    const auto first = m.slice(0);
    const auto last = m.slice(grid.nt());
    PotentialSpec potential = ZeroPotential{};
    if (!o.v_path.empty()) potential = SampledPotential{V};
    const PlanningProblem problem(grid, {first.begin(), first.end()}, {last.begin(), last.end()}, coupling,
                                  std::move(potential));
    const Theorem13Certificates certs = theorem13_bound(problem, *o.p, m, o.inverse, o.tolerance);
    print_certificate(out, certs.density);
    Json list = Json::array({to_json(certs.density)});
    all_pass = certs.density.pass;
    if (certs.inverse) {
      print_certificate(out, *certs.inverse);
      list.push_back(to_json(*certs.inverse));
      all_pass = all_pass && certs.inverse->pass;
    }
    summary["certificates"] = std::move(list);
  }
  if (!o.out_dir.empty()) {
    records.summary = std::move(summary);
    emit_report(records, ReportFormat::table, o.out_dir);
    emit_report(records, ReportFormat::structured, o.out_dir);
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_manufactured(int nx, std::optional<int> nt_opt, std::vector<int> levels, const std::string& out_dir,
                     std::ostream& out) {
  const int nt = nt_opt.value_or(nx);
  const TorusGrid grid = TorusGrid::make_1d(nx, nt, 1.0);
  const ManufacturedFields fields = manufactured_example34(grid);
  if (levels.empty()) {
    for (int div : {4, 2, 1}) {
      if (nx % div == 0 && nt % div == 0 && nx / div >= 4 && nt / div >= 4) levels.push_back(nx / div);
    }
  }
  const Coupling coupling = Coupling::power(1.0);
  Table residuals{{"nx", "nt", "hjb_l2", "fp_l2", "hjb_order", "fp_order", "d1_defect", "d2_defect", "d1_order", "d2_order"},
                  {}};
  Table growth{{"nx", "nt", "delta_v_sup", "growth_ratio"}, {}};
  Json summary;
  std::vector<double> prev;
  for (int level : levels) {
    const int level_nt = static_cast<int>(static_cast<long>(nt) * level / nx);
    const TorusGrid g = TorusGrid::make_1d(level, level_nt, 1.0);
    const ManufacturedFields f = manufactured_example34(g);
    const PdeResiduals r = pde_residuals(f.m, f.u, f.V, coupling);
    const DisplacementDefects d = displacement_identity_check(f.m, f.u, f.V, coupling, 2.0);
    const double dv = delta_v_sup(f.V);
    std::vector<double> row{static_cast<double>(level), static_cast<double>(level_nt), r.hjb_l2, r.fp_l2, kNan, kNan,
                            d.d1, *d.d2, kNan, kNan};
    double ratio = kNan;
    if (!prev.empty()) {
      const double refine = level / prev[0];
      row[4] = order(prev[2], r.hjb_l2, refine);
      row[5] = order(prev[3], r.fp_l2, refine);
      row[8] = order(prev[6], d.d1, refine);
      row[9] = order(prev[7], *d.d2, refine);
      ratio = dv / growth.rows.back()[2];
    }
    residuals.rows.push_back(row);
    growth.rows.push_back({static_cast<double>(level), static_cast<double>(level_nt), dv, ratio});
    out << "N=" << level << " hjb_l2=" << show(r.hjb_l2) << " fp_l2=" << show(r.fp_l2) << " d1=" << show(d.d1)
        << " d2=" << show(*d.d2) << " delta_v_sup=" << show(dv);
    if (!std::isnan(row[4])) {
      out << " hjb_order=" << show(row[4]) << " fp_order=" << show(row[5]) << " dv_growth=" << show(ratio);
    }
    out << "\n";
    prev = row;
  }
  const SupNormReport sup = supnorm_monitor(fields.m);
  out << "min_density=" << show(sup.min_density) << " at t=" << show(sup.argmin_t) << " x=" << show(sup.argmin_x) << "\n";
  summary["grid"] = {{"nx", nx}, {"nt", nt}};
  summary["supnorm"] = to_json(sup);
  summary["potential_blow_up_flag"] = fields.V.blow_up_diagnostic();
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_field(out_path(out_dir, "m.field").string(), fields.m, "m");
    write_field(out_path(out_dir, "u.field").string(), fields.u, "u");
    write_field(out_path(out_dir, "V.field").string(), fields.V, "V");
    write_field(out_path(out_dir, "w.field").string(), example34_momentum(grid), "w");
    ReportRecords records;
    records.stem = "manufactured";
    records.summary = std::move(summary);
    records.tables.emplace_back("residuals", std::move(residuals));
    records.tables.emplace_back("delta_v", std::move(growth));
    emit_report(records, ReportFormat::table, out_dir);
    emit_report(records, ReportFormat::structured, out_dir);
  }
  return kExitOk;
}

int cmd_certify_moser(const MoserParams& params, int horizon, const std::string& out_dir, std::ostream& out) {
  const MoserSchedule schedule = exponent_schedule(params, std::max(horizon, 1));
  const MoserCertificateResult r = moser_recurrence(params, schedule, horizon);
  out << "n0=" << r.n0 << "\nN0=" << r.N0 << "\nrho=" << show(r.rho) << "\ncap=" << show(r.cap)
      << "\nlog_cap=" << show(r.log_cap) << "\nnormalized_final=" << show(r.normalized.back())
      << "\nbounded=" << show_bool(r.bounded) << "\nconverged=" << show_bool(r.converged) << "\n";
  if (!out_dir.empty()) {
    ReportRecords records;
    records.stem = "moser";
    records.summary = to_json(r);
    records.tables.emplace_back("moser", moser_table(r, schedule));
    emit_report(records, ReportFormat::table, out_dir);
    emit_report(records, ReportFormat::structured, out_dir);
  }
  return r.bounded ? kExitOk : kExitCheckFailed;
}

int cmd_lemma_bound(double a, double b, double c, double horizon, std::optional<double> observed, double tolerance,
                    const std::string& out_dir, std::ostream& out) {
  BoundCertificate cert = lemma_bound(a, b, c, horizon, tolerance);
  if (observed) check_observed(cert, *observed);
  print_certificate(out, cert);
  if (!out_dir.empty()) {
    ReportRecords records;
    records.stem = "lemma_bound";
    records.summary = to_json(cert);
    emit_report(records, ReportFormat::structured, out_dir);
  }
  return cert.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field planning problem lab: solver, estimates and certificates", "mfgplan"};
  app.require_subcommand(1);

  ProblemSource validate_source;
  std::optional<double> validate_p;
  std::string validate_out;
  CLI::App* validate = app.add_subcommand("validate", "Check the potential smallness and density positivity");
  validate_source.add(*validate);
  validate->add_option("--p", validate_p, "Exponent p to test for admissibility");
  validate->add_option("--out", validate_out, "Directory for validation.json");

  ProblemSource solve_source;
  std::optional<int> solve_iters;
  std::optional<double> solve_tol;
  std::string solve_out;
  CLI::App* solve = app.add_subcommand("solve", "Solve the planning problem and run the configured analyses");
  solve_source.add(*solve);
  solve->add_option("--max-iters", solve_iters, "Override solver.max_iters");
  solve->add_option("--tolerance", solve_tol, "Override solver.tolerance");
  solve->add_option("--out", solve_out, "Output directory (overrides output.dir)");

  MonitorOptions monitor_opts;
  CLI::App* monitor = app.add_subcommand("monitor", "Energy, convexity and sup-norm analyses of field files");
  monitor->add_option("--m", monitor_opts.m_path, "Density field file")->required();
  monitor->add_option("--u", monitor_opts.u_path, "Value field file (enables the displacement identity check)");
  monitor->add_option("--V", monitor_opts.v_path, "Potential field file (default: zero)");
  monitor->add_option("--alpha", monitor_opts.alpha, "Power coupling exponent");
  monitor->add_option("--s", monitor_opts.exponents, "Energy exponents")->delimiter(',');
  monitor->add_option("--c", monitor_opts.c, "Convexity constant (default |s-1| |lap V|_inf)");
  monitor->add_option("--p", monitor_opts.p, "Exponent p for the endpoint certificates");
  monitor->add_flag("--inverse", monitor_opts.inverse, "Also certify the inverse density (d = 1, p >= 2)");
  monitor->add_option("--tolerance", monitor_opts.tolerance, "Relative certificate tolerance");
  monitor->add_option("--vacuum-floor", monitor_opts.vacuum_floor, "Density at or below which vacuum is flagged");
  monitor->add_option("--out", monitor_opts.out_dir, "Output directory");

  int man_nx = 256;
  std::optional<int> man_nt;
  std::vector<int> man_levels;
  std::string man_out;
  CLI::App* manufactured = app.add_subcommand("manufactured", "Closed-form vacuum example: fields and refinement study");
  manufactured->add_option("--nx", man_nx, "Cells of the written fields")->check(CLI::PositiveNumber);
  manufactured->add_option("--nt", man_nt, "Time intervals of the written fields (default nx)");
  manufactured->add_option("--levels", man_levels, "Refinement levels in nx (default nx/4, nx/2, nx)")->delimiter(',');
  manufactured->add_option("--out", man_out, "Output directory");

  MoserParams moser;
  double moser_cl = 1.0;
  int moser_horizon = 60;
  std::string moser_out;
  CLI::App* certify = app.add_subcommand("certify-moser", "Moser iteration certificate");
  certify->add_option("--alpha", moser.alpha, "Coupling exponent alpha");
  certify->add_option("--r", moser.r, "Base integrability exponent r");
  certify->add_option("--C", moser.C, "Problem-data constant C >= 1");
  certify->add_option("--Cl", moser_cl, "Generalized Poincare constant C_l >= 1");
  certify->add_option("--M", moser.start_moment, "Starting moment M_{q_N0} >= 1");
  certify->add_option("--Mr", moser.base_moment, "Base moment bound M_r >= 1");
  certify->add_option("--horizon", moser_horizon, "Last index of the recurrence");
  certify->add_option("--out", moser_out, "Output directory");

  double la = 0.0;
  double lb = 0.0;
  double lc = 0.0;
  double lt = 1.0;
  std::optional<double> l_observed;
  double l_tol = 0.05;
  std::string l_out;
  CLI::App* lemma = app.add_subcommand("lemma-bound", "Endpoint bound for f'' + c f >= 0");
  lemma->add_option("--a", la, "f(0)")->required();
  lemma->add_option("--b", lb, "f(T)")->required();
  lemma->add_option("--c", lc, "Convexity constant c")->required();
  lemma->add_option("--T", lt, "Horizon T");
  lemma->add_option("--observed", l_observed, "Observed max f to certify");
  lemma->add_option("--tolerance", l_tol, "Relative tolerance");
  lemma->add_option("--out", l_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mfgplan: " << e.what() << " (run with --help for usage)\n";
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(validate_source, validate_p, validate_out, out);
    if (solve->parsed()) return cmd_solve(solve_source, solve_iters, solve_tol, solve_out, out, err);
    if (monitor->parsed()) return cmd_monitor(monitor_opts, out);
    if (manufactured->parsed()) return cmd_manufactured(man_nx, man_nt, man_levels, man_out, out);
    if (certify->parsed()) {
      moser.poincare = PoincareConstants::constant(moser_cl);
      return cmd_certify_moser(moser, moser_horizon, moser_out, out);
    }
    if (lemma->parsed()) return cmd_lemma_bound(la, lb, lc, lt, l_observed, l_tol, l_out, out);
  } catch (const Error& e) {
    err << "mfgplan: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mfgplan: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"mfgplan"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mfgplan::cli
