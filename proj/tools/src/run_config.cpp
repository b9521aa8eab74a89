#include "mfgplan_cli/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "mfgplan/error.hpp"
#include "mfgplan/field_io.hpp"

namespace mfgplan::cli {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error("config: " + key + " = '" + text + "' is not a number");
}

int to_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error("config: " + key + " = '" + text + "' is not an integer");
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw Error("config: " + key + " = '" + text + "' is not a boolean (true/false)");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::pair<double, double>> to_table(const std::string& key, const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error("config: " + key + " entry '" + item + "' must be m:g");
    out.emplace_back(to_double(key, trim(item.substr(0, colon))), to_double(key, trim(item.substr(colon + 1))));
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + fmt(values[i]);
  return out;
}

std::string join(const std::vector<std::pair<double, double>>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? ", " : "") + fmt(values[i].first) + ":" + fmt(values[i].second);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"problem",
       {
           {"dim", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.dim = to_int(k, v); }},
           {"T", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.horizon = to_double(k, v); }},
           {"nx", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.nx = to_int(k, v); }},
           {"ny", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.ny = to_int(k, v); }},
           {"nt", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.nt = to_int(k, v); }},
           {"coupling", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.coupling = v; }},
           {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.alpha = to_double(k, v); }},
           {"coupling_table",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.coupling_table = to_table(k, v); }},
           {"potential", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.potential = v; }},
           {"amplitude",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.problem.amplitude = to_double(k, v); }},
           {"potential_file", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.potential_file = v; }},
           {"m0", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.m0 = v; }},
           {"mT", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.mT = v; }},
           {"m0_file", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.m0_file = v; }},
           {"mT_file", [](RunConfig& c, const std::string&, const std::string& v) { c.problem.mT_file = v; }},
       }},
      {"solver",
       {
           {"step", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.step = to_double(k, v); }},
           {"relaxation",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.relaxation = to_double(k, v); }},
           {"max_iters", [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.max_iters = to_int(k, v); }},
           {"tolerance",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.solver.tolerance = to_double(k, v); }},
           {"init", [](RunConfig& c, const std::string&, const std::string& v) { c.solver.init = v; }},
           {"warm_m", [](RunConfig& c, const std::string&, const std::string& v) { c.solver.warm_m = v; }},
           {"warm_w", [](RunConfig& c, const std::string&, const std::string& v) { c.solver.warm_w = v; }},
       }},
      {"analysis",
       {
           {"exponents",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.exponents = to_list(k, v); }},
           {"certificate_p",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.certificate_p = to_list(k, v); }},
           {"inverse", [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.inverse = to_bool(k, v); }},
           {"tolerance",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.tolerance = to_double(k, v); }},
           {"vacuum_floor",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.vacuum_floor = to_double(k, v); }},
           {"moser", [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser = to_bool(k, v); }},
           {"moser_alpha",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_alpha = to_double(k, v); }},
           {"moser_r", [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_r = to_double(k, v); }},
           {"moser_C", [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_C = to_double(k, v); }},
           {"moser_Cl",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_Cl = to_double(k, v); }},
           {"moser_M", [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_M = to_double(k, v); }},
           {"moser_Mr",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_Mr = to_double(k, v); }},
           {"moser_horizon",
            [](RunConfig& c, const std::string& k, const std::string& v) { c.analysis.moser_horizon = to_int(k, v); }},
       }},
      {"output",
       {
           {"dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
       }},
  };
  return table;
}

void check_choice(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw Error("config: " + key + " = '" + value + "' must be one of: " + list);
}

void check(const RunConfig& c) {
  check_choice("problem.coupling", c.problem.coupling, {"power", "tabulated"});
  check_choice("problem.potential", c.problem.potential, {"zero", "cosine", "example34", "file"});
  check_choice("problem.m0", c.problem.m0, {"uniform", "bump", "bump-shifted", "file"});
  check_choice("problem.mT", c.problem.mT, {"uniform", "bump", "bump-shifted", "file"});
  check_choice("solver.init", c.solver.init, {"linear", "warm"});
  if (c.problem.potential == "file" && c.problem.potential_file.empty()) {
    throw Error("config: problem.potential = file requires problem.potential_file");
  }
  if (c.problem.m0 == "file" && c.problem.m0_file.empty()) throw Error("config: problem.m0 = file requires problem.m0_file");
  if (c.problem.mT == "file" && c.problem.mT_file.empty()) throw Error("config: problem.mT = file requires problem.mT_file");
  if (c.problem.coupling == "tabulated" && c.problem.coupling_table.size() < 2) {
    throw Error("config: problem.coupling = tabulated requires at least two problem.coupling_table entries");
  }
  if (c.solver.init == "warm" && (c.solver.warm_m.empty() || c.solver.warm_w.empty())) {
    throw Error("config: solver.init = warm requires solver.warm_m and solver.warm_w");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    const auto known = schema().find(section);
    if (known == schema().end()) {
      if (body.empty()) throw Error("config: key '" + section + "' outside of any section");
      throw Error("config: unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto setter = known->second.find(key);
      if (setter == known->second.end()) throw Error("config: unknown key " + section + "." + key);
      setter->second(config, section + "." + key, trim(value.data()));
    }
  }
  check(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  const ProblemBlock& p = c.problem;
  out << "[problem]\n"
      << "dim = " << p.dim << "\nT = " << fmt(p.horizon) << "\nnx = " << p.nx << "\nny = " << p.ny << "\nnt = " << p.nt
      << "\ncoupling = " << p.coupling << "\nalpha = " << fmt(p.alpha) << "\ncoupling_table = " << join(p.coupling_table)
      << "\npotential = " << p.potential << "\namplitude = " << fmt(p.amplitude)
      << "\npotential_file = " << p.potential_file << "\nm0 = " << p.m0 << "\nmT = " << p.mT
      << "\nm0_file = " << p.m0_file << "\nmT_file = " << p.mT_file << "\n\n";
  const SolverBlock& s = c.solver;
  out << "[solver]\n"
      << "step = " << fmt(s.step) << "\nrelaxation = " << fmt(s.relaxation) << "\nmax_iters = " << s.max_iters
      << "\ntolerance = " << fmt(s.tolerance) << "\ninit = " << s.init << "\nwarm_m = " << s.warm_m
      << "\nwarm_w = " << s.warm_w << "\n\n";
  const AnalysisBlock& a = c.analysis;
  out << "[analysis]\n"
      << "exponents = " << join(a.exponents) << "\ncertificate_p = " << join(a.certificate_p)
      << "\ninverse = " << (a.inverse ? "true" : "false") << "\ntolerance = " << fmt(a.tolerance)
      << "\nvacuum_floor = " << fmt(a.vacuum_floor) << "\nmoser = " << (a.moser ? "true" : "false")
      << "\nmoser_alpha = " << fmt(a.moser_alpha) << "\nmoser_r = " << fmt(a.moser_r) << "\nmoser_C = " << fmt(a.moser_C)
      << "\nmoser_Cl = " << fmt(a.moser_Cl) << "\nmoser_M = " << fmt(a.moser_M) << "\nmoser_Mr = " << fmt(a.moser_Mr)
      << "\nmoser_horizon = " << a.moser_horizon << "\n\n";
  out << "[output]\ndir = " << c.output_dir << "\n";
  return out.str();
}

std::vector<std::string> scenario_names() { return {"trivial", "bump", "small-cosine-potential", "example34"}; }

RunConfig scenario(const std::string& name) {
  RunConfig c;
  if (name == "trivial") {
    c.solver.max_iters = 500;
    c.analysis.exponents = {1.0, 2.0};
    c.analysis.certificate_p = {1.0};
  } else if (name == "bump") {
    c.problem.m0 = "bump";
    c.problem.mT = "bump-shifted";
    c.solver.max_iters = 5000;
    c.solver.tolerance = 1e-9;
    c.analysis.exponents = {1.0, 2.0};
    c.analysis.certificate_p = {1.0};
  } else if (name == "small-cosine-potential") {
    c.problem.nx = 128;
    c.problem.nt = 128;
    c.problem.potential = "cosine";
    c.problem.amplitude = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
    c.problem.m0 = "bump";
    c.problem.mT = "bump-shifted";
    c.solver.max_iters = 5000;
    c.analysis.exponents = {2.0};
    c.analysis.certificate_p = {1.0};
  } else if (name == "example34") {
    c.problem.nx = 128;
    c.problem.nt = 128;
    c.problem.potential = "example34";
    c.solver.max_iters = 5000;
    c.analysis.exponents = {2.0};
  } else {
    std::string list;
    for (const std::string& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
    throw Error("unknown scenario '" + name + "' (available: " + list + ")");
  }
  return c;
}

std::vector<double> named_density(const std::string& name, const TorusGrid& grid) {
  std::vector<double> out(grid.cells(), 1.0);
  if (name == "uniform") return out;
  double shift = 0.0;
  if (name == "bump-shifted") {
    shift = 0.5;
  } else if (name != "bump") {
    throw Error("unknown density '" + name + "'");
  }
  for (int i = 0; i < grid.nx(); ++i) {
    const double v = 1.0 + 0.9 * std::cos(2.0 * std::numbers::pi * (grid.x(i) - shift));
    for (int j = 0; j < grid.ny(); ++j) out[grid.cell_index(i, j)] = v;
  }
  return out;
}

namespace {

std::vector<double> end_density(const std::string& name, const std::string& file, const TorusGrid& grid,
                                const char* key) {
  if (name != "file") return named_density(name, grid);
  const ScalarField f = read_scalar_field(file);
  const TorusGrid& g = f.grid();
  if (g.dim() != grid.dim() || g.nx() != grid.nx() || g.ny() != grid.ny()) {
    throw Error(std::string("config: problem.") + key + "_file '" + file + "' does not match the spatial grid");
  }
  const auto slice = f.slice(0);
  return {slice.begin(), slice.end()};
}

}  // namespace

PlanningProblem build_problem(const RunConfig& config) {
  const ProblemBlock& p = config.problem;
  const TorusGrid grid = TorusGrid::make(p.dim, p.nx, p.ny, p.nt, p.horizon);
  const Coupling coupling = p.coupling == "power" ? Coupling::power(p.alpha) : Coupling::tabulated(p.coupling_table);
  PotentialSpec potential = ZeroPotential{};
  if (p.potential == "cosine") {
    potential = CosinePotential{p.amplitude};
  } else if (p.potential == "example34") {
    potential = Example34Potential{};
  } else if (p.potential == "file") {
    ScalarField v = read_scalar_field(p.potential_file);
    if (!(v.grid() == grid) || v.layout() != TimeLayout::nodes) {
      throw Error("config: problem.potential_file '" + p.potential_file + "' does not match the problem grid");
    }
    potential = SampledPotential{std::move(v)};
  }
  return PlanningProblem(grid, end_density(p.m0, p.m0_file, grid, "m0"), end_density(p.mT, p.mT_file, grid, "mT"),
                         coupling, std::move(potential));
}

SolverConfig build_solver_config(const RunConfig& config) {
  const SolverBlock& s = config.solver;
  SolverConfig out;
  out.step = s.step;
  out.relaxation = s.relaxation;
  out.max_iters = s.max_iters;
  out.tolerance = s.tolerance;
  if (s.init == "warm") {
    out.init = InitMode::warm_start;
    out.warm_m = read_scalar_field(s.warm_m);
    out.warm_w = read_vector_field(s.warm_w);
  }
  validate_config(out);
  return out;
}

}  // namespace mfgplan::cli
