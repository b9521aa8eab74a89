#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mfgplan/planning_solver.hpp"
#include "mfgplan/problem.hpp"

namespace mfgplan::cli {

// INI configuration with [problem], [solver], [analysis] and [output]
// sections. Every key is optional; defaults are the member initializers.
struct ProblemBlock {
  int dim = 1;
  double horizon = 1.0;
  int nx = 64;
  int ny = 1;
  int nt = 32;
  // "power" or "tabulated".
  std::string coupling = "power";
  double alpha = 1.0;
  // "m:g" pairs for tabulated couplings.
  std::vector<std::pair<double, double>> coupling_table;
  // "zero", "cosine", "example34" or "file".
  std::string potential = "zero";
  double amplitude = 0.0;
  std::string potential_file;
  // "uniform", "bump", "bump-shifted" or "file".
  std::string m0 = "uniform";
  std::string mT = "uniform";
  std::string m0_file;
  std::string mT_file;

  bool operator==(const ProblemBlock&) const = default;
};

struct SolverBlock {
  double step = 1.0;
  double relaxation = 1.8;
  int max_iters = 2000;
  double tolerance = 1e-8;
  // "linear" or "warm".
  std::string init = "linear";
  std::string warm_m;
  std::string warm_w;

  bool operator==(const SolverBlock&) const = default;
};

struct AnalysisBlock {
  std::vector<double> exponents;
  std::vector<double> certificate_p;
  bool inverse = false;
  double tolerance = 0.05;
  double vacuum_floor = 1e-8;
  bool moser = false;
  double moser_alpha = 1.0;
  double moser_r = 2.0;
  double moser_C = 1.0;
  double moser_Cl = 1.0;
  double moser_M = 1.0;
  double moser_Mr = 1.0;
  int moser_horizon = 60;

  bool operator==(const AnalysisBlock&) const = default;
};

struct RunConfig {
  ProblemBlock problem;
  SolverBlock solver;
  AnalysisBlock analysis;
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;
};

// Throws mfgplan::Error with the line number (syntax errors) or the
// section.key (unknown keys, bad values).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Built-in scenarios: trivial, bump, small-cosine-potential, example34.
std::vector<std::string> scenario_names();
RunConfig scenario(const std::string& name);

// Densities are read relative to the working directory.
PlanningProblem build_problem(const RunConfig& config);
SolverConfig build_solver_config(const RunConfig& config);

// Named density slice on `grid`, before normalization.
std::vector<double> named_density(const std::string& name, const TorusGrid& grid);

}  // namespace mfgplan::cli
