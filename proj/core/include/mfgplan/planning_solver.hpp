#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfgplan/grid.hpp"
#include "mfgplan/problem.hpp"
#include "mfgplan/residuals.hpp"

namespace mfgplan {

enum class InitMode { linear, warm_start };

struct SolverConfig {
  // Douglas-Rachford prox step (a single step; the splitting has no dual step).
  double step = 1.0;
  double relaxation = 1.8;
  int max_iters = 2000;
  double tolerance = 1e-8;
  InitMode init = InitMode::linear;
  // Required for InitMode::warm_start: m on nodes, w on intervals.
  std::optional<ScalarField> warm_m;
  std::optional<VectorField> warm_w;
};

// Throws mfgplan::Error naming the offending field.
void validate_config(const SolverConfig& config);

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  // Normalized fixed-point residual |z_{n+1} - z_n| / max(1, |z_n|), one entry per iteration.
  std::vector<double> residual_history;
  // Energy of the proximal iterate, one entry per iteration.
  std::vector<double> energy_history;
  double final_energy = 0.0;
  double continuity_residual = 0.0;
  // max over slices of |integrate(m, t) - 1|.
  double mass_error = 0.0;
  double min_density = 0.0;
  PdeResiduals residuals;
  bool value_recovered = false;
  double masked_fraction = 0.0;
  std::string note;
  double wall_seconds = 0.0;
};

struct PlanningSolution {
  ScalarField m;
  VectorField w;
  ScalarField u;
  SolveReport report;
};

// Minimizes the discrete energy sum |w|^2/(2m) + G(m) - V m subject to the
// discrete continuity equation and the end densities by Douglas-Rachford
// splitting. Returns the last projected iterate, so the constraints hold to
// rounding even when the iteration did not converge (report.converged).
PlanningSolution solve_planning(const PlanningProblem& problem, const SolverConfig& config);

// Discrete energy of a staggered pair: m and w are averaged to cell centres
// and time midpoints. +inf when some centre has m <= 0 with non-zero momentum.
double discrete_energy(const ScalarField& m, const VectorField& w, const PlanningProblem& problem);

// Density below which faces are excluded from value recovery.
inline constexpr double kVacuumFloor = 1e-8;

struct ValueRecovery {
  ScalarField u;
  // Largest per-slice fraction of masked faces.
  double masked_fraction = 0.0;
};

// Recovers u from Du = -w/m: per slice a periodic least-squares gradient
// inversion, then additive constants such that the spatial mean of the HJB
// residual vanishes on every interior slice, and mean(u(0)) = 0. Throws when
// more than 10% of the faces of a slice are masked as vacuum.
ValueRecovery recover_value_detailed(const ScalarField& m, const VectorField& w, const PlanningProblem& problem);
ScalarField recover_value(const ScalarField& m, const VectorField& w, const PlanningProblem& problem);

}  // namespace mfgplan
