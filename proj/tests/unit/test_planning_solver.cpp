#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfgplan/continuity.hpp"
#include "mfgplan/error.hpp"
#include "mfgplan/operators.hpp"
#include "mfgplan/planning_solver.hpp"
#include "test_support.hpp"

using namespace mfgplan;
using std::numbers::pi;

namespace {

std::vector<double> bump(const TorusGrid& g, double shift) {
  std::vector<double> out(g.cells());
  for (int i = 0; i < g.nx(); ++i) out[static_cast<std::size_t>(i)] = 1.0 + 0.9 * std::cos(2.0 * pi * (g.x(i) - shift));
  return out;
}

PlanningProblem trivial_problem() {
  const TorusGrid g = TorusGrid::make_1d(64, 32, 1.0);
  return PlanningProblem(g, std::vector<double>(g.cells(), 1.0), std::vector<double>(g.cells(), 1.0),
                         Coupling::power(1.0), ZeroPotential{});
}

PlanningProblem bump_problem() {
  const TorusGrid g = TorusGrid::make_1d(64, 32, 1.0);
  return PlanningProblem(g, bump(g, 0.0), bump(g, 0.5), Coupling::power(1.0), ZeroPotential{});
}

// Feasible competitor: linear interpolation of the end densities with the
// time-independent momentum solving div w = -(mT - m0).
std::pair<ScalarField, VectorField> linear_competitor(const PlanningProblem& p) {
  const TorusGrid& g = p.grid();
  ScalarField m(g);
  VectorField w(g, TimeLayout::intervals);
  for (int k = 0; k <= g.nt(); ++k) {
    const double s = static_cast<double>(k) / g.nt();
    for (std::size_t c = 0; c < g.cells(); ++c) m(k, c) = (1.0 - s) * p.m0()[c] + s * p.mT()[c];
  }
  std::vector<double> flux(g.cells(), 0.0);
  double acc = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    acc -= (p.mT()[c] - p.m0()[c]) * g.dx();
    flux[c] = acc;
  }
  double mean = 0.0;
  for (double v : flux) mean += v / static_cast<double>(flux.size());
  for (int k = 0; k < g.nt(); ++k) {
    for (std::size_t c = 0; c < g.cells(); ++c) w[0](k, c) = flux[c] - mean;
  }
  return {std::move(m), std::move(w)};
}

}  // namespace

TEST(PlanningSolver, TrivialProblemConvergesToUniformDensity) {
  const PlanningProblem p = trivial_problem();
  SolverConfig config;
  config.max_iters = 500;
  const PlanningSolution s = solve_planning(p, config);
  EXPECT_TRUE(s.report.converged);
  EXPECT_LE(s.report.iterations, 500);
  EXPECT_LE(s.report.residual_history.back(), 1e-8);
  for (double v : s.m.values()) EXPECT_NEAR(v, 1.0, 1e-6);
  EXPECT_LE(s.report.residuals.hjb_l2, 1e-6);
  EXPECT_LE(s.report.residuals.fp_l2, 1e-6);
  EXPECT_TRUE(s.report.value_recovered);
  EXPECT_TRUE(s.report.note.empty());
  EXPECT_EQ(s.report.residual_history.size(), static_cast<std::size_t>(s.report.iterations));
  EXPECT_EQ(s.report.energy_history.size(), static_cast<std::size_t>(s.report.iterations));
}

TEST(PlanningSolver, BumpProblemIsSymmetricAndConservative) {
  const PlanningProblem p = bump_problem();
  SolverConfig config;
  config.max_iters = 5000;
  config.tolerance = 1e-9;
  const PlanningSolution s = solve_planning(p, config);
  ASSERT_TRUE(s.report.converged);
  const TorusGrid& g = p.grid();
  double asym = 0.0;
  for (int k = 0; k <= g.nt(); ++k) {
    for (int i = 0; i < g.nx(); ++i) {
      const double mirrored = s.m(g.nt() - k, g.cell_index((i + g.nx() / 2) % g.nx()));
      asym = std::max(asym, std::abs(mirrored - s.m(k, g.cell_index(i))));
    }
  }
  EXPECT_LE(asym, 1e-4);
  EXPECT_LE(continuity_residual(s.m, s.w), 1e-10);
  for (int k = 0; k <= g.nt(); ++k) EXPECT_NEAR(integrate(s.m, k), 1.0, 1e-10);
  EXPECT_LE(s.report.mass_error, 1e-10);
  // The transport bends away from uniform: interior slices are not the linear mix.
  EXPECT_GT(s.report.min_density, -1e-6);
}

TEST(PlanningSolver, BeatsTheLinearCompetitor) {
  const PlanningProblem p = bump_problem();
  SolverConfig config;
  config.max_iters = 5000;
  config.tolerance = 1e-9;
  const PlanningSolution s = solve_planning(p, config);
  const auto [m, w] = linear_competitor(p);
  ASSERT_LE(continuity_residual(m, w), 1e-10);
  const double competitor = discrete_energy(m, w, p);
  EXPECT_LT(s.report.final_energy, competitor);
  EXPECT_NEAR(s.report.final_energy, discrete_energy(s.m, s.w, p), 1e-6);
}

TEST(PlanningSolver, EnergyHistoryIsBoundedBelow) {
  const PlanningProblem p = bump_problem();
  SolverConfig config;
  config.max_iters = 200;
  const PlanningSolution s = solve_planning(p, config);
  double running = std::numeric_limits<double>::infinity();
  std::size_t finite = 0;
  for (double e : s.report.energy_history) {
    if (!std::isfinite(e)) continue;
    ++finite;
    // V = 0 and G >= 0: the energy is non-negative.
    EXPECT_GE(e, 0.0);
    const double next = std::min(running, e);
    EXPECT_LE(next, running);
    running = next;
  }
  EXPECT_GT(finite, s.report.energy_history.size() / 2);
}

TEST(PlanningSolver, WarmStartFromSolutionIsImmediate) {
  const PlanningProblem p = bump_problem();
  SolverConfig config;
  config.max_iters = 5000;
  const PlanningSolution s = solve_planning(p, config);
  SolverConfig warm = config;
  warm.init = InitMode::warm_start;
  warm.warm_m = s.m;
  warm.warm_w = s.w;
  const PlanningSolution again = solve_planning(p, warm);
  EXPECT_TRUE(again.report.converged);
  EXPECT_LT(again.report.iterations, s.report.iterations);
  EXPECT_LE(mfgplan::testing::max_abs_diff(again.m, s.m), 1e-5);
}

TEST(PlanningSolver, NonConvergenceIsReported) {
  SolverConfig config;
  config.max_iters = 3;
  const PlanningSolution s = solve_planning(bump_problem(), config);
  EXPECT_FALSE(s.report.converged);
  EXPECT_EQ(s.report.iterations, 3);
  EXPECT_NE(s.report.note.find("no convergence within 3 iterations"), std::string::npos);
  // The returned pair is a projected iterate.
  EXPECT_LE(continuity_residual(s.m, s.w), 1e-10);
}

TEST(PlanningSolver, ConfigValidation) {
  SolverConfig c;
  c.relaxation = 2.0;
  EXPECT_THROW(validate_config(c), Error);
  c = SolverConfig{};
  c.step = 0.0;
  EXPECT_THROW(validate_config(c), Error);
  c = SolverConfig{};
  c.max_iters = 0;
  EXPECT_THROW(validate_config(c), Error);
  c = SolverConfig{};
  c.init = InitMode::warm_start;
  EXPECT_THROW(validate_config(c), Error);
  EXPECT_NO_THROW(validate_config(SolverConfig{}));
}

TEST(PlanningSolver, DiscreteEnergyOfUniformState) {
  const PlanningProblem p = trivial_problem();
  const ScalarField m(p.grid(), TimeLayout::nodes, 1.0);
  VectorField w(p.grid(), TimeLayout::intervals);
  // G(1) = 1/2 integrated over unit space-time.
  EXPECT_NEAR(discrete_energy(m, w, p), 0.5, 1e-14);
  ScalarField vac(p.grid());
  w[0](3, 5) = 1.0;
  EXPECT_EQ(discrete_energy(vac, w, p), std::numeric_limits<double>::infinity());
}
