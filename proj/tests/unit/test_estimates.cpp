#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfgplan/error.hpp"
#include "mfgplan/estimates.hpp"
#include "mfgplan/example34.hpp"
#include "mfgplan/planning_solver.hpp"
#include "test_support.hpp"

using namespace mfgplan;
using mfgplan::testing::observed_order;
using std::numbers::pi;

namespace {

ScalarField linear_value(const TorusGrid& g) {
  ScalarField u(g);
  for (int k = 0; k <= g.nt(); ++k) {
    for (double& v : u.slice(k)) v = -g.time(k, TimeLayout::nodes);
  }
  return u;
}

PlanningProblem uniform_problem(const TorusGrid& g, PotentialSpec v) {
  return PlanningProblem(g, std::vector<double>(g.cells(), 1.0), std::vector<double>(g.cells(), 1.0),
                         Coupling::power(1.0), std::move(v));
}

// The extremal member of the family: f'' = -c f, f(0) = a, f(T) = b.
double extremal(double a, double b, double c, double T, double t) {
  if (c == 0.0) return a + (b - a) * t / T;
  const double w = std::sqrt(c);
  return a * std::cos(w * t) + (b - a * std::cos(w * T)) / std::sin(w * T) * std::sin(w * t);
}

}  // namespace

TEST(EnergyTrajectory, UniformDensity) {
  const TorusGrid g = TorusGrid::make_1d(8, 4, 1.0);
  for (double s : {-1.0, 1.0, 2.0, 3.5}) {
    const EnergyTrajectory f = energy_trajectory(ScalarField(g, TimeLayout::nodes, 1.0), s);
    ASSERT_EQ(f.values.size(), 5u);
    for (double v : f.values) EXPECT_NEAR(v, 1.0, 1e-15);
    for (double v : f.first) EXPECT_NEAR(v, 0.0, 1e-13);
    EXPECT_TRUE(std::isnan(f.second.front()));
    EXPECT_TRUE(std::isnan(f.second.back()));
  }
}

TEST(EnergyTrajectory, VacuumExampleSquareIntegral) {
  const TorusGrid g = TorusGrid::make_1d(256, 256, 1.0);
  const ManufacturedFields ex = manufactured_example34(g);
  const EnergyTrajectory f = energy_trajectory(ex.m, 2.0);
  // int (1 + sin 2 pi x)^2 dx = 3/2 at t = 1/4.
  EXPECT_NEAR(f.values[64], 1.5, 1e-8);
  EXPECT_NEAR(f.times[64], 0.25, 1e-15);
  // Mass: s = 1 is flat.
  const EnergyTrajectory mass = energy_trajectory(ex.m, 1.0);
  for (double v : mass.values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(EnergyTrajectory, DerivativesOfAQuadratic) {
  std::vector<double> vals;
  const double dt = 0.1;
  for (int k = 0; k <= 10; ++k) vals.push_back(std::pow(k * dt, 2) + 3.0 * k * dt);
  const EnergyTrajectory f = EnergyTrajectory::from_samples(vals, dt, 2.0);
  for (std::size_t k = 0; k < vals.size(); ++k) EXPECT_NEAR(f.first[k], 2.0 * k * dt + 3.0, 1e-12);
  for (std::size_t k = 1; k + 1 < vals.size(); ++k) EXPECT_NEAR(f.second[k], 2.0, 1e-10);
}

TEST(EnergyTrajectory, RejectsNegativeAndVacuum) {
  const TorusGrid g = TorusGrid::make_1d(8, 4, 1.0);
  ScalarField m(g, TimeLayout::nodes, 1.0);
  m(2, 3) = -0.1;
  EXPECT_THROW(energy_trajectory(m, 2.0), Error);
  m(2, 3) = 0.0;
  EXPECT_NO_THROW(energy_trajectory(m, 2.0));
  try {
    energy_trajectory(m, -1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("t = 0.5"), std::string::npos) << e.what();
  }
}

TEST(ConvexityDefect, QuadraticWithoutPotential) {
  std::vector<double> vals;
  for (int k = 0; k <= 20; ++k) vals.push_back(std::pow(k / 20.0, 2));
  const ConvexityDefect d = convexity_defect(EnergyTrajectory::from_samples(vals, 1.0 / 20.0), 0.0);
  for (std::size_t k = 1; k + 1 < vals.size(); ++k) EXPECT_NEAR(d.pointwise[k], 2.0, 1e-10);
  EXPECT_NEAR(d.min, 2.0, 1e-10);
}

TEST(ConvexityDefect, SineFamilyMember) {
  const int n = 200;
  std::vector<double> vals;
  for (int k = 0; k <= n; ++k) vals.push_back(1.0 + std::sin(pi * k / n));
  const ConvexityDefect d = convexity_defect(EnergyTrajectory::from_samples(vals, 1.0 / n), pi * pi);
  // f'' + pi^2 f = pi^2 exactly; the second difference is off by O(dt^2).
  EXPECT_NEAR(d.min, pi * pi, 1e-3);
  EXPECT_THROW(convexity_defect(EnergyTrajectory::from_samples({1.0, 2.0}, 0.5), 0.0), Error);
}

TEST(ConvexityDefect, ConvexSamplesAreNonNegative) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = d(rng);
    const double b = d(rng);
    const double c = d(rng);
    std::vector<double> vals;
    for (int k = 0; k <= 64; ++k) {
      const double t = k / 64.0;
      vals.push_back(std::exp(a * t) + b * t * t - c * t);
    }
    EXPECT_GE(convexity_defect(EnergyTrajectory::from_samples(vals, 1.0 / 64.0), 0.0).min, -1e-12);
  }
}

TEST(ConvexityDefect, SolverOutputWithoutPotential) {
  const TorusGrid g = TorusGrid::make_1d(64, 32, 1.0);
  std::vector<double> m0(g.cells());
  std::vector<double> mT(g.cells());
  for (int i = 0; i < g.nx(); ++i) {
    m0[static_cast<std::size_t>(i)] = 1.0 + 0.9 * std::cos(2.0 * pi * g.x(i));
    mT[static_cast<std::size_t>(i)] = 1.0 + 0.9 * std::cos(2.0 * pi * (g.x(i) - 0.5));
  }
  const PlanningProblem p(g, m0, mT, Coupling::power(1.0), ZeroPotential{});
  SolverConfig config;
  config.max_iters = 5000;
  const PlanningSolution s = solve_planning(p, config);
  const EnergyTrajectory f = energy_trajectory(s.m, 2.0);
  const ConvexityDefect d = convexity_defect(f, p.potential_samples());
  EXPECT_EQ(d.c, 0.0);
  const double max_f = *std::max_element(f.values.begin(), f.values.end());
  EXPECT_GE(d.min, -1e-2 * max_f);
  const EnergyTrajectory mass = energy_trajectory(s.m, 1.0);
  for (double v : mass.values) EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(DisplacementIdentity, ConstantSolution) {
  const TorusGrid g = TorusGrid::make_1d(16, 8, 1.0);
  const ScalarField m(g, TimeLayout::nodes, 1.0);
  for (double s : {-1.0, 1.0, 2.0, 3.0}) {
    const DisplacementDefects d = displacement_identity_check(m, linear_value(g), ScalarField(g), Coupling::power(1.0), s);
    EXPECT_LE(d.d1, 1e-12);
    ASSERT_TRUE(d.d2.has_value());
    EXPECT_LE(*d.d2, 1e-12);
  }
}

TEST(DisplacementIdentity, VacuumExampleRefinement) {
  std::vector<DisplacementDefects> ds;
  for (int n : {64, 128, 256}) {
    const ManufacturedFields f = manufactured_example34(TorusGrid::make_1d(n, n, 1.0));
    ds.push_back(displacement_identity_check(f.m, f.u, f.V, Coupling::power(1.0), 2.0));
  }
  for (std::size_t i = 1; i < ds.size(); ++i) {
    EXPECT_GE(observed_order(ds[i - 1].d1, ds[i].d1), 1.8);
    EXPECT_GE(observed_order(*ds[i - 1].d2, *ds[i].d2), 1.5);
  }
}

TEST(DisplacementIdentity, DomainChecks) {
  const TorusGrid g1 = TorusGrid::make_1d(8, 4, 1.0);
  const ScalarField m(g1, TimeLayout::nodes, 1.0);
  EXPECT_THROW(displacement_identity_check(m, linear_value(g1), ScalarField(g1), Coupling::power(1.0), 0.5), Error);
  const TorusGrid g2 = TorusGrid::make_2d(8, 8, 4, 1.0);
  const ScalarField m2(g2, TimeLayout::nodes, 1.0);
  EXPECT_THROW(displacement_identity_check(m2, linear_value(g2), ScalarField(g2), Coupling::power(1.0), -1.0), Error);
  const DisplacementDefects d = displacement_identity_check(m2, linear_value(g2), ScalarField(g2), Coupling::power(1.0), 2.0);
  EXPECT_FALSE(d.d2.has_value());
}

TEST(LemmaBound, Examples) {
  EXPECT_DOUBLE_EQ(lemma_bound(1, 1, 0, 1).bound, 2.0);
  EXPECT_DOUBLE_EQ(lemma_bound(1, 1, 1, 1).bound, 4.0);
  EXPECT_THROW(lemma_bound(1, 1, pi * pi, 1), Error);
  EXPECT_THROW(lemma_bound(1, 1, 2.0, 1), Error);
  EXPECT_THROW(lemma_bound(1, 1, -1.0, 1), Error);
  EXPECT_THROW(lemma_bound(-1, 1, 0.5, 1), Error);
  BoundCertificate c = lemma_bound(1, 1, 1, 1);
  check_observed(c, 4.1);
  EXPECT_TRUE(c.pass);
  check_observed(c, 4.3);
  EXPECT_FALSE(c.pass);
}

TEST(LemmaBound, ExtremalTrajectoriesRespectTheBound) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ab(0.0, 10.0);
  std::uniform_real_distribution<double> th(0.1, 3.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = ab(rng);
    const double b = ab(rng);
    const double T = th(rng);
    const double c = frac(rng) * 2.0 / (T * T) * (1.0 - 1e-9);
    const double bound = lemma_bound(a, b, c, T).bound;
    double max_f = 0.0;
    for (int k = 0; k <= 2000; ++k) max_f = std::max(max_f, extremal(a, b, c, T, T * k / 2000.0));
    EXPECT_LE(max_f, bound * (1.0 + 1e-10)) << "a=" << a << " b=" << b << " c=" << c << " T=" << T;
  }
}

TEST(LemmaBound, SineFamilyIsRejected) {
  for (double T : {0.5, 1.0, 2.0}) {
    EXPECT_THROW(lemma_bound(1, 1, pi * pi / (T * T), T), Error);
    EXPECT_THROW(lemma_bound(1, 1, 4.0 * pi * pi / (T * T), T), Error);
  }
}

TEST(EndpointBound, UniformDensityWithoutPotential) {
  const TorusGrid g = TorusGrid::make_1d(16, 8, 1.0);
  const PlanningProblem p = uniform_problem(g, ZeroPotential{});
  const Theorem13Certificates c = theorem13_bound(p, 1.0, ScalarField(g, TimeLayout::nodes, 1.0));
  EXPECT_DOUBLE_EQ(c.density.bound, 2.0);
  EXPECT_DOUBLE_EQ(*c.density.observed, 1.0);
  EXPECT_TRUE(c.density.pass);
  EXPECT_FALSE(c.inverse.has_value());
}

TEST(EndpointBound, UnitLaplacianPotential) {
  const TorusGrid g = TorusGrid::make_1d(32, 8, 1.0);
  const double dx = g.dx();
  // Amplitude giving a discrete |lap V|_inf of exactly 1.
  const double A = 1.0 / (4.0 / (dx * dx) * std::pow(std::sin(pi * dx), 2) * std::cos(pi * dx));
  const PlanningProblem p = uniform_problem(g, CosinePotential{A});
  ASSERT_NEAR(p.delta_v_sup(), 1.0, 1e-12);
  const Theorem13Certificates c = theorem13_bound(p, 1.0, ScalarField(g, TimeLayout::nodes, 1.0));
  EXPECT_NEAR(c.density.epsilon, 1.0, 1e-12);
  EXPECT_NEAR(c.density.bound, 4.0, 1e-11);
  EXPECT_THROW(theorem13_bound(p, 2.0, ScalarField(g, TimeLayout::nodes, 1.0)), Error);
}

TEST(EndpointBound, InverseDensityBound) {
  const TorusGrid g = TorusGrid::make_1d(32, 8, 1.0);
  const PlanningProblem zero = uniform_problem(g, ZeroPotential{});
  const ScalarField m(g, TimeLayout::nodes, 1.0);
  const Theorem13Certificates c = theorem13_bound(zero, 2.0, m, true);
  ASSERT_TRUE(c.inverse.has_value());
  EXPECT_DOUBLE_EQ(c.inverse->s, -1.0);
  // (2 / eps)(int m0^-1 + int mT^-1) = 4 / eps with eps = 2.
  EXPECT_DOUBLE_EQ(c.inverse->bound, 2.0);
  const double dx = g.dx();
  const double A = 0.25 / (4.0 / (dx * dx) * std::pow(std::sin(pi * dx), 2) * std::cos(pi * dx));
  const PlanningProblem small = uniform_problem(g, CosinePotential{A});
  const Theorem13Certificates d = theorem13_bound(small, 2.0, m, true);
  EXPECT_NEAR(d.inverse->bound, 4.0 / 1.5, 1e-11);
  EXPECT_THROW(theorem13_bound(zero, 1.0, m, true), Error);
  const PlanningProblem vac(g, std::vector<double>(g.cells(), 1.0), [&] {
    std::vector<double> v(g.cells(), 1.0);
    v[0] = 0.0;
    return v;
  }(), Coupling::power(1.0), ZeroPotential{});
  EXPECT_THROW(theorem13_bound(vac, 2.0, m, true), Error);
}

TEST(SupNorm, UniformDensity) {
  const SupNormReport r = supnorm_monitor(ScalarField(TorusGrid::make_1d(8, 4, 1.0), TimeLayout::nodes, 1.0));
  EXPECT_EQ(r.max_density, 1.0);
  EXPECT_EQ(r.min_density, 1.0);
  EXPECT_EQ(*r.max_inverse, 1.0);
  EXPECT_FALSE(r.vacuum);
}

TEST(SupNorm, VacuumExampleMinimumSitsAtAZero) {
  const TorusGrid g = TorusGrid::make_1d(256, 256, 1.0);
  const ManufacturedFields f = manufactured_example34(g);
  const SupNormReport r = supnorm_monitor(f.m, 2e-3);
  EXPECT_LE(r.min_density, 2e-3);
  const bool near_first = std::abs(r.argmin_t - 0.25) <= g.dt() && std::abs(r.argmin_x - 0.75) <= g.dx();
  const bool near_second = std::abs(r.argmin_t - 0.75) <= g.dt() && std::abs(r.argmin_x - 0.25) <= g.dx();
  EXPECT_TRUE(near_first || near_second) << r.argmin_t << " " << r.argmin_x;
  EXPECT_TRUE(r.vacuum);
  EXPECT_FALSE(r.max_inverse.has_value());
  // Cell centres miss x = 3/4 by dx/2, so the grid minimum is O(dx^2) and
  // stays above the default floor.
  EXPECT_FALSE(supnorm_monitor(f.m).vacuum);
}
