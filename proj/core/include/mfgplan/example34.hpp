#pragma once

#include "mfgplan/grid.hpp"

namespace mfgplan::example34 {

// Closed-form vacuum example on [0,1] x T^1 with g(m) = m:
//   m = 1 + sin(2 pi x) sin(2 pi t),
//   u = -(1 / 2 pi) cot(2 pi t) log(1 + sin(2 pi t) sin(2 pi x)),
//   V = m + u_t - u_x^2 / 2.
// m vanishes at (t, x) = (1/4, 3/4) and (3/4, 1/4).

double density(double t, double x);
double value(double t, double x);
double value_t(double t, double x);
double value_x(double t, double x);
double potential(double t, double x);
// -m u_x = cos(2 pi t) cos(2 pi x), smooth everywhere.
double momentum(double t, double x);

// Below this |sin(2 pi t)| the value function is evaluated by its series in
// sin(2 pi t); the closed form has a removable 0 * inf there.
inline constexpr double kSeriesThreshold = 1e-4;

}  // namespace mfgplan::example34

namespace mfgplan {

struct ManufacturedFields {
  ScalarField m;
  ScalarField u;
  ScalarField V;
};

// Samples of the example on the nodes of `grid`; requires d = 1, T = 1.
// V comes from the analytic derivatives of u, not from grid differences. If a
// node hits a zero of m, V is non-finite there and flagged as a blow-up
// diagnostic.
ManufacturedFields manufactured_example34(const TorusGrid& grid);

// The exact momentum w = -m u_x on faces x_{i+1/2} and time midpoints, in the
// layout used by the planning solver.
VectorField example34_momentum(const TorusGrid& grid);

}  // namespace mfgplan
