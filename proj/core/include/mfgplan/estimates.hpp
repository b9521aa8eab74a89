#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mfgplan/coupling.hpp"
#include "mfgplan/grid.hpp"
#include "mfgplan/problem.hpp"

namespace mfgplan {

// f(t_k) = integral of m(t_k)^s, with discrete time derivatives.
struct EnergyTrajectory {
  double s = 1.0;
  double dt = 1.0;
  std::vector<double> times;
  std::vector<double> values;
  // Central differences inside, second-order one-sided differences at the ends.
  std::vector<double> first;
  // Central second differences; NaN at the two end slices.
  std::vector<double> second;

  static EnergyTrajectory from_samples(std::vector<double> values, double dt, double s = 1.0);
};

// Throws when m has a clearly negative entry, or a zero entry for s < 0 (the
// message names the vacuum location).
EnergyTrajectory energy_trajectory(const ScalarField& m, double s);

struct ConvexityDefect {
  // min over interior slices of f'' + c f.
  double min = 0.0;
  std::size_t argmin = 0;
  double c = 0.0;
  // f'' + c f per slice; NaN at the ends.
  std::vector<double> pointwise;
};

// Throws when the trajectory has fewer than 3 slices.
ConvexityDefect convexity_defect(const EnergyTrajectory& f, double c);
// c = |s - 1| * discrete |laplacian V|_inf on V's grid.
ConvexityDefect convexity_defect(const EnergyTrajectory& f, const ScalarField& potential);

struct DisplacementDefects {
  // max over interior slices of |d/dt int U(m) - int P(m) lap u|.
  double d1 = 0.0;
  // max over interior slices of
  // |d2/dt2 int U(m) - int [P'(m) m (lap u)^2 + P'(m) g'(m) |Dm|^2 + P(m) lap V]|, d = 1 only.
  std::optional<double> d2;
};

// U(z) = z^s. Throws for s in (0, 1), and for s <= 0 when d != 1.
DisplacementDefects displacement_identity_check(const ScalarField& m, const ScalarField& u, const ScalarField& V,
                                                const Coupling& coupling, double s);

enum class BoundKind { lemma23, thm13_density, thm13_inverse };

std::string bound_kind_name(BoundKind kind);

struct BoundCertificate {
  BoundKind kind = BoundKind::lemma23;
  // Inputs; entries that do not apply to the kind are NaN.
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double horizon = 0.0;
  double p = 0.0;
  double epsilon = 0.0;
  double s = 0.0;
  double bound = 0.0;
  std::optional<double> observed;
  // Relative slack: pass iff observed <= bound * (1 + tolerance).
  double tolerance = 0.05;
  bool pass = true;
};

// Records `observed` and updates the pass flag.
void check_observed(BoundCertificate& certificate, double observed);

// Endpoint bound for f'' + c f >= 0 on [0, T] with f(0) = a, f(T) = b:
// 2 (a + b) / (2 - c T^2). Throws when c T^2 >= 2.
BoundCertificate lemma_bound(double a, double b, double c, double horizon, double tolerance = 0.05);

struct Theorem13Certificates {
  BoundCertificate density;
  std::optional<BoundCertificate> inverse;
};

// Bounds on max_t int m^{p+1} and, when `inverse` is set, max_t int m^{1-p}
// by (2 / eps) (int m0^s + int mT^s), eps = 2 - p T^2 |lap V|_inf. The
// observed values come from `m`. Throws for inadmissible p, and for an inverse
// request unless d = 1, p >= 2 and k0 > 0.
Theorem13Certificates theorem13_bound(const PlanningProblem& problem, double p, const ScalarField& m,
                                      bool inverse = false, double tolerance = 0.05);

struct SupNormReport {
  double max_density = 0.0;
  double min_density = 0.0;
  // max 1/m; empty when the vacuum flag is set.
  std::optional<double> max_inverse;
  bool vacuum = false;
  int argmin_slice = 0;
  std::size_t argmin_cell = 0;
  double argmin_t = 0.0;
  double argmin_x = 0.0;
  double argmin_y = 0.0;
};

inline constexpr double kDefaultVacuumFloor = 1e-8;

SupNormReport supnorm_monitor(const ScalarField& m, double vacuum_floor = kDefaultVacuumFloor);

}  // namespace mfgplan
