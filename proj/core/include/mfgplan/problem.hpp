#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mfgplan/coupling.hpp"
#include "mfgplan/grid.hpp"

namespace mfgplan {

struct ZeroPotential {
  bool operator==(const ZeroPotential&) const = default;
};

// V(t, x) = amplitude * cos(2 pi x).
struct CosinePotential {
  double amplitude = 0.0;
  bool operator==(const CosinePotential&) const = default;
};

// The potential of the manufactured vacuum example (d = 1, T = 1).
struct Example34Potential {
  bool operator==(const Example34Potential&) const = default;
};

struct SampledPotential {
  ScalarField values;
};

using PotentialSpec = std::variant<ZeroPotential, CosinePotential, Example34Potential, SampledPotential>;

std::string potential_name(const PotentialSpec& spec);

// V on the nodes of `grid`. Sampled potentials must already live on `grid`.
ScalarField sample_potential(const PotentialSpec& spec, const TorusGrid& grid);

// Discrete max over all nodes of |laplacian(V)|, at the resolution of `grid`.
double delta_v_sup(const PotentialSpec& spec, const TorusGrid& grid);
double delta_v_sup(const ScalarField& potential);

// Problem data of the planning problem with potential.
class PlanningProblem {
 public:
  // End densities are single slices (grid.cells() values). They are rescaled
  // to unit mass; the factors applied are kept for reporting. Throws on
  // negative or non-finite densities, or zero mass.
  PlanningProblem(const TorusGrid& grid, std::vector<double> m0, std::vector<double> mT, Coupling coupling,
                  PotentialSpec potential);

  const TorusGrid& grid() const { return grid_; }
  const std::vector<double>& m0() const { return m0_; }
  const std::vector<double>& mT() const { return mT_; }
  const Coupling& coupling() const { return coupling_; }
  const PotentialSpec& potential() const { return potential_; }
  const ScalarField& potential_samples() const { return potential_samples_; }

  // min over both end densities.
  double k0() const { return k0_; }
  double delta_v_sup() const { return delta_v_sup_; }
  double m0_rescale() const { return m0_rescale_; }
  double mT_rescale() const { return mT_rescale_; }

 private:
  TorusGrid grid_;
  std::vector<double> m0_;
  std::vector<double> mT_;
  Coupling coupling_;
  PotentialSpec potential_;
  ScalarField potential_samples_;
  double k0_ = 0.0;
  double delta_v_sup_ = 0.0;
  double m0_rescale_ = 1.0;
  double mT_rescale_ = 1.0;
};

struct ValidationReport {
  double delta_v_sup = 0.0;
  // Supremum of admissible exponents 2 / (T^2 |laplacian V|_inf); +inf for V = 0.
  double p_sup = 0.0;
  std::optional<double> p;
  // 2 - p T^2 |laplacian V|_inf for the queried p.
  std::optional<double> epsilon;
  std::optional<bool> p_admissible;
  double k0 = 0.0;
  bool positive_lower_bound = false;
  int nx = 0;
  int ny = 0;
  int nt = 0;
};

// Smallness of the potential relative to the exponent p, and positivity of
// the end densities. Never throws on failing assumptions; they are flags.
ValidationReport validate_problem(const PlanningProblem& problem, std::optional<double> p = std::nullopt);

double epsilon_for(double p, double horizon, double delta_v_sup);

}  // namespace mfgplan
