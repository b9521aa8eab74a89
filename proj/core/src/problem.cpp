#include "mfgplan/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfgplan/error.hpp"
#include "mfgplan/example34.hpp"
#include "mfgplan/operators.hpp"

namespace mfgplan {

std::string potential_name(const PotentialSpec& spec) {
  struct Visitor {
    std::string operator()(const ZeroPotential&) const { return "zero"; }
    std::string operator()(const CosinePotential&) const { return "cosine"; }
    std::string operator()(const Example34Potential&) const { return "example34"; }
    std::string operator()(const SampledPotential&) const { return "sampled"; }
  };
  return std::visit(Visitor{}, spec);
}

ScalarField sample_potential(const PotentialSpec& spec, const TorusGrid& grid) {
  ScalarField out(grid, TimeLayout::nodes);
  if (std::holds_alternative<ZeroPotential>(spec)) return out;
  if (const auto* cosine = std::get_if<CosinePotential>(&spec)) {
    for (int k = 0; k < out.slices(); ++k) {
      auto slice = out.slice(k);
      for (int i = 0; i < grid.nx(); ++i) {
        const double v = cosine->amplitude * std::cos(2.0 * std::numbers::pi * grid.x(i));
        for (int j = 0; j < grid.ny(); ++j) slice[grid.cell_index(i, j)] = v;
      }
    }
    return out;
  }
  if (std::holds_alternative<Example34Potential>(spec)) return manufactured_example34(grid).V;
  const auto& sampled = std::get<SampledPotential>(spec).values;
  if (!(sampled.grid() == grid) || sampled.layout() != TimeLayout::nodes) {
    throw Error("sampled potential does not live on the nodes of the problem grid");
  }
  if (!sampled.blow_up_diagnostic() && !sampled.all_finite()) {
    throw Error("sampled potential contains non-finite values");
  }
  return sampled;
}

double delta_v_sup(const ScalarField& potential) {
  if (!potential.all_finite()) return std::numeric_limits<double>::infinity();
  const ScalarField lap = laplacian(potential);
  double sup = 0.0;
  for (double v : lap.values()) sup = std::max(sup, std::abs(v));
  return sup;
}

double delta_v_sup(const PotentialSpec& spec, const TorusGrid& grid) {
  if (std::holds_alternative<ZeroPotential>(spec)) return 0.0;
  return delta_v_sup(sample_potential(spec, grid));
}

namespace {

double normalize(std::vector<double>& density, const TorusGrid& grid, const char* which) {
  if (density.size() != grid.cells()) {
    throw Error(std::string(which) + " has " + std::to_string(density.size()) + " values, the grid has " +
                std::to_string(grid.cells()) + " cells");
  }
  for (double v : density) {
    if (!std::isfinite(v) || v < 0.0) throw Error(std::string(which) + " must be finite and non-negative");
  }
  const double mass = integrate(density, grid);
  if (!(mass > 0.0)) throw Error(std::string(which) + " has zero mass");
  const double factor = 1.0 / mass;
  for (double& v : density) v *= factor;
  return factor;
}

}  // namespace

PlanningProblem::PlanningProblem(const TorusGrid& grid, std::vector<double> m0, std::vector<double> mT,
                                 Coupling coupling, PotentialSpec potential)
    : grid_(grid),
      m0_(std::move(m0)),
      mT_(std::move(mT)),
      coupling_(std::move(coupling)),
      potential_(std::move(potential)),
      potential_samples_(sample_potential(potential_, grid)) {
  m0_rescale_ = normalize(m0_, grid_, "m0");
  mT_rescale_ = normalize(mT_, grid_, "mT");
  k0_ = std::min(*std::min_element(m0_.begin(), m0_.end()), *std::min_element(mT_.begin(), mT_.end()));
  delta_v_sup_ = std::holds_alternative<ZeroPotential>(potential_) ? 0.0 : mfgplan::delta_v_sup(potential_samples_);
}

double epsilon_for(double p, double horizon, double delta_v_sup) { return 2.0 - p * horizon * horizon * delta_v_sup; }

ValidationReport validate_problem(const PlanningProblem& problem, std::optional<double> p) {
  ValidationReport report;
  const double horizon = problem.grid().horizon();
  report.delta_v_sup = problem.delta_v_sup();
  report.p_sup = report.delta_v_sup == 0.0 ? std::numeric_limits<double>::infinity()
                                           : 2.0 / (horizon * horizon * report.delta_v_sup);
  if (p) {
    report.p = *p;
    report.epsilon = report.delta_v_sup == 0.0 ? 2.0 : epsilon_for(*p, horizon, report.delta_v_sup);
    report.p_admissible = *p > 0.0 && *report.epsilon > 0.0;
  }
  report.k0 = problem.k0();
  report.positive_lower_bound = problem.k0() > 0.0;
  report.nx = problem.grid().nx();
  report.ny = problem.grid().ny();
  report.nt = problem.grid().nt();
  return report;
}

}  // namespace mfgplan
