#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mfgplan/grid.hpp"
#include "mfgplan/spacetime_solver.hpp"

namespace mfgplan {

// Discrete continuity equation between a density on time nodes and a momentum
// on time intervals and spatial faces:
//   (m^{k+1} - m^k) / dt + div w^{k+1/2} = 0,   k = 0..nt-1.
// Returns the left-hand side on the intervals layout.
ScalarField continuity_defect(const ScalarField& m, const VectorField& w);
// max |continuity_defect|.
double continuity_residual(const ScalarField& m, const VectorField& w);

// Euclidean projection of (m, w) onto the affine set where the continuity
// equation holds and the end slices equal m0, mT. Reuses its spectral solver,
// so one instance serves all iterations of a solve.
class ContinuityProjector {
 public:
  // Throws when the masses of m0 and mT differ by more than 1e-10.
  ContinuityProjector(const TorusGrid& grid, std::vector<double> m0, std::vector<double> mT);

  void project(ScalarField& m, VectorField& w);

 private:
  TorusGrid grid_;
  std::vector<double> m0_;
  std::vector<double> mT_;
  SpacetimeSolver solver_;
};

std::pair<ScalarField, VectorField> continuity_project(const ScalarField& m, const VectorField& w,
                                                       std::span<const double> m0, std::span<const double> mT);

}  // namespace mfgplan
