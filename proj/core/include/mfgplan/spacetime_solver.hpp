#pragma once

#include <memory>

#include "mfgplan/grid.hpp"

namespace mfgplan {

enum class SpacetimeOperator {
  // Periodic spatial Laplacian plus the time second difference with
  // homogeneous Neumann ends, over all slices of the field. Kernel: constants.
  neumann_time_periodic_space,
  // Periodic spatial Laplacian on each slice independently. Kernel: one
  // constant per slice.
  periodic_space,
};

// Spectral inverse of the operators above. The time direction is
// diagonalized by the DCT-II, the periodic directions by the real DFT.
//
// A solver owns FFTW plans for one (grid, layout, operator) combination and a
// work buffer, so an instance must not be shared between threads. Separate
// instances are independent.
class SpacetimeSolver {
 public:
  SpacetimeSolver(const TorusGrid& grid, TimeLayout layout, SpacetimeOperator op);
  ~SpacetimeSolver();
  SpacetimeSolver(SpacetimeSolver&&) noexcept;
  SpacetimeSolver& operator=(SpacetimeSolver&&) noexcept;
  SpacetimeSolver(const SpacetimeSolver&) = delete;
  SpacetimeSolver& operator=(const SpacetimeSolver&) = delete;

  // Returns phi with op(phi) = rhs and zero kernel component. Throws when the
  // kernel component of rhs exceeds 1e-10 of its norm.
  ScalarField solve(const ScalarField& rhs);
  // Same, without the compatibility check: the kernel component of rhs is
  // discarded. For callers that have validated compatibility themselves.
  ScalarField solve_projected(const ScalarField& rhs);

  ScalarField apply(const ScalarField& phi) const;

  // Eigenvalue of the operator for time mode p and spatial modes (kx, ky) as
  // indexed in FFTW half-complex order.
  double eigenvalue(int p, int kx, int ky = 0) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around SpacetimeSolver::solve.
ScalarField spacetime_solve(const ScalarField& rhs, SpacetimeOperator op);

// Relative kernel defect of rhs: |projection onto the kernel| / |rhs|.
double kernel_defect(const ScalarField& rhs, SpacetimeOperator op);

}  // namespace mfgplan
