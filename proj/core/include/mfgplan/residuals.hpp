#pragma once

#include <span>

#include "mfgplan/coupling.hpp"
#include "mfgplan/grid.hpp"

namespace mfgplan {

struct PdeResiduals {
  // Space-time L2 norms over interior time nodes.
  double hjb_l2 = 0.0;
  double fp_l2 = 0.0;
  // max |m(0) - m0|, |m(T) - mT| (0 when no end data is given).
  double bc_linf = 0.0;
};

// Pointwise residual of -u_t + |Du|^2/2 + V - g(m) at interior nodes (slices
// 1..nt-1; slices 0 and nt are left zero). Central difference in time,
// gradient_norm_sq in space.
ScalarField hjb_residual(const ScalarField& m, const ScalarField& u, const ScalarField& V,
                         const Coupling& coupling);
// Pointwise residual of m_t - div(m Du) at interior nodes, with m averaged
// onto faces.
ScalarField fp_residual(const ScalarField& m, const ScalarField& u);

// All inputs on the nodes of one grid. `m0`/`mT` may be empty.
PdeResiduals pde_residuals(const ScalarField& m, const ScalarField& u, const ScalarField& V,
                           const Coupling& coupling, std::span<const double> m0 = {},
                           std::span<const double> mT = {});

}  // namespace mfgplan
