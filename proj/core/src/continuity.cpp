#include "mfgplan/continuity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfgplan/error.hpp"
#include "mfgplan/operators.hpp"

namespace mfgplan {

namespace {

void require_pair(const ScalarField& m, const VectorField& w) {
  if (m.layout() != TimeLayout::nodes) throw Error("continuity: density must be sampled on time nodes");
  if (w.layout() != TimeLayout::intervals) throw Error("continuity: momentum must be sampled on time intervals");
  if (!(m.grid() == w.grid())) throw Error("continuity: density and momentum live on different grids");
}

}  // namespace

ScalarField continuity_defect(const ScalarField& m, const VectorField& w) {
  require_pair(m, w);
  const TorusGrid& grid = m.grid();
  ScalarField r = divergence(w);
  const double inv_dt = 1.0 / grid.dt();
  for (int k = 0; k < grid.nt(); ++k) {
    const auto next = m.slice(k + 1);
    const auto prev = m.slice(k);
    auto dst = r.slice(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += (next[c] - prev[c]) * inv_dt;
  }
  return r;
}

double continuity_residual(const ScalarField& m, const VectorField& w) {
  const ScalarField r = continuity_defect(m, w);
  double sup = 0.0;
  for (double v : r.values()) sup = std::max(sup, std::abs(v));
  return sup;
}

ContinuityProjector::ContinuityProjector(const TorusGrid& grid, std::vector<double> m0, std::vector<double> mT)
    : grid_(grid),
      m0_(std::move(m0)),
      mT_(std::move(mT)),
      solver_(grid, TimeLayout::intervals, SpacetimeOperator::neumann_time_periodic_space) {
  if (m0_.size() != grid.cells() || mT_.size() != grid.cells()) {
    throw Error("continuity_project: end densities do not match the grid");
  }
  const double mass0 = integrate(m0_, grid);
  const double massT = integrate(mT_, grid);
  if (std::abs(mass0 - massT) > 1e-10) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "continuity_project: incompatible masses " << mass0 << " and " << massT;
    throw Error(msg.str());
  }
}

void ContinuityProjector::project(ScalarField& m, VectorField& w) {
  require_pair(m, w);
  if (!(m.grid() == grid_)) throw Error("continuity_project: fields live on a different grid");
  std::copy(m0_.begin(), m0_.end(), m.slice(0).begin());
  std::copy(mT_.begin(), mT_.end(), m.slice(grid_.nt()).begin());

  ScalarField rhs = continuity_defect(m, w);
  for (double& v : rhs.values()) v = -v;
  // The residual sums to the mass difference of the end slices, which the
  // constructor bounded; its rounding-level mean is discarded by the solve.
  const ScalarField mu = solver_.solve_projected(rhs);

  const double inv_dt = 1.0 / grid_.dt();
  for (int k = 1; k < grid_.nt(); ++k) {
    const auto before = mu.slice(k - 1);
    const auto after = mu.slice(k);
    auto dst = m.slice(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] -= (before[c] - after[c]) * inv_dt;
  }
  const VectorField dmu = gradient(mu);
  for (int a = 0; a < grid_.dim(); ++a) {
    auto dst = w[a].values();
    const auto src = dmu[a].values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

std::pair<ScalarField, VectorField> continuity_project(const ScalarField& m, const VectorField& w,
                                                       std::span<const double> m0, std::span<const double> mT) {
  ContinuityProjector projector(m.grid(), std::vector<double>(m0.begin(), m0.end()),
                                std::vector<double>(mT.begin(), mT.end()));
  ScalarField m_out = m;
  VectorField w_out = w;
  projector.project(m_out, w_out);
  return {std::move(m_out), std::move(w_out)};
}

}  // namespace mfgplan
