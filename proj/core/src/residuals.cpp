#include "mfgplan/residuals.hpp"

#include <algorithm>
#include <cmath>

#include "mfgplan/error.hpp"
#include "mfgplan/operators.hpp"

namespace mfgplan {

namespace {

void require_nodes(const ScalarField& f, const char* what) {
  if (f.layout() != TimeLayout::nodes) throw Error(std::string(what) + " must be sampled on time nodes");
}

double interior_l2(const ScalarField& r) {
  const TorusGrid& grid = r.grid();
  double sum = 0.0;
  for (int k = 1; k < grid.nt(); ++k) {
    for (double v : r.slice(k)) sum += v * v;
  }
  return std::sqrt(sum * grid.cell_volume() * grid.dt());
}

}  // namespace

ScalarField hjb_residual(const ScalarField& m, const ScalarField& u, const ScalarField& V, const Coupling& coupling) {
  require_nodes(m, "m");
  require_compatible(m, u, "hjb_residual");
  require_compatible(m, V, "hjb_residual");
  const TorusGrid& grid = m.grid();
  const ScalarField du2 = gradient_norm_sq(u);
  ScalarField r(grid);
  const double inv_2dt = 1.0 / (2.0 * grid.dt());
  for (int k = 1; k < grid.nt(); ++k) {
    const auto next = u.slice(k + 1);
    const auto prev = u.slice(k - 1);
    const auto grad = du2.slice(k);
    const auto pot = V.slice(k);
    const auto dens = m.slice(k);
    auto dst = r.slice(k);
    for (std::size_t c = 0; c < dst.size(); ++c) {
      dst[c] = -(next[c] - prev[c]) * inv_2dt + 0.5 * grad[c] + pot[c] - coupling.g(std::max(dens[c], 0.0));
    }
  }
  return r;
}

ScalarField fp_residual(const ScalarField& m, const ScalarField& u) {
  require_nodes(m, "m");
  require_compatible(m, u, "fp_residual");
  const TorusGrid& grid = m.grid();
  VectorField flux = gradient(u);
  for (int a = 0; a < grid.dim(); ++a) {
    for (int k = 0; k < m.slices(); ++k) {
      const auto dens = m.slice(k);
      auto f = flux[a].slice(k);
      for (std::size_t c = 0; c < f.size(); ++c) f[c] *= 0.5 * (dens[c] + dens[grid.neighbour(c, a, 1)]);
    }
  }
  const ScalarField div = divergence(flux);
  ScalarField r(grid);
  const double inv_2dt = 1.0 / (2.0 * grid.dt());
  for (int k = 1; k < grid.nt(); ++k) {
    const auto next = m.slice(k + 1);
    const auto prev = m.slice(k - 1);
    const auto d = div.slice(k);
    auto dst = r.slice(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = (next[c] - prev[c]) * inv_2dt - d[c];
  }
  return r;
}

PdeResiduals pde_residuals(const ScalarField& m, const ScalarField& u, const ScalarField& V,
                           const Coupling& coupling, std::span<const double> m0, std::span<const double> mT) {
  PdeResiduals out;
  out.hjb_l2 = interior_l2(hjb_residual(m, u, V, coupling));
  out.fp_l2 = interior_l2(fp_residual(m, u));
  const TorusGrid& grid = m.grid();
  auto deviation = [](std::span<const double> a, std::span<const double> b) {
    double sup = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) sup = std::max(sup, std::abs(a[c] - b[c]));
    return sup;
  };
  if (!m0.empty()) {
    if (m0.size() != grid.cells()) throw Error("pde_residuals: m0 size does not match the grid");
    out.bc_linf = std::max(out.bc_linf, deviation(m.slice(0), m0));
  }
  if (!mT.empty()) {
    if (mT.size() != grid.cells()) throw Error("pde_residuals: mT size does not match the grid");
    out.bc_linf = std::max(out.bc_linf, deviation(m.slice(grid.nt()), mT));
  }
  return out;
}

}  // namespace mfgplan
