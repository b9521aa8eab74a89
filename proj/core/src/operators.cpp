#include "mfgplan/operators.hpp"

#include <string>

#include "mfgplan/error.hpp"

namespace mfgplan {

namespace {

// Forward difference along `axis` of one slice.
void forward_difference(std::span<const double> f, std::span<double> out, const TorusGrid& grid, int axis) {
  const double inv_h = 1.0 / grid.spacing(axis);
  for (std::size_t c = 0; c < f.size(); ++c) out[c] = (f[grid.neighbour(c, axis, 1)] - f[c]) * inv_h;
}

}  // namespace

void require_compatible(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid())) throw Error(std::string(what) + ": fields live on different grids");
  if (a.layout() != b.layout()) throw Error(std::string(what) + ": fields use different time layouts");
}

VectorField gradient(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  VectorField out(grid, f.layout());
  for (int a = 0; a < grid.dim(); ++a) {
    for (int k = 0; k < f.slices(); ++k) forward_difference(f.slice(k), out[a].slice(k), grid, a);
  }
  return out;
}

ScalarField divergence(const VectorField& w) {
  const TorusGrid& grid = w.grid();
  ScalarField out(grid, w.layout());
  for (int k = 0; k < w.slices(); ++k) {
    auto dst = out.slice(k);
    for (int a = 0; a < grid.dim(); ++a) {
      const auto src = w[a].slice(k);
      const double inv_h = 1.0 / grid.spacing(a);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += (src[c] - src[grid.neighbour(c, a, -1)]) * inv_h;
    }
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) { return divergence(gradient(f)); }

ScalarField gradient_norm_sq(const ScalarField& f) {
  const TorusGrid& grid = f.grid();
  ScalarField out(grid, f.layout());
  const VectorField g = gradient(f);
  for (int k = 0; k < f.slices(); ++k) {
    auto dst = out.slice(k);
    for (int a = 0; a < grid.dim(); ++a) {
      const auto fwd = g[a].slice(k);
      for (std::size_t c = 0; c < dst.size(); ++c) {
        const double back = fwd[grid.neighbour(c, a, -1)];
        dst[c] += 0.5 * (fwd[c] * fwd[c] + back * back);
      }
    }
  }
  return out;
}

double integrate(std::span<const double> slice, const TorusGrid& grid) {
  double sum = 0.0;
  for (double v : slice) sum += v;
  return sum * grid.cell_volume();
}

double integrate(const ScalarField& f, int k) {
  if (k < 0 || k >= f.slices()) throw Error("integrate: slice index " + std::to_string(k) + " out of range");
  return integrate(f.slice(k), f.grid());
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_compatible(a, b, "inner");
  const auto x = a.values();
  const auto y = b.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
  double sum = 0.0;
  for (int c = 0; c < a.components(); ++c) sum += inner(a[c], b[c]);
  return sum;
}

}  // namespace mfgplan
