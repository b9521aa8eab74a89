#include "mfgplan/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfgplan/error.hpp"

namespace mfgplan {

TorusGrid TorusGrid::make(int dim, int nx, int ny, int nt, double horizon) {
  if (dim != 1 && dim != 2) throw Error("grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (nx < 2) throw Error("nx too small: need at least 2 cells, got " + std::to_string(nx));
  if (dim == 2 && ny < 2) throw Error("ny too small: need at least 2 cells, got " + std::to_string(ny));
  if (nt < 2) throw Error("nt too small: need at least 2 time intervals, got " + std::to_string(nt));
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error("horizon T must be positive and finite");
  return TorusGrid(dim, nx, dim == 1 ? 1 : ny, nt, horizon);
}

TorusGrid::TorusGrid(int dim, int nx, int ny, int nt, double horizon)
    : dim_(dim),
      nx_(nx),
      ny_(ny),
      nt_(nt),
      horizon_(horizon),
      dx_(1.0 / nx),
      dy_(1.0 / ny),
      dt_(horizon / nt) {}

std::size_t TorusGrid::neighbour(std::size_t cell, int axis, int offset) const {
  const auto n = static_cast<long>(extent(axis));
  const auto stride_ = static_cast<long>(stride(axis));
  const long coord = (static_cast<long>(cell) / stride_) % n;
  long shifted = (coord + offset) % n;
  if (shifted < 0) shifted += n;
  return static_cast<std::size_t>(static_cast<long>(cell) + (shifted - coord) * stride_);
}

ScalarField::ScalarField(const TorusGrid& grid, TimeLayout layout, double fill)
    : grid_(grid),
      layout_(layout),
      values_(static_cast<std::size_t>(grid.slices(layout)) * grid.cells(), fill) {}

std::span<double> ScalarField::slice(int k) {
  return std::span<double>(values_).subspan(offset(k), grid_.cells());
}

std::span<const double> ScalarField::slice(int k) const {
  return std::span<const double>(values_).subspan(offset(k), grid_.cells());
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

VectorField::VectorField(const TorusGrid& grid, TimeLayout layout, double fill) {
  components_.reserve(static_cast<std::size_t>(grid.dim()));
  for (int a = 0; a < grid.dim(); ++a) components_.emplace_back(grid, layout, fill);
}

}  // namespace mfgplan
