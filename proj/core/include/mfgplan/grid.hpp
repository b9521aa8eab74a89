#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mfgplan {

// Which time instants a field is sampled at. Nodes are t_k = k*dt for
// k = 0..nt; intervals are the midpoints t_{k+1/2} for k = 0..nt-1.
enum class TimeLayout { nodes, intervals };

// Uniform periodic discretization of [0,T] x T^d, d in {1,2}.
//
// Spatial samples sit at cell centres x_i = (i + 1/2) dx. Cells are indexed
// row-major with y fastest. For d = 1 the y extent is 1.
class TorusGrid {
 public:
  static TorusGrid make(int dim, int nx, int ny, int nt, double horizon);
  static TorusGrid make_1d(int nx, int nt, double horizon) { return make(1, nx, 1, nt, horizon); }
  static TorusGrid make_2d(int nx, int ny, int nt, double horizon) {
    return make(2, nx, ny, nt, horizon);
  }

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nt() const { return nt_; }
  double horizon() const { return horizon_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double dt() const { return dt_; }

  // Cells along spatial axis 0 (x) or 1 (y).
  int extent(int axis) const { return axis == 0 ? nx_ : ny_; }
  double spacing(int axis) const { return axis == 0 ? dx_ : dy_; }
  // Distance in the flat cell index between neighbours along `axis`.
  std::size_t stride(int axis) const { return axis == 0 ? static_cast<std::size_t>(ny_) : 1; }

  std::size_t cells() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  double cell_volume() const { return dim_ == 1 ? dx_ : dx_ * dy_; }
  int slices(TimeLayout layout) const { return layout == TimeLayout::nodes ? nt_ + 1 : nt_; }

  double x(int i) const { return (i + 0.5) * dx_; }
  double y(int j) const { return (j + 0.5) * dy_; }
  double time(int k, TimeLayout layout) const {
    return layout == TimeLayout::nodes ? k * dt_ : (k + 0.5) * dt_;
  }

  std::size_t cell_index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j);
  }
  // Flat index of the periodic neighbour of `cell` shifted by `offset` along `axis`.
  std::size_t neighbour(std::size_t cell, int axis, int offset) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  TorusGrid(int dim, int nx, int ny, int nt, double horizon);

  int dim_;
  int nx_;
  int ny_;
  int nt_;
  double horizon_;
  double dx_;
  double dy_;
  double dt_;
};

// Real samples of one scalar quantity on every cell of every time slice,
// stored row-major over (t, x[, y]).
class ScalarField {
 public:
  explicit ScalarField(const TorusGrid& grid, TimeLayout layout = TimeLayout::nodes, double fill = 0.0);

  const TorusGrid& grid() const { return grid_; }
  TimeLayout layout() const { return layout_; }
  int slices() const { return grid_.slices(layout_); }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> slice(int k);
  std::span<const double> slice(int k) const;

  double& operator()(int k, std::size_t cell) { return values_[offset(k) + cell]; }
  double operator()(int k, std::size_t cell) const { return values_[offset(k) + cell]; }

  // Blow-up diagnostics (e.g. a potential sampled at a singularity) may hold
  // non-finite entries; every other field is expected to be finite.
  bool blow_up_diagnostic() const { return blow_up_; }
  void set_blow_up_diagnostic(bool flag) { blow_up_ = flag; }
  bool all_finite() const;

 private:
  std::size_t offset(int k) const { return static_cast<std::size_t>(k) * grid_.cells(); }

  TorusGrid grid_;
  TimeLayout layout_;
  std::vector<double> values_;
  bool blow_up_ = false;
};

// One ScalarField per spatial axis. Component a is located on the cell faces
// normal to axis a, i.e. at x + dx_a/2 from the cell centre it is stored with.
class VectorField {
 public:
  explicit VectorField(const TorusGrid& grid, TimeLayout layout = TimeLayout::nodes, double fill = 0.0);

  const TorusGrid& grid() const { return components_.front().grid(); }
  TimeLayout layout() const { return components_.front().layout(); }
  int slices() const { return components_.front().slices(); }
  int components() const { return static_cast<int>(components_.size()); }

  ScalarField& operator[](int axis) { return components_[static_cast<std::size_t>(axis)]; }
  const ScalarField& operator[](int axis) const { return components_[static_cast<std::size_t>(axis)]; }

 private:
  std::vector<ScalarField> components_;
};

}  // namespace mfgplan
