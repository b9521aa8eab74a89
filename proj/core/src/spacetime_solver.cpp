#include "mfgplan/spacetime_solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <vector>

#include "mfgplan/error.hpp"
#include "mfgplan/operators.hpp"

namespace mfgplan {

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double sin_sq(double x) {
  const double s = std::sin(x);
  return s * s;
}

}  // namespace

struct SpacetimeSolver::Impl {
  TorusGrid grid;
  TimeLayout layout;
  SpacetimeOperator op;
  int slices;
  std::vector<double> buffer;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  double normalization = 1.0;
  std::vector<double> time_symbol;
  std::vector<double> x_symbol;
  std::vector<double> y_symbol;

  Impl(const TorusGrid& g, TimeLayout l, SpacetimeOperator o)
      : grid(g), layout(l), op(o), slices(g.slices(l)), buffer(static_cast<std::size_t>(slices) * g.cells()) {
    const double pi = std::numbers::pi;
    time_symbol.resize(static_cast<std::size_t>(slices), 0.0);
    if (op == SpacetimeOperator::neumann_time_periodic_space) {
      for (int p = 0; p < slices; ++p) {
        time_symbol[static_cast<std::size_t>(p)] =
            -4.0 * sin_sq(pi * p / (2.0 * slices)) / (grid.dt() * grid.dt());
      }
    }
    x_symbol.resize(static_cast<std::size_t>(grid.nx()));
    for (int k = 0; k < grid.nx(); ++k) {
      x_symbol[static_cast<std::size_t>(k)] = -4.0 * sin_sq(pi * k / grid.nx()) / (grid.dx() * grid.dx());
    }
    y_symbol.assign(static_cast<std::size_t>(grid.ny()), 0.0);
    if (grid.dim() == 2) {
      for (int k = 0; k < grid.ny(); ++k) {
        y_symbol[static_cast<std::size_t>(k)] = -4.0 * sin_sq(pi * k / grid.ny()) / (grid.dy() * grid.dy());
      }
    }

    std::lock_guard lock(planner_mutex());
    double* data = buffer.data();
    if (op == SpacetimeOperator::neumann_time_periodic_space) {
      std::vector<int> n{slices, grid.nx()};
      std::vector<fftw_r2r_kind> fwd{FFTW_REDFT10, FFTW_R2HC};
      std::vector<fftw_r2r_kind> bwd{FFTW_REDFT01, FFTW_HC2R};
      if (grid.dim() == 2) {
        n.push_back(grid.ny());
        fwd.push_back(FFTW_R2HC);
        bwd.push_back(FFTW_HC2R);
      }
      const int rank = static_cast<int>(n.size());
      forward = fftw_plan_r2r(rank, n.data(), data, data, fwd.data(), FFTW_ESTIMATE);
      backward = fftw_plan_r2r(rank, n.data(), data, data, bwd.data(), FFTW_ESTIMATE);
      normalization = 2.0 * slices * static_cast<double>(grid.cells());
    } else {
      std::vector<int> n{grid.nx()};
      std::vector<fftw_r2r_kind> fwd{FFTW_R2HC};
      std::vector<fftw_r2r_kind> bwd{FFTW_HC2R};
      if (grid.dim() == 2) {
        n.push_back(grid.ny());
        fwd.push_back(FFTW_R2HC);
        bwd.push_back(FFTW_HC2R);
      }
      const int rank = static_cast<int>(n.size());
      const int dist = static_cast<int>(grid.cells());
      forward = fftw_plan_many_r2r(rank, n.data(), slices, data, nullptr, 1, dist, data, nullptr, 1, dist,
                                   fwd.data(), FFTW_ESTIMATE);
      backward = fftw_plan_many_r2r(rank, n.data(), slices, data, nullptr, 1, dist, data, nullptr, 1, dist,
                                    bwd.data(), FFTW_ESTIMATE);
      normalization = static_cast<double>(grid.cells());
    }
    if (forward == nullptr || backward == nullptr) throw Error("FFTW failed to create a transform plan");
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }

  double eigenvalue(int p, int kx, int ky) const {
    return time_symbol[static_cast<std::size_t>(p)] + x_symbol[static_cast<std::size_t>(kx)] +
           y_symbol[static_cast<std::size_t>(ky)];
  }

  ScalarField solve(const ScalarField& rhs) {
    if (!(rhs.grid() == grid) || rhs.layout() != layout) {
      throw Error("spacetime_solve: right-hand side does not match the solver's grid");
    }
    const auto src = rhs.values();
    std::copy(src.begin(), src.end(), buffer.begin());
    fftw_execute(forward);
    const int nx = grid.nx();
    const int ny = grid.ny();
    std::size_t idx = 0;
    for (int p = 0; p < slices; ++p) {
      for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j, ++idx) {
          const double lambda = eigenvalue(p, i, j);
          // Zero eigenvalue <=> kernel mode; its coefficient is set to zero.
          buffer[idx] = lambda == 0.0 ? 0.0 : buffer[idx] / (lambda * normalization);
        }
      }
    }
    fftw_execute(backward);
    ScalarField out(grid, layout);
    std::copy(buffer.begin(), buffer.end(), out.values().begin());
    return out;
  }
};

SpacetimeSolver::SpacetimeSolver(const TorusGrid& grid, TimeLayout layout, SpacetimeOperator op)
    : impl_(std::make_unique<Impl>(grid, layout, op)) {}

SpacetimeSolver::~SpacetimeSolver() = default;
SpacetimeSolver::SpacetimeSolver(SpacetimeSolver&&) noexcept = default;
SpacetimeSolver& SpacetimeSolver::operator=(SpacetimeSolver&&) noexcept = default;

double SpacetimeSolver::eigenvalue(int p, int kx, int ky) const { return impl_->eigenvalue(p, kx, ky); }

ScalarField SpacetimeSolver::solve(const ScalarField& rhs) {
  const double defect = kernel_defect(rhs, impl_->op);
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "spacetime_solve: incompatible right-hand side, its component along the operator kernel "
           "(constants) is "
        << defect << " of its norm (limit 1e-10)";
    throw Error(msg.str());
  }
  return impl_->solve(rhs);
}

ScalarField SpacetimeSolver::solve_projected(const ScalarField& rhs) { return impl_->solve(rhs); }

ScalarField SpacetimeSolver::apply(const ScalarField& phi) const {
  ScalarField out = laplacian(phi);
  if (impl_->op == SpacetimeOperator::periodic_space) return out;
  const int s = phi.slices();
  const double inv_dt2 = 1.0 / (phi.grid().dt() * phi.grid().dt());
  for (int k = 0; k < s; ++k) {
    const auto cur = phi.slice(k);
    const auto prev = phi.slice(k == 0 ? 0 : k - 1);
    const auto next = phi.slice(k == s - 1 ? s - 1 : k + 1);
    auto dst = out.slice(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += (next[c] - 2.0 * cur[c] + prev[c]) * inv_dt2;
  }
  return out;
}

ScalarField spacetime_solve(const ScalarField& rhs, SpacetimeOperator op) {
  SpacetimeSolver solver(rhs.grid(), rhs.layout(), op);
  return solver.solve(rhs);
}

double kernel_defect(const ScalarField& rhs, SpacetimeOperator op) {
  const auto v = rhs.values();
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq == 0.0) return 0.0;
  const double cells = static_cast<double>(rhs.grid().cells());
  double kernel_sq = 0.0;
  if (op == SpacetimeOperator::neumann_time_periodic_space) {
    double sum = 0.0;
    for (double x : v) sum += x;
    kernel_sq = sum * sum / static_cast<double>(v.size());
  } else {
    for (int k = 0; k < rhs.slices(); ++k) {
      double sum = 0.0;
      for (double x : rhs.slice(k)) sum += x;
      kernel_sq += sum * sum / cells;
    }
  }
  return std::sqrt(kernel_sq / norm_sq);
}

}  // namespace mfgplan
