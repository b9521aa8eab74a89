#include "mfgplan/planning_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfgplan/continuity.hpp"
#include "mfgplan/error.hpp"
#include "mfgplan/operators.hpp"
#include "mfgplan/prox.hpp"
#include "mfgplan/spacetime_solver.hpp"

namespace mfgplan {

namespace {

// Symmetric tridiagonal system with constant off-diagonal, factored once and
// applied to many right-hand sides laid out with a fixed stride.
class TridiagonalSolver {
 public:
  TridiagonalSolver(std::vector<double> diag, double off) : off_(off), inv_pivot_(diag.size()), upper_(diag.size()) {
    double pivot = diag[0];
    inv_pivot_[0] = 1.0 / pivot;
    for (std::size_t i = 1; i < diag.size(); ++i) {
      upper_[i - 1] = off_ * inv_pivot_[i - 1];
      pivot = diag[i] - off_ * upper_[i - 1];
      inv_pivot_[i] = 1.0 / pivot;
    }
  }

  void solve(double* x, std::size_t stride) const {
    const std::size_t n = inv_pivot_.size();
    x[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) x[i * stride] = (x[i * stride] - off_ * x[(i - 1) * stride]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i * stride] -= upper_[i] * x[(i + 1) * stride];
  }

  std::size_t size() const { return inv_pivot_.size(); }

 private:
  double off_;
  std::vector<double> inv_pivot_;
  std::vector<double> upper_;
};

// Circulant tridiagonal system (diag, off) on a periodic line, by
// Sherman-Morrison on top of the open tridiagonal factorization.
class CyclicSolver {
 public:
  CyclicSolver(int n, double diag, double off) : n_(n), diag_(diag), off_(off), open_(open_diag(n, diag, off), off) {
    if (n_ > 2) {
      correction_.assign(static_cast<std::size_t>(n_), 0.0);
      correction_[0] = gamma();
      correction_[static_cast<std::size_t>(n_ - 1)] = off_;
      open_.solve(correction_.data(), 1);
      factor_ = 1.0 + correction_[0] + off_ / gamma() * correction_[static_cast<std::size_t>(n_ - 1)];
    }
  }

  void solve(double* x, std::size_t stride) const {
    if (n_ == 2) {
      // Both neighbours of a cell coincide: [[d, 2o], [2o, d]].
      const double a = x[0];
      const double b = x[stride];
      const double det = diag_ * diag_ - 4.0 * off_ * off_;
      x[0] = (diag_ * a - 2.0 * off_ * b) / det;
      x[stride] = (diag_ * b - 2.0 * off_ * a) / det;
      return;
    }
    open_.solve(x, stride);
    const double dot = x[0] + off_ / gamma() * x[static_cast<std::size_t>(n_ - 1) * stride];
    const double scale = dot / factor_;
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i) * stride] -= scale * correction_[static_cast<std::size_t>(i)];
  }

 private:
  double gamma() const { return -diag_; }

  static std::vector<double> open_diag(int n, double diag, double off) {
    std::vector<double> d(static_cast<std::size_t>(n), diag);
    if (n > 2) {
      d.front() = diag + diag;
      d.back() = diag + off * off / diag;
    }
    return d;
  }

  int n_;
  double diag_;
  double off_;
  TridiagonalSolver open_;
  std::vector<double> correction_;
  double factor_ = 1.0;
};

// Splitting variable: the staggered pair plus two cell-centred copies at time
// midpoints, one for the kinetic term and one for the coupling term.
struct State {
  ScalarField m;
  VectorField w;
  ScalarField mk;
  VectorField wk;
  ScalarField mc;

  explicit State(const TorusGrid& grid)
      : m(grid), w(grid, TimeLayout::intervals), mk(grid, TimeLayout::intervals), wk(grid, TimeLayout::intervals),
        mc(grid, TimeLayout::intervals) {}

  template <typename F>
  void for_each_array(State& other, F&& f) {
    f(m.values(), other.m.values());
    for (int a = 0; a < w.components(); ++a) f(w[a].values(), other.w[a].values());
    f(mk.values(), other.mk.values());
    for (int a = 0; a < wk.components(); ++a) f(wk[a].values(), other.wk[a].values());
    f(mc.values(), other.mc.values());
  }
};

void interpolate_time(const ScalarField& m, ScalarField& out) {
  const TorusGrid& grid = m.grid();
  for (int k = 0; k < grid.nt(); ++k) {
    const auto a = m.slice(k);
    const auto b = m.slice(k + 1);
    auto dst = out.slice(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = 0.5 * (a[c] + b[c]);
  }
}

// Adjoint of interpolate_time, accumulated into `out`.
void interpolate_time_adjoint_add(const ScalarField& v, ScalarField& out) {
  const TorusGrid& grid = v.grid();
  for (int k = 0; k < grid.nt(); ++k) {
    const auto src = v.slice(k);
    auto lo = out.slice(k);
    auto hi = out.slice(k + 1);
    for (std::size_t c = 0; c < src.size(); ++c) {
      lo[c] += 0.5 * src[c];
      hi[c] += 0.5 * src[c];
    }
  }
}

// Face component a to cell centres: mean of the two faces normal to axis a.
void interpolate_space(const VectorField& w, VectorField& out) {
  const TorusGrid& grid = w.grid();
  for (int a = 0; a < grid.dim(); ++a) {
    for (int k = 0; k < w.slices(); ++k) {
      const auto src = w[a].slice(k);
      auto dst = out[a].slice(k);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = 0.5 * (src[grid.neighbour(c, a, -1)] + src[c]);
    }
  }
}

void interpolate_space_adjoint_add(const VectorField& v, VectorField& out) {
  const TorusGrid& grid = v.grid();
  for (int a = 0; a < grid.dim(); ++a) {
    for (int k = 0; k < v.slices(); ++k) {
      const auto src = v[a].slice(k);
      auto dst = out[a].slice(k);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += 0.5 * (src[c] + src[grid.neighbour(c, a, 1)]);
    }
  }
}

ScalarField potential_at_midpoints(const ScalarField& V) {
  ScalarField out(V.grid(), TimeLayout::intervals);
  interpolate_time(V, out);
  return out;
}

class Splitting {
 public:
  Splitting(const PlanningProblem& problem, const SolverConfig& config)
      : problem_(problem),
        grid_(problem.grid()),
        step_(config.step),
        projector_(grid_, problem.m0(), problem.mT()),
        time_solver_(time_diag(grid_.nt()), 0.5),
        vc_(potential_at_midpoints(problem.potential_samples())) {
    for (int a = 0; a < grid_.dim(); ++a) space_solvers_.emplace_back(grid_.extent(a), 1.5, 0.25);
  }

  // x = prox of the separable part at z.
  void prox_f(const State& z, State& x) {
    x.m = z.m;
    x.w = z.w;
    projector_.project(x.m, x.w);
    const Coupling& coupling = problem_.coupling();
    const std::size_t n = z.mk.size();
    const auto mk = z.mk.values();
    const auto mc = z.mc.values();
    const auto vc = vc_.values();
    const bool two_d = grid_.dim() == 2;
    for (std::size_t i = 0; i < n; ++i) {
      const std::array<double, 2> wt{z.wk[0].values()[i], two_d ? z.wk[1].values()[i] : 0.0};
      const KineticProxResult kin = kinetic_prox(mk[i], wt, step_);
      x.mk.values()[i] = kin.m;
      x.wk[0].values()[i] = kin.w[0];
      if (two_d) x.wk[1].values()[i] = kin.w[1];
      x.mc.values()[i] = coupling_prox(mc[i], step_, coupling, vc[i]);
    }
  }

  // y = orthogonal projection of r onto the interpolation constraints
  // mk = I_t m, wk = I_x w, mc = I_t m.
  void project_g(const State& r, State& y) {
    y.m = r.m;
    ScalarField sum = r.mk;
    {
      auto dst = sum.values();
      const auto src = r.mc.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    interpolate_time_adjoint_add(sum, y.m);
    const std::size_t cells = grid_.cells();
    for (std::size_t c = 0; c < cells; ++c) time_solver_.solve(y.m.values().data() + c, cells);

    y.w = r.w;
    interpolate_space_adjoint_add(r.wk, y.w);
    for (int a = 0; a < grid_.dim(); ++a) solve_lines(y.w[a], a);

    interpolate_time(y.m, y.mk);
    interpolate_space(y.w, y.wk);
    y.mc = y.mk;
  }

  double energy(const State& x) const {
    const Coupling& coupling = problem_.coupling();
    const std::size_t n = x.mk.size();
    const auto mk = x.mk.values();
    const auto mc = x.mc.values();
    const auto vc = vc_.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double w2 = 0.0;
      for (int a = 0; a < grid_.dim(); ++a) w2 += x.wk[a].values()[i] * x.wk[a].values()[i];
      if (mk[i] > 0.0) sum += 0.5 * w2 / mk[i];
      sum += coupling.G(mc[i]) - vc[i] * mc[i];
    }
    return sum * grid_.cell_volume() * grid_.dt();
  }

 private:
  static std::vector<double> time_diag(int nt) {
    std::vector<double> d(static_cast<std::size_t>(nt) + 1, 2.0);
    d.front() = 1.5;
    d.back() = 1.5;
    return d;
  }

  void solve_lines(ScalarField& f, int axis) {
    const std::size_t stride = grid_.stride(axis);
    const CyclicSolver& solver = space_solvers_[static_cast<std::size_t>(axis)];
    for (int k = 0; k < f.slices(); ++k) {
      double* base = f.slice(k).data();
      if (axis == 0) {
        for (int j = 0; j < grid_.ny(); ++j) solver.solve(base + j, stride);
      } else {
        for (int i = 0; i < grid_.nx(); ++i) solver.solve(base + grid_.cell_index(i, 0), stride);
      }
    }
  }

  const PlanningProblem& problem_;
  TorusGrid grid_;
  double step_;
  ContinuityProjector projector_;
  TridiagonalSolver time_solver_;
  std::vector<CyclicSolver> space_solvers_;
  ScalarField vc_;
};

double squared_norm(State& s) {
  double sum = 0.0;
  s.for_each_array(s, [&](std::span<double> a, std::span<double>) {
    for (double v : a) sum += v * v;
  });
  return sum;
}

}  // namespace

void validate_config(const SolverConfig& config) {
  if (!(config.step > 0.0) || !std::isfinite(config.step)) throw Error("solver.step must be positive");
  if (!(config.relaxation > 0.0 && config.relaxation < 2.0)) throw Error("solver.relaxation must lie in (0, 2)");
  if (config.max_iters < 1) throw Error("solver.max_iters must be at least 1");
  if (!(config.tolerance > 0.0)) throw Error("solver.tolerance must be positive");
  if (config.init == InitMode::warm_start && (!config.warm_m || !config.warm_w)) {
    throw Error("solver.init = warm requires both a warm density and a warm momentum");
  }
}

double discrete_energy(const ScalarField& m, const VectorField& w, const PlanningProblem& problem) {
  const TorusGrid& grid = problem.grid();
  if (!(m.grid() == grid) || !(w.grid() == grid)) throw Error("discrete_energy: fields live on a different grid");
  ScalarField mbar(grid, TimeLayout::intervals);
  interpolate_time(m, mbar);
  VectorField wbar(grid, TimeLayout::intervals);
  interpolate_space(w, wbar);
  const ScalarField vc = potential_at_midpoints(problem.potential_samples());
  const Coupling& coupling = problem.coupling();
  double sum = 0.0;
  for (std::size_t i = 0; i < mbar.size(); ++i) {
    double w2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) w2 += wbar[a].values()[i] * wbar[a].values()[i];
    double rho = mbar.values()[i];
    if (rho < -1e-12) return std::numeric_limits<double>::infinity();
    rho = std::max(rho, 0.0);
    if (rho > 0.0) {
      sum += 0.5 * w2 / rho;
    } else if (w2 > 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    sum += coupling.G(rho) - vc.values()[i] * rho;
  }
  return sum * grid.cell_volume() * grid.dt();
}

PlanningSolution solve_planning(const PlanningProblem& problem, const SolverConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  const TorusGrid& grid = problem.grid();
  if (!problem.potential_samples().all_finite()) throw Error("solve: the potential is not finite on this grid");

  Splitting splitting(problem, config);
  State z(grid);
  if (config.init == InitMode::warm_start) {
    if (!(config.warm_m->grid() == grid) || config.warm_m->layout() != TimeLayout::nodes) {
      throw Error("solve: warm density does not match the grid");
    }
    if (!(config.warm_w->grid() == grid) || config.warm_w->layout() != TimeLayout::intervals) {
      throw Error("solve: warm momentum does not match the grid");
    }
    z.m = *config.warm_m;
    z.w = *config.warm_w;
  } else {
    for (int k = 0; k <= grid.nt(); ++k) {
      const double s = static_cast<double>(k) / grid.nt();
      auto dst = z.m.slice(k);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = (1.0 - s) * problem.m0()[c] + s * problem.mT()[c];
    }
  }
  interpolate_time(z.m, z.mk);
  interpolate_space(z.w, z.wk);
  z.mc = z.mk;

  State x(grid);
  State r(grid);
  State y(grid);
  SolveReport report;
  const double lambda = config.relaxation;
  for (int it = 0; it < config.max_iters; ++it) {
    splitting.prox_f(z, x);
    r.for_each_array(x, [](std::span<double> dst, std::span<double> xs) {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = xs[i];
    });
    r.for_each_array(z, [](std::span<double> dst, std::span<double> zs) {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = 2.0 * dst[i] - zs[i];
    });
    splitting.project_g(r, y);

    const double z_norm = std::sqrt(squared_norm(z));
    double step_sq = 0.0;
    // z += lambda (y - x), with y - x gathered through r as scratch.
    r.for_each_array(y, [](std::span<double> dst, std::span<double> ys) {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = ys[i];
    });
    r.for_each_array(x, [&](std::span<double> dst, std::span<double> xs) {
      for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = lambda * (dst[i] - xs[i]);
        step_sq += dst[i] * dst[i];
      }
    });
    z.for_each_array(r, [](std::span<double> dst, std::span<double> d) {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += d[i];
    });

    const double residual = std::sqrt(step_sq) / std::max(1.0, z_norm);
    report.residual_history.push_back(residual);
    report.energy_history.push_back(splitting.energy(x));
    report.iterations = it + 1;
    if (!std::isfinite(residual)) {
      report.note = "fixed-point residual became non-finite";
      break;
    }
    if (residual <= config.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged && report.note.empty()) {
    std::ostringstream msg;
    msg << "no convergence within " << config.max_iters << " iterations";
    report.note = msg.str();
  }

  PlanningSolution out{std::move(x.m), std::move(x.w), ScalarField(grid), {}};
  report.continuity_residual = continuity_residual(out.m, out.w);
  report.min_density = *std::min_element(out.m.values().begin(), out.m.values().end());
  for (int k = 0; k <= grid.nt(); ++k) {
    report.mass_error = std::max(report.mass_error, std::abs(integrate(out.m, k) - 1.0));
  }
  report.final_energy = discrete_energy(out.m, out.w, problem);
  try {
    ValueRecovery rec = recover_value_detailed(out.m, out.w, problem);
    out.u = std::move(rec.u);
    report.masked_fraction = rec.masked_fraction;
    report.value_recovered = true;
    report.residuals = pde_residuals(out.m, out.u, problem.potential_samples(), problem.coupling(), problem.m0(),
                                     problem.mT());
  } catch (const Error& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.residuals = {nan, nan, nan};
    report.note += report.note.empty() ? e.what() : std::string("; ") + e.what();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.report = std::move(report);
  return out;
}

ValueRecovery recover_value_detailed(const ScalarField& m, const VectorField& w, const PlanningProblem& problem) {
  const TorusGrid& grid = problem.grid();
  if (!(m.grid() == grid) || m.layout() != TimeLayout::nodes) throw Error("recover_value: density does not match the grid");
  if (!(w.grid() == grid) || w.layout() != TimeLayout::intervals) {
    throw Error("recover_value: momentum does not match the grid");
  }
  const int nt = grid.nt();
  const std::size_t cells = grid.cells();

  // Du = -w / m on faces and time midpoints, m averaged over the 4 surrounding nodes.
  VectorField du(grid, TimeLayout::intervals);
  double worst = 0.0;
  for (int k = 0; k < nt; ++k) {
    const auto lo = m.slice(k);
    const auto hi = m.slice(k + 1);
    std::size_t masked = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto src = w[a].slice(k);
      auto dst = du[a].slice(k);
      for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t n = grid.neighbour(c, a, 1);
        const double rho = 0.25 * (lo[c] + lo[n] + hi[c] + hi[n]);
        if (rho < kVacuumFloor) {
          ++masked;
          dst[c] = 0.0;
        } else {
          dst[c] = -src[c] / rho;
        }
      }
    }
    const double fraction = static_cast<double>(masked) / static_cast<double>(cells * grid.dim());
    worst = std::max(worst, fraction);
    if (fraction > 0.1) {
      std::ostringstream msg;
      msg << "recover_value: " << fraction * 100.0 << "% of the faces at t = " << grid.time(k, TimeLayout::intervals)
          << " have density below " << kVacuumFloor << "; the density is too close to vacuum to recover u";
      throw Error(msg.str());
    }
  }

  // Gradients on the nodes: midpoint average inside, linear extrapolation at the ends.
  VectorField g(grid);
  for (int a = 0; a < grid.dim(); ++a) {
    for (int k = 1; k < nt; ++k) {
      const auto before = du[a].slice(k - 1);
      const auto after = du[a].slice(k);
      auto dst = g[a].slice(k);
      for (std::size_t c = 0; c < cells; ++c) dst[c] = 0.5 * (before[c] + after[c]);
    }
    const auto first = du[a].slice(0);
    const auto second = du[a].slice(1);
    const auto last = du[a].slice(nt - 1);
    const auto penultimate = du[a].slice(nt - 2);
    auto start = g[a].slice(0);
    auto end = g[a].slice(nt);
    for (std::size_t c = 0; c < cells; ++c) {
      start[c] = 1.5 * first[c] - 0.5 * second[c];
      end[c] = 1.5 * last[c] - 0.5 * penultimate[c];
    }
  }

  SpacetimeSolver poisson(grid, TimeLayout::nodes, SpacetimeOperator::periodic_space);
  ScalarField u = poisson.solve_projected(divergence(g));

  const ScalarField du2 = gradient_norm_sq(u);
  const ScalarField& V = problem.potential_samples();
  const Coupling& coupling = problem.coupling();
  std::vector<double> hamiltonian_mean(static_cast<std::size_t>(nt) + 1, 0.0);
  for (int k = 0; k <= nt; ++k) {
    const auto grad = du2.slice(k);
    const auto pot = V.slice(k);
    const auto dens = m.slice(k);
    double sum = 0.0;
    for (std::size_t c = 0; c < cells; ++c) sum += 0.5 * grad[c] + pot[c] - coupling.g(std::max(dens[c], 0.0));
    hamiltonian_mean[static_cast<std::size_t>(k)] = sum * grid.cell_volume();
  }
  std::vector<double> constant(static_cast<std::size_t>(nt) + 1, 0.0);
  const double dt = grid.dt();
  constant[1] = 0.5 * dt * (hamiltonian_mean[0] + hamiltonian_mean[1]);
  for (int k = 1; k < nt; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    constant[kk + 1] = constant[kk - 1] + 2.0 * dt * hamiltonian_mean[kk];
  }
  for (int k = 0; k <= nt; ++k) {
    for (double& v : u.slice(k)) v += constant[static_cast<std::size_t>(k)];
  }
  return {std::move(u), worst};
}

ScalarField recover_value(const ScalarField& m, const VectorField& w, const PlanningProblem& problem) {
  return recover_value_detailed(m, w, problem).u;
}

}  // namespace mfgplan
