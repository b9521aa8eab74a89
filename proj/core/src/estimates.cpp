#include "mfgplan/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfgplan/error.hpp"
#include "mfgplan/operators.hpp"

namespace mfgplan {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegativeSlack = 1e-10;

std::string location(const TorusGrid& grid, int k, std::size_t cell) {
  const int i = static_cast<int>(cell / static_cast<std::size_t>(grid.ny()));
  const int j = static_cast<int>(cell % static_cast<std::size_t>(grid.ny()));
  std::ostringstream out;
  out << "t = " << grid.time(k, TimeLayout::nodes) << ", x = " << grid.x(i);
  if (grid.dim() == 2) out << ", y = " << grid.y(j);
  return out.str();
}

double power_integral(std::span<const double> slice, const TorusGrid& grid, double s) {
  double sum = 0.0;
  for (double v : slice) sum += std::pow(std::max(v, 0.0), s);
  return sum * grid.cell_volume();
}

}  // namespace

EnergyTrajectory EnergyTrajectory::from_samples(std::vector<double> values, double dt, double s) {
  if (values.size() < 2) throw Error("energy trajectory needs at least 2 samples");
  if (!(dt > 0.0)) throw Error("energy trajectory needs dt > 0");
  EnergyTrajectory f;
  f.s = s;
  f.dt = dt;
  const std::size_t n = values.size();
  f.times.resize(n);
  for (std::size_t k = 0; k < n; ++k) f.times[k] = static_cast<double>(k) * dt;
  f.first.assign(n, 0.0);
  f.second.assign(n, kNan);
  if (n == 2) {
    f.first[0] = f.first[1] = (values[1] - values[0]) / dt;
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      f.first[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
      f.second[k] = (values[k + 1] - 2.0 * values[k] + values[k - 1]) / (dt * dt);
    }
    f.first[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
    f.first[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
  }
  f.values = std::move(values);
  return f;
}

EnergyTrajectory energy_trajectory(const ScalarField& m, double s) {
  if (m.layout() != TimeLayout::nodes) throw Error("energy_trajectory: density must be sampled on time nodes");
  const TorusGrid& grid = m.grid();
  std::vector<double> values(static_cast<std::size_t>(m.slices()));
  for (int k = 0; k < m.slices(); ++k) {
    const auto slice = m.slice(k);
    for (std::size_t c = 0; c < slice.size(); ++c) {
      if (slice[c] < -kNegativeSlack || std::isnan(slice[c])) {
        throw Error("energy_trajectory: negative density " + std::to_string(slice[c]) + " at " + location(grid, k, c));
      }
      if (s < 0.0 && slice[c] <= 0.0) {
        throw Error("energy_trajectory: vacuum at " + location(grid, k, c) + " makes int m^s infinite for s < 0");
      }
    }
    values[static_cast<std::size_t>(k)] = power_integral(slice, grid, s);
  }
  return EnergyTrajectory::from_samples(std::move(values), grid.dt(), s);
}

ConvexityDefect convexity_defect(const EnergyTrajectory& f, double c) {
  const std::size_t n = f.values.size();
  if (n < 3) throw Error("convexity_defect: trajectory needs at least 3 slices");
  ConvexityDefect out;
  out.c = c;
  out.pointwise.assign(n, kNan);
  out.min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double d = f.second[k] + c * f.values[k];
    out.pointwise[k] = d;
    if (d < out.min) {
      out.min = d;
      out.argmin = k;
    }
  }
  return out;
}

ConvexityDefect convexity_defect(const EnergyTrajectory& f, const ScalarField& potential) {
  return convexity_defect(f, std::abs(f.s - 1.0) * delta_v_sup(potential));
}

DisplacementDefects displacement_identity_check(const ScalarField& m, const ScalarField& u, const ScalarField& V,
                                                const Coupling& coupling, double s) {
  require_compatible(m, u, "displacement_identity_check");
  require_compatible(m, V, "displacement_identity_check");
  const TorusGrid& grid = m.grid();
  if (s > 0.0 && s < 1.0) throw Error("displacement_identity_check: exponent s in (0, 1) is outside the identity's domain");
  if (s <= 0.0 && grid.dim() != 1) throw Error("displacement_identity_check: s <= 0 requires d = 1");
  if (grid.nt() < 2) throw Error("displacement_identity_check: needs at least one interior slice");

  const EnergyTrajectory f = energy_trajectory(m, s);
  const ScalarField lap_u = laplacian(u);
  const ScalarField lap_v = laplacian(V);
  const ScalarField dm2 = gradient_norm_sq(m);
  const double dt = grid.dt();
  DisplacementDefects out;
  double d2 = 0.0;
  for (int k = 1; k < grid.nt(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const auto dens = m.slice(k);
    const auto lu = lap_u.slice(k);
    const auto lv = lap_v.slice(k);
    const auto grad = dm2.slice(k);
    double first = 0.0;
    double second = 0.0;
    for (std::size_t c = 0; c < dens.size(); ++c) {
      const double z = std::max(dens[c], 0.0);
      const double P = pressure_P(z, s);
      first += P * lu[c];
      if (grid.dim() == 1) {
        const double dP = pressure_dP(z, s);
        second += dP * z * lu[c] * lu[c] + dP * coupling.dg(z) * grad[c] + P * lv[c];
      }
    }
    first *= grid.cell_volume();
    second *= grid.cell_volume();
    const double df = (f.values[kk + 1] - f.values[kk - 1]) / (2.0 * dt);
    out.d1 = std::max(out.d1, std::abs(df - first));
    if (grid.dim() == 1) d2 = std::max(d2, std::abs(f.second[kk] - second));
  }
  if (grid.dim() == 1) out.d2 = d2;
  return out;
}

std::string bound_kind_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::lemma23:
      return "lemma23";
    case BoundKind::thm13_density:
      return "thm13_density";
    case BoundKind::thm13_inverse:
      return "thm13_inverse";
  }
  return "unknown";
}

void check_observed(BoundCertificate& certificate, double observed) {
  certificate.observed = observed;
  certificate.pass = observed <= certificate.bound * (1.0 + certificate.tolerance);
}

BoundCertificate lemma_bound(double a, double b, double c, double horizon, double tolerance) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw Error("lemma_bound: endpoint values a, b must be >= 0");
  if (!(c >= 0.0)) throw Error("lemma_bound: convexity constant c must be >= 0");
  if (!(horizon > 0.0)) throw Error("lemma_bound: horizon T must be positive");
  if (!(tolerance >= 0.0)) throw Error("lemma_bound: tolerance must be >= 0");
  const double ct2 = c * horizon * horizon;
  if (!(ct2 < 2.0)) {
    std::ostringstream msg;
    msg << "lemma_bound: c T^2 = " << ct2 << " >= 2 is outside the bound's hypothesis; no uniform bound exists "
        << "for large c, e.g. f_k(t) = k sin(pi t / T) + 1 satisfies f'' + c f >= 0 for c >= pi^2 / T^2 "
        << "with f(0) = f(T) = 1 but max f = k + 1";
    throw Error(msg.str());
  }
  BoundCertificate cert;
  cert.kind = BoundKind::lemma23;
  cert.a = a;
  cert.b = b;
  cert.c = c;
  cert.horizon = horizon;
  cert.p = kNan;
  cert.epsilon = 2.0 - ct2;
  cert.s = kNan;
  cert.bound = 2.0 * (a + b) / (2.0 - ct2);
  cert.tolerance = tolerance;
  return cert;
}

Theorem13Certificates theorem13_bound(const PlanningProblem& problem, double p, const ScalarField& m, bool inverse,
                                      double tolerance) {
  const TorusGrid& grid = problem.grid();
  if (!(m.grid() == grid)) throw Error("theorem13_bound: density trajectory lives on a different grid");
  if (!(p > 0.0)) throw Error("theorem13_bound: p must be positive");
  const double horizon = grid.horizon();
  const double dv = problem.delta_v_sup();
  const double eps = epsilon_for(p, horizon, dv);
  if (!(eps > 0.0)) {
    std::ostringstream msg;
    msg << "theorem13_bound: p = " << p << " is not admissible (eps = 2 - p T^2 |lap V|_inf = " << eps << ")";
    throw Error(msg.str());
  }
  if (inverse) {
    if (grid.dim() != 1) throw Error("theorem13_bound: the inverse-density bound requires d = 1");
    if (p < 2.0) throw Error("theorem13_bound: the inverse-density bound requires p >= 2");
    if (!(problem.k0() > 0.0)) throw Error("theorem13_bound: the inverse-density bound requires k0 > 0");
  }

  auto make = [&](BoundKind kind, double s) {
    BoundCertificate cert;
    cert.kind = kind;
    cert.a = power_integral(problem.m0(), grid, s);
    cert.b = power_integral(problem.mT(), grid, s);
    cert.c = p * dv;
    cert.horizon = horizon;
    cert.p = p;
    cert.epsilon = eps;
    cert.s = s;
    cert.bound = 2.0 / eps * (cert.a + cert.b);
    cert.tolerance = tolerance;
    const EnergyTrajectory f = energy_trajectory(m, s);
    check_observed(cert, *std::max_element(f.values.begin(), f.values.end()));
    return cert;
  };

  Theorem13Certificates out{make(BoundKind::thm13_density, p + 1.0), std::nullopt};
  if (inverse) out.inverse = make(BoundKind::thm13_inverse, 1.0 - p);
  return out;
}

SupNormReport supnorm_monitor(const ScalarField& m, double vacuum_floor) {
  const TorusGrid& grid = m.grid();
  SupNormReport out;
  out.max_density = -std::numeric_limits<double>::infinity();
  out.min_density = std::numeric_limits<double>::infinity();
  for (int k = 0; k < m.slices(); ++k) {
    const auto slice = m.slice(k);
    for (std::size_t c = 0; c < slice.size(); ++c) {
      out.max_density = std::max(out.max_density, slice[c]);
      if (slice[c] < out.min_density) {
        out.min_density = slice[c];
        out.argmin_slice = k;
        out.argmin_cell = c;
      }
    }
  }
  out.vacuum = out.min_density <= vacuum_floor;
  if (!out.vacuum) out.max_inverse = 1.0 / out.min_density;
  out.argmin_t = grid.time(out.argmin_slice, m.layout());
  out.argmin_x = grid.x(static_cast<int>(out.argmin_cell / static_cast<std::size_t>(grid.ny())));
  out.argmin_y = grid.dim() == 2 ? grid.y(static_cast<int>(out.argmin_cell % static_cast<std::size_t>(grid.ny()))) : 0.0;
  return out;
}

}  // namespace mfgplan
