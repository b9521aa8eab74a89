#include "mfgplan/example34.hpp"

#include <cmath>
#include <numbers>

#include "mfgplan/error.hpp"

namespace mfgplan::example34 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// L(s) = log(1 + s sigma) / s and L'(s), by series when |s sigma| is small.
struct LogQuotient {
  double value;
  double derivative;
};

LogQuotient log_quotient(double s, double sigma) {
  const double z = s * sigma;
  if (std::abs(z) < 0.1) {
    // L = sigma * sum_{n>=1} (-1)^{n+1} z^{n-1} / n
    // L' = sigma^2 * sum_{n>=2} (-1)^{n+1} (n-1) z^{n-2} / n
    double value = 0.0;
    double derivative = 0.0;
    double zpow = 1.0;
    for (int n = 1; n <= 18; ++n) {
      const double sign = (n % 2 == 1) ? 1.0 : -1.0;
      value += sign * zpow / n;
      zpow *= z;
    }
    zpow = 1.0;
    for (int n = 2; n <= 19; ++n) {
      const double sign = (n % 2 == 1) ? 1.0 : -1.0;
      derivative += sign * (n - 1) * zpow / n;
      zpow *= z;
    }
    return {sigma * value, sigma * sigma * derivative};
  }
  const double lg = std::log1p(z);
  return {lg / s, (z / (1.0 + z) - lg) / (s * s)};
}

}  // namespace

double density(double t, double x) { return 1.0 + std::sin(kTwoPi * x) * std::sin(kTwoPi * t); }

double value(double t, double x) {
  const double s = std::sin(kTwoPi * t);
  const double c = std::cos(kTwoPi * t);
  const double sigma = std::sin(kTwoPi * x);
  if (std::abs(s) < kSeriesThreshold) {
    // -(c / 2 pi) sigma (1 - s sigma / 2 + (s sigma)^2 / 3 - ...), six terms.
    const double z = s * sigma;
    double sum = 0.0;
    double zpow = 1.0;
    for (int n = 1; n <= 6; ++n) {
      sum += ((n % 2 == 1) ? 1.0 : -1.0) * zpow / n;
      zpow *= z;
    }
    return -(c / kTwoPi) * sigma * sum;
  }
  return -(c / (kTwoPi * s)) * std::log1p(s * sigma);
}

double value_t(double t, double x) {
  const double s = std::sin(kTwoPi * t);
  const double c = std::cos(kTwoPi * t);
  const double sigma = std::sin(kTwoPi * x);
  const auto [L, dL] = log_quotient(s, sigma);
  return s * L - c * c * dL;
}

double value_x(double t, double x) { return -std::cos(kTwoPi * t) * std::cos(kTwoPi * x) / density(t, x); }

double potential(double t, double x) {
  const double ux = value_x(t, x);
  return density(t, x) + value_t(t, x) - 0.5 * ux * ux;
}

double momentum(double t, double x) { return std::cos(kTwoPi * t) * std::cos(kTwoPi * x); }

}  // namespace mfgplan::example34

namespace mfgplan {

namespace {

void require_example_grid(const TorusGrid& grid) {
  if (grid.dim() != 1) throw Error("example34 is one-dimensional; grid has dim = " + std::to_string(grid.dim()));
  if (std::abs(grid.horizon() - 1.0) > 1e-12) throw Error("example34 requires horizon T = 1");
}

}  // namespace

ManufacturedFields manufactured_example34(const TorusGrid& grid) {
  require_example_grid(grid);
  ManufacturedFields out{ScalarField(grid), ScalarField(grid), ScalarField(grid)};
  for (int k = 0; k <= grid.nt(); ++k) {
    const double t = grid.time(k, TimeLayout::nodes);
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.x(i);
      out.m(k, static_cast<std::size_t>(i)) = example34::density(t, x);
      out.u(k, static_cast<std::size_t>(i)) = example34::value(t, x);
      out.V(k, static_cast<std::size_t>(i)) = example34::potential(t, x);
    }
  }
  if (!out.V.all_finite()) out.V.set_blow_up_diagnostic(true);
  if (!out.u.all_finite()) out.u.set_blow_up_diagnostic(true);
  return out;
}

VectorField example34_momentum(const TorusGrid& grid) {
  require_example_grid(grid);
  VectorField w(grid, TimeLayout::intervals);
  for (int k = 0; k < grid.nt(); ++k) {
    const double t = grid.time(k, TimeLayout::intervals);
    for (int i = 0; i < grid.nx(); ++i) {
      w[0](k, static_cast<std::size_t>(i)) = example34::momentum(t, (i + 1) * grid.dx());
    }
  }
  return w;
}

}  // namespace mfgplan
