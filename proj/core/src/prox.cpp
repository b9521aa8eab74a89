#include "mfgplan/prox.hpp"

#include <algorithm>
#include <cmath>

#include "mfgplan/error.hpp"

namespace mfgplan {

KineticProxResult kinetic_prox(double m, std::array<double, 2> w, double sigma) {
  if (!(sigma > 0.0)) throw Error("kinetic_prox: step must be positive");
  if (!std::isfinite(m) || !std::isfinite(w[0]) || !std::isfinite(w[1])) {
    throw Error("kinetic_prox: non-finite input");
  }
  const double w2 = w[0] * w[0] + w[1] * w[1];
  const double k = 0.5 * sigma * w2;
  // p(x) = (x - m)(x + sigma)^2 - k is increasing right of lo and p(lo) <= 0,
  // while p(hi) >= 0, so Newton from hi decreases monotonically onto the
  // largest root.
  const double lo = std::max(m, -sigma);
  double x = lo + std::cbrt(k);
  if (k == 0.0) {
    x = lo;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double s = x + sigma;
      const double p = (x - m) * s * s - k;
      const double dp = s * s + 2.0 * (x - m) * s;
      if (!(dp > 0.0)) break;
      const double next = x - p / dp;
      if (!(next < x) || next < lo) break;
      const bool small_step = x - next <= 4e-16 * std::max(1.0, std::abs(x));
      x = next;
      if (small_step) break;
    }
  }
  KineticProxResult out;
  if (x > 0.0) {
    out.m = x;
    const double shrink = x / (x + sigma);
    out.w = {shrink * w[0], shrink * w[1]};
  }
  return out;
}

double coupling_prox(double m_tilde, double sigma, const Coupling& coupling, double potential) {
  if (!(sigma > 0.0)) throw Error("coupling_prox: step must be positive");
  const double target = m_tilde + sigma * potential;
  if (coupling.is_power() && coupling.alpha() == 1.0) return std::max(target / (1.0 + sigma), 0.0);
  // h(m) = sigma g(m) + m - target is strictly increasing on [0, inf).
  auto h = [&](double v) { return sigma * coupling.g(v) + v - target; };
  if (h(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(1.0, target);
  while (h(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mfgplan
