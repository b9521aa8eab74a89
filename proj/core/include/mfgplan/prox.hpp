#pragma once

#include <array>

#include "mfgplan/coupling.hpp"

namespace mfgplan {

struct KineticProxResult {
  double m = 0.0;
  std::array<double, 2> w{0.0, 0.0};
};

// Proximal map of the kinetic energy |w|^2 / (2m), extended by +inf for m <= 0
// except at the cone tip (0, 0). For d = 1 leave w[1] at zero.
KineticProxResult kinetic_prox(double m, std::array<double, 2> w, double sigma);

// argmin over m >= 0 of G(m) - V m + (m - m_tilde)^2 / (2 sigma).
double coupling_prox(double m_tilde, double sigma, const Coupling& coupling, double potential);

}  // namespace mfgplan
