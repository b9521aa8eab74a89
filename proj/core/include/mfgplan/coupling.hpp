#pragma once

#include <utility>
#include <vector>

namespace mfgplan {

// Non-decreasing congestion cost g on [0, inf) together with its
// antiderivative G, G(0) = 0.
//
// Power couplings are g(m) = m^alpha. Tabulated couplings are piecewise linear
// through the given points with linear extrapolation beyond the first and
// last one; the points must have strictly increasing abscissae starting at
// m >= 0 and non-decreasing values.
class Coupling {
 public:
  static Coupling power(double alpha);
  static Coupling tabulated(std::vector<std::pair<double, double>> points);

  bool is_power() const { return points_.empty(); }
  double alpha() const { return alpha_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  double g(double m) const;
  double G(double m) const;
  // g'(m); one-sided (right) slope at tabulation knots.
  double dg(double m) const;

  bool operator==(const Coupling&) const = default;

 private:
  Coupling() = default;

  double alpha_ = 1.0;
  std::vector<std::pair<double, double>> points_;
  std::vector<double> antiderivative_at_knots_;
};

struct CouplingValue {
  double g;
  double G;
};

CouplingValue coupling_eval(const Coupling& coupling, double m);

// P(z) = z U'(z) - U(z) for U(z) = z^s, i.e. (s - 1) z^s.
double pressure_P(double z, double s);
// P'(z) = s (s - 1) z^(s-1).
double pressure_dP(double z, double s);

}  // namespace mfgplan
