#include "mfgplan/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfgplan/error.hpp"

namespace mfgplan {

Coupling Coupling::power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("power coupling needs an exponent alpha > 0");
  Coupling c;
  c.alpha_ = alpha;
  return c;
}

Coupling Coupling::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw Error("tabulated coupling needs at least two points");
  if (points.front().first < 0.0) throw Error("tabulated coupling: first abscissa must be >= 0");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw Error("tabulated coupling: abscissae must be strictly increasing");
    }
    if (points[i].second < points[i - 1].second) {
      std::ostringstream msg;
      msg << "tabulated coupling: g must be non-decreasing, but g(" << points[i].first << ") = " << points[i].second
          << " < g(" << points[i - 1].first << ") = " << points[i - 1].second;
      throw Error(msg.str());
    }
  }
  Coupling c;
  c.points_ = std::move(points);
  const auto& p = c.points_;
  // Integral of the left extrapolation over [0, x0].
  const double x0 = p[0].first;
  const double slope0 = (p[1].second - p[0].second) / (p[1].first - p[0].first);
  double acc = p[0].second * x0 - slope0 * x0 * x0 / 2.0;
  c.antiderivative_at_knots_.push_back(acc);
  for (std::size_t i = 1; i < p.size(); ++i) {
    acc += (p[i].first - p[i - 1].first) * (p[i].second + p[i - 1].second) / 2.0;
    c.antiderivative_at_knots_.push_back(acc);
  }
  return c;
}

namespace {

// Index of the segment [x_i, x_{i+1}] used for m (clamped to the end segments).
std::size_t segment_of(const std::vector<std::pair<double, double>>& p, double m) {
  const auto it = std::upper_bound(p.begin(), p.end(), m,
                                   [](double v, const std::pair<double, double>& pt) { return v < pt.first; });
  const auto idx = static_cast<std::size_t>(std::distance(p.begin(), it));
  if (idx == 0) return 0;
  return std::min(idx - 1, p.size() - 2);
}

}  // namespace

double Coupling::g(double m) const {
  if (is_power()) return std::pow(m, alpha_);
  const std::size_t s = segment_of(points_, m);
  const auto [xa, ya] = points_[s];
  const auto [xb, yb] = points_[s + 1];
  return ya + (yb - ya) * (m - xa) / (xb - xa);
}

double Coupling::G(double m) const {
  if (is_power()) return std::pow(m, alpha_ + 1.0) / (alpha_ + 1.0);
  const double x0 = points_.front().first;
  if (m <= x0) {
    const double slope0 = (points_[1].second - points_[0].second) / (points_[1].first - points_[0].first);
    return points_[0].second * m + slope0 * (m * m / 2.0 - x0 * m);
  }
  const std::size_t s = std::min(segment_of(points_, m), points_.size() - 1);
  const double xa = points_[s].first;
  return antiderivative_at_knots_[s] + (m - xa) * (points_[s].second + g(m)) / 2.0;
}

double Coupling::dg(double m) const {
  if (is_power()) {
    if (m == 0.0) {
      if (alpha_ < 1.0) return std::numeric_limits<double>::infinity();
      return alpha_ == 1.0 ? 1.0 : 0.0;
    }
    return alpha_ * std::pow(m, alpha_ - 1.0);
  }
  const std::size_t s = segment_of(points_, m);
  return (points_[s + 1].second - points_[s].second) / (points_[s + 1].first - points_[s].first);
}

CouplingValue coupling_eval(const Coupling& coupling, double m) {
  if (m < 0.0 || std::isnan(m)) throw Error("coupling_eval: density must be >= 0");
  return {coupling.g(m), coupling.G(m)};
}

double pressure_P(double z, double s) {
  if (z < 0.0 || std::isnan(z)) throw Error("pressure_P: argument must be >= 0");
  if (z == 0.0 && s < 0.0) throw Error("pressure_P: z = 0 with negative exponent s");
  return (s - 1.0) * std::pow(z, s);
}

double pressure_dP(double z, double s) {
  if (z < 0.0 || std::isnan(z)) throw Error("pressure_dP: argument must be >= 0");
  if (z == 0.0 && s < 1.0) throw Error("pressure_dP: z = 0 with exponent s < 1");
  return s * (s - 1.0) * std::pow(z, s - 1.0);
}

}  // namespace mfgplan
