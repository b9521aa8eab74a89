#include "mfgplan/moser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfgplan/error.hpp"

namespace mfgplan {

namespace {

constexpr int kScanHorizon = 64;

double beta_power(int n) { return std::pow(kMoserBeta, n); }

void fill_schedule(MoserSchedule& s, int horizon) {
  s.horizon = horizon;
  s.q.resize(static_cast<std::size_t>(horizon) + 2);
  s.gamma.resize(static_cast<std::size_t>(horizon) + 1);
  s.ell.resize(static_cast<std::size_t>(horizon) + 1);
  for (int n = 0; n <= horizon + 1; ++n) s.q[static_cast<std::size_t>(n)] = beta_power(n);
  for (int n = 0; n <= horizon; ++n) {
    const auto i = static_cast<std::size_t>(n);
    s.gamma[i] = (s.q[i + 1] - s.q[i]) / (s.q[i + 1] - s.alpha);
    s.ell[i] = 2.0 * s.q[i] / (s.q[i + 1] - s.alpha);
  }
}

}  // namespace

QPochhammer q_pochhammer_detailed(double a, double q, double tol) {
  if (!(std::abs(q) < 1.0)) throw Error("q_pochhammer: requires |q| < 1");
  if (!(tol > 0.0)) throw Error("q_pochhammer: tolerance must be positive");
  if (!std::isfinite(a)) throw Error("q_pochhammer: a must be finite");
  QPochhammer out;
  double power = 1.0;  // q^J
  for (int j = 0; j < 100000; ++j) {
    const double term = a * power;
    if (std::abs(term) <= 0.5) {
      // |log prod_{i >= J} (1 - a q^i)| <= sum 2 |a| |q|^i = 2 |a q^J| / (1 - |q|).
      const double tail = 2.0 * std::abs(term) / (1.0 - std::abs(q));
      const double bound = std::abs(out.value) * std::expm1(tail);
      if (bound <= tol) {
        out.terms = j;
        out.remainder_bound = bound;
        return out;
      }
    }
    out.value *= 1.0 - term;
    power *= q;
  }
  throw Error("q_pochhammer: tail bound did not reach the tolerance");
}

double q_pochhammer(double a, double q, double tol) { return q_pochhammer_detailed(a, q, tol).value; }

PoincareConstants PoincareConstants::constant(double value) {
  if (!(value >= 1.0)) throw Error("Poincare constant must be >= 1");
  PoincareConstants out;
  out.knots_ = {{0.0, value}};
  return out;
}

PoincareConstants PoincareConstants::table(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw Error("Poincare table needs at least one knot");
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].second >= 1.0)) throw Error("Poincare table values must be >= 1");
    if (i > 0 && !(knots[i].first > knots[i - 1].first)) throw Error("Poincare table abscissae must be distinct");
  }
  PoincareConstants out;
  out.knots_ = std::move(knots);
  return out;
}

double PoincareConstants::operator()(double ell) const {
  if (knots_.size() == 1 || ell <= knots_.front().first) return knots_.front().second;
  if (ell >= knots_.back().first) return knots_.back().second;
  const auto hi = std::upper_bound(knots_.begin(), knots_.end(), ell,
                                   [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto lo = hi - 1;
  const double w = (ell - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

void validate_params(const MoserParams& params) {
  if (!(params.alpha > 0.0)) throw Error("moser: alpha must be positive");
  if (!(params.r >= 1.0)) throw Error("moser: r must be >= 1");
  if (!(params.r > params.alpha)) {
    std::ostringstream msg;
    msg << "moser: r = " << params.r << " must exceed alpha = " << params.alpha;
    throw Error(msg.str());
  }
  if (!(params.C >= 1.0)) throw Error("moser: C must be >= 1");
  if (!(params.base_moment >= 1.0)) throw Error("moser: M_r must be >= 1");
  if (!(params.start_moment >= 1.0)) throw Error("moser: M_{q_N0} must be >= 1");
}

bool MoserSchedule::in_window(int n) const {
  const auto i = static_cast<std::size_t>(n);
  // Cleared denominators with q_{n+1} = beta q_n: ell_n tends to 2 / beta, which
  // rounds onto the 4/3 edge when evaluated as a quotient.
  const double qn = q[i];
  const bool gamma_ok = q[i + 1] > qn && qn > alpha;
  const bool ell_low = qn * (6.0 - 4.0 * beta) + 4.0 * alpha > 0.0;
  const bool ell_high = qn * (5.0 * beta - 6.0) - 5.0 * alpha > 0.0;
  const bool half = qn * (beta - 2.0) + alpha < 0.0;
  return gamma_ok && ell_low && ell_high && half;
}

MoserSchedule exponent_schedule(const MoserParams& params, int horizon) {
  validate_params(params);
  if (horizon < 1) throw Error("exponent_schedule: horizon must be >= 1");
  MoserSchedule s;
  s.alpha = params.alpha;
  s.r = params.r;
  fill_schedule(s, std::max(horizon, kScanHorizon));

  s.n0 = -1;
  for (int n = 0; n <= kScanHorizon; ++n) {
    const auto i = static_cast<std::size_t>(n);
    if (s.q[i + 1] > s.q[i] + s.alpha && s.q[i] > s.alpha + s.r) {
      s.n0 = n;
      break;
    }
  }
  if (s.n0 < 0) throw Error("exponent_schedule: no n0 within the scan horizon of 64");

  s.N0 = -1;
  for (int start = s.n0 + 1; start <= kScanHorizon && s.N0 < 0; ++start) {
    bool all = true;
    for (int n = start; n <= kScanHorizon && all; ++n) all = s.in_window(n);
    if (all) s.N0 = start;
  }
  if (s.N0 < 0) throw Error("exponent_schedule: no valid N0 within the scan horizon of 64");

  fill_schedule(s, horizon);
  for (int n = s.N0; n <= horizon; ++n) {
    if (!s.in_window(n)) {
      std::ostringstream msg;
      msg << "exponent_schedule: index " << n << " violates the window 4/3 < ell < 5/3, 1/(1 - gamma) < 2";
      throw Error(msg.str());
    }
  }
  return s;
}

YoungConstants young_constants(double q, double alpha, double gamma, double C, double C_ell, double base_moment) {
  if (!(alpha > 0.0) || !(q > alpha)) throw Error("young_constants: requires q > alpha > 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw Error("young_constants: requires 0 < gamma < 1");
  if (!(C > 0.0) || !(C_ell > 0.0) || !(base_moment > 0.0)) throw Error("young_constants: constants must be positive");
  YoungConstants out;
  const double gap = q - alpha;
  out.epsilon =
      4.0 * alpha * q / (gap * gap * std::pow(C, 2.0 * gamma + 2.0) * std::pow(C_ell, 2.0 * gamma) * base_moment);
  const double e = gamma / (1.0 - gamma);
  if (gamma < 1e-12) {
    out.c_epsilon = 1.0 - gamma;
  } else {
    out.c_epsilon = (1.0 - gamma) * std::pow(gamma / out.epsilon, e);
  }
  out.majorant = std::pow(q * std::pow(C, 2.0 * gamma + 3.0) * std::pow(C_ell, 2.0 * gamma) * base_moment, e);
  return out;
}

PhiPsi phi_psi(const MoserSchedule& schedule, int N0, int n) {
  if (n < N0) throw Error("phi_psi: requires n >= N0");
  if (n > schedule.horizon) throw Error("phi_psi: n exceeds the materialized schedule");
  auto inv = [&](int j) { return 1.0 / (1.0 - schedule.gamma[static_cast<std::size_t>(j)]); };
  PhiPsi out;
  out.N0 = N0;
  out.n = n;
  for (int k = N0 + 1; k <= n; ++k) {
    double product = 1.0;
    for (int j = k; j <= n; ++j) product *= inv(j);
    out.phi_direct.push_back(product);
    out.psi_direct += product;
  }
  // 1 - gamma_j = (q_j - alpha) / (q_{j+1} - alpha), so the product telescopes.
  for (int k = N0 + 1; k <= n; ++k) {
    out.phi_telescoped.push_back((schedule.q[static_cast<std::size_t>(n) + 1] - schedule.alpha) /
                                 (schedule.q[static_cast<std::size_t>(k)] - schedule.alpha));
  }
  double psi = 0.0;
  for (int j = N0; j < n; ++j) psi = (1.0 + psi) * inv(j + 1);
  out.psi_recurrence = psi;
  return out;
}

double RhoBound::psi_cap(int n) const {
  return rho * kMoserBeta * (std::pow(kMoserBeta, n - N0) - 1.0) / (kMoserBeta - 1.0);
}

RhoBound rho_bound(const MoserSchedule& schedule, int N0) {
  RhoBound out;
  out.N0 = N0;
  out.rho = q_pochhammer(-schedule.alpha * std::pow(kMoserBeta, -N0), 1.0 / kMoserBeta, 1e-12);
  for (int n = N0 + 1; n <= schedule.horizon; ++n) {
    const PhiPsi pp = phi_psi(schedule, N0, n);
    for (int k = N0 + 1; k <= n; ++k) {
      if (!(pp.phi_direct[static_cast<std::size_t>(k - N0 - 1)] < out.rho * std::pow(kMoserBeta, n - k + 1))) {
        out.caps_hold = false;
      }
    }
    if (!(pp.psi_direct < out.psi_cap(n))) out.caps_hold = false;
  }
  return out;
}

std::vector<double> iterate_log_recurrence(double log_start, std::span<const RecurrenceStep> steps) {
  std::vector<double> out;
  out.reserve(steps.size() + 1);
  out.push_back(log_start);
  for (const RecurrenceStep& s : steps) {
    if (!(s.gamma >= 0.0 && s.gamma < 1.0)) throw Error("moser recurrence: gamma must lie in [0, 1)");
    const double next = (std::log(s.q) + (2.0 * s.gamma + 5.0) * std::log(s.C) +
                         2.0 * s.gamma * std::log(s.C_ell) + out.back()) /
                        (1.0 - s.gamma);
    out.push_back(next);
  }
  return out;
}

MoserCertificateResult moser_recurrence(const MoserParams& params, const MoserSchedule& schedule, int horizon) {
  validate_params(params);
  const int N0 = schedule.N0;
  if (horizon <= N0) throw Error("moser_recurrence: horizon must exceed N0");
  if (horizon > schedule.horizon) throw Error("moser_recurrence: horizon exceeds the materialized schedule");

  MoserCertificateResult out;
  out.params = params;
  out.n0 = schedule.n0;
  out.N0 = N0;
  out.horizon = horizon;

  std::vector<RecurrenceStep> steps;
  double log_reduced = 0.0;
  for (int n = N0; n < horizon; ++n) {
    const auto i = static_cast<std::size_t>(n);
    RecurrenceStep s;
    s.gamma = schedule.gamma[i];
    s.q = schedule.q[i + 1];
    s.C = params.C;
    s.C_ell = params.poincare(schedule.ell[i]);
    steps.push_back(s);
    const double reduced = ((2.0 * s.gamma + 5.0) * std::log(s.C) + 2.0 * s.gamma * std::log(s.C_ell)) / (1.0 - s.gamma);
    log_reduced = std::max(log_reduced, reduced);
  }
  out.reduced_constant = std::exp(log_reduced);
  out.log_moments = iterate_log_recurrence(std::log(params.start_moment), steps);

  const RhoBound rho = rho_bound(schedule, N0);
  out.rho = rho.rho;
  const double beta = kMoserBeta;
  out.log_cap = (1.0 / schedule.q[static_cast<std::size_t>(N0)] + 2.0 * out.rho) * log_reduced +
                out.rho * std::log(params.start_moment) +
                2.0 * (out.rho + 1.0) * beta * (N0 + 1) / ((beta - 1.0) * (beta - 1.0)) * std::log(beta);
  out.cap = std::exp(out.log_cap);

  double psi = 0.0;
  for (int n = N0; n <= horizon; ++n) {
    const auto j = static_cast<std::size_t>(n - N0);
    if (n > N0) psi = (1.0 + psi) / (1.0 - schedule.gamma[static_cast<std::size_t>(n)]);
    const double log_norm = out.log_moments[j] / schedule.q[static_cast<std::size_t>(n)];
    out.indices.push_back(n);
    out.normalized.push_back(std::exp(log_norm));
    out.psi.push_back(psi);
    if (!(log_norm <= out.log_cap)) out.bounded = false;
  }
  const std::size_t last = out.normalized.size() - 1;
  out.converged = std::abs(out.normalized[last] - out.normalized[last - 1]) < 1e-3 * out.normalized[last - 1];
  return out;
}

MoserCertificateResult moser_certificate(const MoserParams& params, int horizon) {
  const MoserSchedule schedule = exponent_schedule(params, std::max(horizon, 1));
  return moser_recurrence(params, schedule, horizon);
}

DensityCaseExponents density_case_exponents(double q, double alpha, int d) {
  if (!(q > 1.0)) throw Error("density_case_exponents: requires q > 1");
  if (!(alpha > 0.0)) throw Error("density_case_exponents: requires alpha > 0");
  if (d < 2) throw Error("density_case_exponents: requires d >= 2");
  DensityCaseExponents out;
  out.theta = (2.0 * q + alpha * d) / (q * (d * (q + alpha) - d + 2.0));
  out.gamma = (1.0 - out.theta) * q / (q + alpha);
  if (!(out.theta > 0.0 && out.theta < 1.0)) throw Error("density_case_exponents: theta outside (0, 1)");
  if (!(out.gamma > 0.0 && out.gamma < 1.0)) throw Error("density_case_exponents: gamma outside (0, 1)");
  out.identity_residual =
      std::abs(1.0 / q - out.theta - (1.0 - out.theta) * (d - 2.0) / (d * (q + alpha)));
  return out;
}

}  // namespace mfgplan
