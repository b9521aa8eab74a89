#pragma once

#include <span>
#include <utility>
#include <vector>

namespace mfgplan {

struct QPochhammer {
  double value = 1.0;
  int terms = 0;
  // Rigorous bound on |value - (a; q)_inf|.
  double remainder_bound = 0.0;
};

// (a; q)_inf = prod_{j >= 0} (1 - a q^j) for real a and |q| < 1, truncated
// once the geometric tail bound drops below tol.
QPochhammer q_pochhammer_detailed(double a, double q, double tol = 1e-12);
double q_pochhammer(double a, double q, double tol = 1e-12);

// ell -> C_ell, either a constant or piecewise linear through (ell, C) knots
// with constant extrapolation. All values must be >= 1.
class PoincareConstants {
 public:
  static PoincareConstants constant(double value);
  static PoincareConstants table(std::vector<std::pair<double, double>> knots);

  double operator()(double ell) const;
  bool is_constant() const { return knots_.size() == 1; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

inline constexpr double kMoserBeta = 1.5;

struct MoserParams {
  double alpha = 1.0;
  double r = 2.0;
  // M_r, the base moment bound entering the Young constants.
  double base_moment = 1.0;
  // M_{q_{N0}}, the starting value of the recurrence.
  double start_moment = 1.0;
  double C = 1.0;
  PoincareConstants poincare = PoincareConstants::constant(1.0);
  // Carried for reports; the recurrence does not depend on it.
  double time_horizon = 1.0;
};

// Throws mfgplan::Error on alpha <= 0, r < 1, r <= alpha, or a constant < 1.
void validate_params(const MoserParams& params);

struct MoserSchedule {
  double alpha = 0.0;
  double r = 0.0;
  double beta = kMoserBeta;
  int n0 = 0;
  int N0 = 0;
  // Largest index with q_n, gamma_n, ell_n materialized.
  int horizon = 0;
  std::vector<double> q;
  std::vector<double> gamma;
  std::vector<double> ell;

  double theta(int n) const { return r / q[static_cast<std::size_t>(n)]; }
  bool in_window(int n) const;
  static constexpr double ell_limit = 4.0 / 3.0;
  static constexpr double inverse_gap_limit = 1.5;
};

// n0: first n with q_{n+1} > q_n + alpha and q_n > alpha + r. N0 >= n0 + 1:
// first index from which 4/3 < ell_n < 5/3 and 1/(1 - gamma_n) < 2 hold, by a
// scan up to index 64. The schedule is materialized up to `horizon` and every
// index in [N0, horizon] is re-verified.
MoserSchedule exponent_schedule(const MoserParams& params, int horizon = 64);

struct YoungConstants {
  double epsilon = 0.0;
  double c_epsilon = 0.0;
  // (q C^{2g+3} C_l^{2g} M_r)^{g/(1-g)}.
  double majorant = 0.0;
};

YoungConstants young_constants(double q, double alpha, double gamma, double C, double C_ell, double base_moment);

struct PhiPsi {
  int N0 = 0;
  int n = 0;
  // Phi_k^n for k = N0+1..n, by direct product and by the telescoped form
  // (q_{n+1} - alpha) / (q_k - alpha).
  std::vector<double> phi_direct;
  std::vector<double> phi_telescoped;
  double psi_direct = 0.0;
  // Psi_{N0} = 0, Psi_{j+1} = (1 + Psi_j) / (1 - gamma_{j+1}).
  double psi_recurrence = 0.0;
};

PhiPsi phi_psi(const MoserSchedule& schedule, int N0, int n);

struct RhoBound {
  double rho = 1.0;
  int N0 = 0;
  // Phi_k^n < rho beta^{n-k+1} and Psi_n < psi_cap(n) for all N0 < k <= n <= horizon.
  bool caps_hold = true;
  double psi_cap(int n) const;
};

RhoBound rho_bound(const MoserSchedule& schedule, int N0);

struct RecurrenceStep {
  double gamma = 0.0;
  double q = 1.0;
  double C = 1.0;
  double C_ell = 1.0;
};

// log M_{j+1} = (log q + (2 gamma + 5) log C + 2 gamma log C_ell + log M_j) / (1 - gamma).
// Returns log M_0..log M_{steps.size()}.
std::vector<double> iterate_log_recurrence(double log_start, std::span<const RecurrenceStep> steps);

struct MoserCertificateResult {
  MoserParams params;
  int n0 = 0;
  int N0 = 0;
  int horizon = 0;
  double rho = 1.0;
  // max_n (C^{2 gamma_n + 5} C_{ell_n}^{2 gamma_n})^{1/(1 - gamma_n)} over the horizon.
  double reduced_constant = 1.0;
  // log of C_red^{1/q_{N0} + 2 rho} M_{q_{N0}}^rho beta^{2 (rho + 1) beta (N0 + 1) / (beta - 1)^2}.
  double log_cap = 0.0;
  double cap = 0.0;
  // Entries for n = N0..horizon.
  std::vector<int> indices;
  std::vector<double> log_moments;
  std::vector<double> normalized;
  std::vector<double> psi;
  bool bounded = true;
  bool converged = false;
};

// Full-form recurrence from M_{q_{N0}} = params.start_moment up to `horizon`.
MoserCertificateResult moser_recurrence(const MoserParams& params, const MoserSchedule& schedule, int horizon);
MoserCertificateResult moser_certificate(const MoserParams& params, int horizon = 60);

struct DensityCaseExponents {
  double theta = 0.0;
  double gamma = 0.0;
  // |1/q - theta - (1 - theta)(d - 2) / (d (q + alpha))|.
  double identity_residual = 0.0;
};

DensityCaseExponents density_case_exponents(double q, double alpha, int d);

}  // namespace mfgplan
