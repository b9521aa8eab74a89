#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mfgplan/error.hpp"
#include "mfgplan/moser.hpp"

using namespace mfgplan;

namespace {

constexpr double kBeta = 1.5;

long double product_oracle(long double a, long double q, int terms) {
  long double p = 1.0L;
  long double power = 1.0L;
  for (int j = 0; j < terms; ++j) {
    p *= 1.0L - a * power;
    power *= q;
  }
  return p;
}

double q_of(int n) { return std::pow(kBeta, n); }
double gamma_of(int n, double alpha) { return (q_of(n + 1) - q_of(n)) / (q_of(n + 1) - alpha); }
double ell_of(int n, double alpha) { return 2.0 * q_of(n) / (q_of(n + 1) - alpha); }

bool window(int n, double alpha) {
  const double g = gamma_of(n, alpha);
  const double l = ell_of(n, alpha);
  return g > 0.0 && g < 1.0 && l > 4.0 / 3.0 && l < 5.0 / 3.0 && 1.0 / (1.0 - g) < 2.0;
}

std::pair<int, int> scan(double alpha, double r) {
  int n0 = 0;
  while (!(q_of(n0 + 1) > q_of(n0) + alpha && q_of(n0) > alpha + r)) ++n0;
  int N0 = n0 + 1;
  for (;; ++N0) {
    bool ok = true;
    for (int n = N0; n <= 64; ++n) ok = ok && window(n, alpha);
    if (ok) break;
  }
  return {n0, N0};
}

MoserParams params(double alpha, double r, double C = 1.0, double Cl = 1.0, double M = 1.0) {
  MoserParams p;
  p.alpha = alpha;
  p.r = r;
  p.C = C;
  p.poincare = PoincareConstants::constant(Cl);
  p.start_moment = M;
  return p;
}

}  // namespace

TEST(QPochhammer, Examples) {
  EXPECT_DOUBLE_EQ(q_pochhammer(0.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(q_pochhammer(0.3, 0.0), 0.7);
  EXPECT_NEAR(q_pochhammer(-1.0, 0.5), 4.768462, 1e-5);
  EXPECT_NEAR(q_pochhammer(-1.0, 0.5), static_cast<double>(product_oracle(-1.0L, 0.5L, 200)), 1e-11);
  EXPECT_THROW(q_pochhammer(0.5, 1.0), Error);
  EXPECT_THROW(q_pochhammer(0.5, -1.2), Error);
}

TEST(QPochhammer, RemainderBoundIsHonoured) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ad(-3.0, 0.9);
  std::uniform_real_distribution<double> qd(-0.9, 0.9);
  for (int trial = 0; trial < 300; ++trial) {
    const double a = ad(rng);
    const double q = qd(rng);
    const double exact = static_cast<double>(product_oracle(a, q, 2000));
    for (double tol : {1e-4, 1e-8, 1e-12}) {
      const QPochhammer r = q_pochhammer_detailed(a, q, tol);
      EXPECT_LE(r.remainder_bound, tol);
      EXPECT_LE(std::abs(r.value - exact), tol + 1e-13 * std::abs(exact)) << "a=" << a << " q=" << q;
      const QPochhammer half = q_pochhammer_detailed(a, q, tol / 2.0);
      EXPECT_LE(std::abs(half.value - r.value), tol);
      EXPECT_GE(half.terms, r.terms);
    }
  }
}

TEST(Schedule, DirectScan) {
  const MoserSchedule s = exponent_schedule(params(1.0, 2.0));
  EXPECT_EQ(s.n0, 3);
  EXPECT_EQ(s.N0, 4);
  EXPECT_EQ(std::make_pair(s.n0, s.N0), scan(1.0, 2.0));
  EXPECT_NEAR(s.ell[3], 1.6615, 1e-4);
  EXPECT_NEAR(s.gamma[3], 0.4154, 1e-4);
  EXPECT_NEAR(s.theta(3), 2.0 / 3.375, 1e-15);
  const MoserSchedule t = exponent_schedule(params(0.5, 1.0));
  EXPECT_EQ(t.n0, 2);
  EXPECT_EQ(t.N0, 3);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ad(0.1, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = ad(rng);
    const double r = std::max(1.0, alpha) + ad(rng);
    const MoserSchedule u = exponent_schedule(params(alpha, r));
    EXPECT_EQ(std::make_pair(u.n0, u.N0), scan(alpha, r)) << alpha << " " << r;
    for (int n = u.N0; n <= u.horizon; ++n) EXPECT_TRUE(u.in_window(n));
  }
}

TEST(Schedule, LongHorizonStaysInWindow) {
  // ell_n approaches the 4/3 edge from above faster than double resolution.
  for (int horizon : {100, 400, 1000}) {
    const MoserSchedule s = exponent_schedule(params(1.0, 2.0), horizon);
    EXPECT_EQ(s.N0, 4);
    EXPECT_TRUE(s.in_window(horizon));
    const MoserCertificateResult r = moser_certificate(params(1.0, 2.0), horizon);
    EXPECT_TRUE(r.bounded) << horizon;
  }
}

TEST(Schedule, LimitsAndRejections) {
  const MoserSchedule s = exponent_schedule(params(1.0, 2.0), 60);
  EXPECT_NEAR(s.ell[60], MoserSchedule::ell_limit, 1e-9);
  EXPECT_NEAR(1.0 / (1.0 - s.gamma[60]), MoserSchedule::inverse_gap_limit, 1e-9);
  EXPECT_THROW(exponent_schedule(params(1.0, 0.5)), Error);
  EXPECT_THROW(exponent_schedule(params(2.0, 1.5)), Error);
  EXPECT_THROW(exponent_schedule(params(1.0, 2.0, 0.5)), Error);
}

TEST(YoungConstants, DirectFormula) {
  const double q = 5.0625;
  const double g = gamma_of(3, 1.0);
  const YoungConstants y = young_constants(q, 1.0, g, 1.0, 1.0, 1.0);
  EXPECT_NEAR(y.epsilon, 4.0 * 5.0625 / (4.0625 * 4.0625), 1e-15);
  EXPECT_NEAR(y.epsilon, 1.2270, 1e-4);
  EXPECT_NEAR(y.c_epsilon, (1.0 - g) * std::pow(g / y.epsilon, g / (1.0 - g)), 1e-15);
  const YoungConstants z = young_constants(q, 1.0, 1e-14, 1.0, 1.0, 1.0);
  EXPECT_NEAR(z.c_epsilon, 1.0, 1e-13);
  EXPECT_THROW(young_constants(0.5, 1.0, 0.3, 1, 1, 1), Error);
  EXPECT_THROW(young_constants(2.0, 1.0, 1.0, 1, 1, 1), Error);
}

TEST(YoungConstants, MajorantProperty) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double alpha = 0.1 + 4.0 * u(rng);
    const double q = std::max(1.0, alpha) * (1.0 + 0.01 + 5.0 * u(rng));
    const double gamma = 0.999 * u(rng);
    const double C = std::max(1.0, 2.0 / alpha) * (1.0 + 3.0 * u(rng));
    const double Cl = 1.0 + 3.0 * u(rng);
    const double Mr = 1.0 + 3.0 * u(rng);
    const YoungConstants y = young_constants(q, alpha, gamma, C, Cl, Mr);
    EXPECT_LE(y.c_epsilon, y.majorant * (1.0 + 1e-12)) << q << " " << alpha << " " << gamma << " " << C;
  }
}

TEST(PhiPsi, ConventionsAndAgreement) {
  const MoserSchedule s = exponent_schedule(params(1.0, 2.0), 60);
  const PhiPsi empty = phi_psi(s, 4, 4);
  EXPECT_EQ(empty.psi_direct, 0.0);
  EXPECT_EQ(empty.psi_recurrence, 0.0);
  EXPECT_TRUE(empty.phi_direct.empty());
  const PhiPsi one = phi_psi(s, 4, 5);
  EXPECT_NEAR(one.phi_direct[0], 1.0 / (1.0 - gamma_of(5, 1.0)), 1e-15);
  for (int n = 5; n <= 60; ++n) {
    const PhiPsi pp = phi_psi(s, 4, n);
    EXPECT_NEAR(pp.psi_direct, pp.psi_recurrence, 1e-12 * pp.psi_direct) << n;
    for (std::size_t i = 0; i < pp.phi_direct.size(); ++i) {
      EXPECT_NEAR(pp.phi_direct[i], pp.phi_telescoped[i], 1e-12 * pp.phi_direct[i]);
    }
  }
  EXPECT_THROW(phi_psi(s, 4, 3), Error);
}

TEST(Rho, ValueAndCaps) {
  const MoserSchedule s = exponent_schedule(params(1.0, 2.0), 60);
  const RhoBound r = rho_bound(s, 4);
  const double oracle = static_cast<double>(product_oracle(-1.0L / 5.0625L, 1.0L / 1.5L, 400));
  EXPECT_NEAR(r.rho, oracle, 1e-11);
  EXPECT_NEAR(r.rho, 1.752, 1e-3);
  EXPECT_TRUE(r.caps_hold);
  EXPECT_LT(phi_psi(s, 4, 6).psi_direct, r.psi_cap(6));
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> ad(0.1, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = ad(rng);
    const MoserSchedule t = exponent_schedule(params(alpha, std::max(1.0, alpha) + 0.5), 40);
    const RhoBound rb = rho_bound(t, t.N0);
    EXPECT_GE(rb.rho, 1.0);
    EXPECT_TRUE(rb.caps_hold);
  }
}

TEST(Recurrence, IdentityConfiguration) {
  const std::vector<RecurrenceStep> steps(30, RecurrenceStep{0.0, 1.0, 1.0, 1.0});
  const std::vector<double> logs = iterate_log_recurrence(std::log(3.0), steps);
  for (double v : logs) EXPECT_NEAR(v, std::log(3.0), 1e-15);
}

TEST(Recurrence, LogSpaceMatchesDirectArithmetic) {
  const double C = 1.3;
  const double Cl = 1.2;
  const double M = 1.5;
  const MoserParams p = params(1.0, 2.0, C, Cl, M);
  const MoserCertificateResult r = moser_certificate(p, 60);
  double Mq = M;
  for (int n = 4; n <= 8; ++n) {
    const std::size_t j = static_cast<std::size_t>(n - 4);
    EXPECT_NEAR(std::exp(r.log_moments[j]), Mq, 1e-10 * Mq) << n;
    const double g = gamma_of(n, 1.0);
    Mq = std::pow(q_of(n + 1) * std::pow(C, 2.0 * g + 5.0) * std::pow(Cl, 2.0 * g) * Mq, 1.0 / (1.0 - g));
  }
}

TEST(Recurrence, CertificateForUnitConstants) {
  const MoserCertificateResult r = moser_certificate(params(1.0, 2.0), 60);
  EXPECT_EQ(r.n0, 3);
  EXPECT_EQ(r.N0, 4);
  EXPECT_TRUE(r.bounded);
  EXPECT_TRUE(r.converged);
  for (double v : r.normalized) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(v, r.cap);
  }
  const double at50 = r.normalized[static_cast<std::size_t>(50 - r.N0)];
  const double at60 = r.normalized.back();
  EXPECT_LT(std::abs(at60 - at50), 1e-2 * at50);
  EXPECT_EQ(r.indices.front(), 4);
  EXPECT_EQ(r.indices.back(), 60);
}

TEST(Recurrence, CapIsMonotoneInC) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double alpha = 0.2 + 3.0 * u(rng);
    const double r = std::max(1.0, alpha) + 0.1 + 2.0 * u(rng);
    const double C = 1.0 + 4.0 * u(rng);
    const double Cl = 1.0 + 2.0 * u(rng);
    const double M = 1.0 + 5.0 * u(rng);
    const MoserCertificateResult a = moser_certificate(params(alpha, r, C, Cl, M), 30);
    const MoserCertificateResult b = moser_certificate(params(alpha, r, 2.0 * C, Cl, M), 30);
    EXPECT_GE(b.log_cap, a.log_cap);
    EXPECT_TRUE(a.bounded);
  }
}

TEST(DensityCase, Values) {
  const DensityCaseExponents e = density_case_exponents(2.0, 1.0, 3);
  EXPECT_DOUBLE_EQ(e.theta, 7.0 / 16.0);
  EXPECT_DOUBLE_EQ(e.gamma, 3.0 / 8.0);
  EXPECT_LE(e.identity_residual, 1e-15);
  EXPECT_THROW(density_case_exponents(1.0, 1.0, 3), Error);
  EXPECT_THROW(density_case_exponents(2.0, 1.0, 1), Error);
}

TEST(DensityCase, IdentityOverRandomInputs) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> qd(1.0 + 1e-6, 20.0);
  std::uniform_real_distribution<double> ad(0.05, 5.0);
  std::uniform_int_distribution<int> dd(2, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const double q = qd(rng);
    const double alpha = ad(rng);
    const int d = dd(rng);
    const DensityCaseExponents e = density_case_exponents(q, alpha, d);
    EXPECT_LE(e.identity_residual, 1e-15);
    EXPECT_GT(e.theta, 0.0);
    EXPECT_LT(e.theta, 1.0);
    EXPECT_LT(e.gamma, 1.0);
    // Independent check of the identity from the returned theta.
    EXPECT_NEAR(1.0 / q, e.theta + (1.0 - e.theta) * (d - 2.0) / (d * (q + alpha)), 1e-15);
  }
}
