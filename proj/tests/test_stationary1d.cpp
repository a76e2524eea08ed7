#include <gtest/gtest.h>

#include <array>
#include <random>

#include "wpdiff/stationary1d.hpp"

using namespace wpdiff;
using specfun::I;

namespace {

// Dense complex solve with partial pivoting, for the interface-matching oracles.
std::array<cplx, 4> solve4(std::array<std::array<cplx, 4>, 4> a, std::array<cplx, 4> b) {
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 4; ++r) {
      cplx f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<cplx, 4> x{};
  for (int r = 3; r >= 0; --r) {
    cplx s = b[r];
    for (int k = r + 1; k < 4; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

// Schrodinger: e^{ikx} + r e^{-ikx} | B e^{iKx} + C e^{-iKx} | t e^{ikx}; value and slope continuous.
// Returns (r, t).
std::pair<cplx, cplx> schrodinger_matching(double k, double m, double v0, double w) {
  cplx K = std::sqrt(cplx(k * k - 2 * m * v0));
  auto e = [](cplx q, double x) { return std::exp(I * q * x); };
  std::array<std::array<cplx, 4>, 4> a{};
  std::array<cplx, 4> b{};
  // unknowns: r, B, C, t
  double x = -w;
  a[0] = {e(-k, x), -e(K, x), -e(-K, x), 0.0};
  b[0] = -e(k, x);
  a[1] = {-I * k * e(-k, x), -I * K * e(K, x), I * K * e(-K, x), 0.0};
  b[1] = -I * k * e(k, x);
  x = w;
  a[2] = {0.0, e(K, x), e(-K, x), -e(k, x)};
  a[3] = {0.0, I * K * e(K, x), -I * K * e(-K, x), -I * k * e(k, x)};
  auto s = solve4(a, b);
  return {s[0], s[3]};
}

// Dirac: unknowns B, C, D, F with phi1 and phi2 continuous at -w and w.
std::array<cplx, 4> dirac_matching(double k, double m, double v0, double w) {
  double E = std::hypot(k, m);
  double ms = m + v0;
  cplx kp = std::sqrt(cplx(E * E - ms * ms));
  cplx lo = I * k / (E + m);
  cplx li = I * kp / (E + ms);
  auto e = [](cplx q, double x) { return std::exp(I * q * x); };
  std::array<std::array<cplx, 4>, 4> a{};
  std::array<cplx, 4> b{};
  double x = -w;
  a[0] = {e(-k, x), -e(kp, x), -e(-kp, x), 0.0};
  b[0] = -e(k, x);
  a[1] = {-lo * e(-k, x), -li * e(kp, x), li * e(-kp, x), 0.0};
  b[1] = -lo * e(k, x);
  x = w;
  a[2] = {0.0, e(kp, x), e(-kp, x), -e(k, x)};
  a[3] = {0.0, li * e(kp, x), -li * e(-kp, x), -lo * e(k, x)};
  return solve4(a, b);
}

} // namespace

TEST(SchrodingerCoeffs, ZeroMomentumTotalReflection) {
  auto c = schrodinger_coeffs(1e-6, 40.0, -1.0, 1.0);
  EXPECT_NEAR(c.F.real(), -1.0, 1e-3);
  EXPECT_NEAR(c.F.imag(), 0.0, 1e-3);
  EXPECT_EQ(c.D, cplx(1.0));
  EXPECT_NEAR(std::abs(c.F - c.E / c.A), 0.0, 1e-12);
}

TEST(SchrodingerCoeffs, TransmissionResonance) {
  // sin(2K'w) = 0 at K' = 3 pi / (2w).
  double m = 1.0, v0 = -2.0, w = 1.0;
  double K = 3.0 * specfun::pi / (2.0 * w);
  double k = std::sqrt(K * K + 2.0 * m * v0);
  auto c = schrodinger_coeffs(k, m, v0, w);
  EXPECT_LT(std::abs(c.F), 1e-13);
  EXPECT_NEAR(std::abs(c.T), 1.0, 1e-13);
}

TEST(SchrodingerCoeffs, MatchesInterfaceOracle) {
  for (double v0 : {-1.0, -0.3, 0.2, 5.0}) {
    for (double k : {0.05, 0.4, 1.3, 3.7}) {
      double m = 40.0, w = 1.0;
      auto c = schrodinger_coeffs(k, m, v0, w);
      auto [r, t] = schrodinger_matching(k, m, v0, w);
      // F carries the reference phase e^{2ikw} relative to r.
      EXPECT_NEAR(std::abs(c.F - r * std::exp(2.0 * I * k * w)), 0.0, 1e-10) << v0 << " " << k;
      EXPECT_NEAR(std::abs(c.T - t), 0.0, 1e-10) << v0 << " " << k;
      EXPECT_NEAR(std::norm(c.F) + std::norm(c.T), 1.0, 1e-10);
    }
  }
  // Fig. 1 well at the packet's mean momentum.
  auto c = schrodinger_coeffs(0.4, 40.0, -1.0, 1.0);
  EXPECT_GE(std::abs(c.F), 0.0);
  EXPECT_LE(std::abs(c.F), 1.0);
}

TEST(SchrodingerCoeffs, ReflectionBoundedProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uk(1e-9, 10.0), uv(0.01, 5.0), uw(0.1, 3.0), um(0.5, 50.0);
  for (int i = 0; i < 10000; ++i) {
    double k = uk(rng), m = um(rng), w = uw(rng), v0 = -uv(rng);
    auto c = schrodinger_coeffs(k, m, v0, w);
    ASSERT_LE(std::abs(c.F), 1.0 + 1e-12);
    ASSERT_NEAR(std::norm(c.F) + std::norm(c.T), 1.0, 1e-10);
  }
}

TEST(SchrodingerCoeffs, OpaqueBarrierStaysFinite) {
  auto c = schrodinger_coeffs(0.1, 1e4, 1e3, 5.0);
  EXPECT_TRUE(std::isfinite(std::abs(c.F)));
  EXPECT_NEAR(std::abs(c.F), 1.0, 1e-12);
  EXPECT_LT(std::abs(c.T), 1e-300 + 1e-200);
}

TEST(SchrodingerCoeffs, ContinuousAcrossBarrierTop) {
  const double m = 2.0, w = 0.5, v0 = 4.0; // k^2 = 2 m v0 at k = 4
  auto top = schrodinger_coeffs(4.0, m, v0, w);
  EXPECT_NEAR(std::norm(top.F) + std::norm(top.T), 1.0, 1e-14);
  EXPECT_NEAR(std::norm(top.T), 1.0 / (1.0 + 4.0), 1e-14);
  for (double dk : {1e-5, -1e-5}) {
    auto near = schrodinger_coeffs(4.0 + dk, m, v0, w);
    EXPECT_LT(std::abs(near.T - top.T), 1e-4);
    EXPECT_LT(std::abs(near.F - top.F), 1e-4);
  }
}

TEST(DiracCoeffs, ZeroMomentumTotalReflection) {
  auto c = dirac_coeffs(1e-6, 1.0, -1.0, 1.0);
  EXPECT_NEAR(c.B.real(), -1.0, 1e-3);
  EXPECT_NEAR(c.B.imag(), 0.0, 1e-3);
  EXPECT_FALSE(c.evanescent);
}

TEST(DiracCoeffs, ConservationAndOracle) {
  auto c = dirac_coeffs(1.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(std::norm(c.B) + std::norm(c.F), 1.0, 1e-10);
  for (double v0 : {-1.0, -2.5, 0.4, 3.0}) {
    for (double k : {0.1, 1.0, 2.5, 7.0}) {
      auto d = dirac_coeffs(k, 1.0, v0, 1.0);
      auto o = dirac_matching(k, 1.0, v0, 1.0);
      for (auto& c : o) c *= std::exp(2.0 * I * k * 1.0);
      EXPECT_NEAR(std::abs(d.B - o[0]), 0.0, 1e-10) << v0 << " " << k;
      EXPECT_NEAR(std::abs(d.C - o[1]), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(d.D - o[2]), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(d.F - o[3]), 0.0, 1e-10);
      if (!d.evanescent) {
        EXPECT_NEAR(std::norm(d.B) + std::norm(d.F), 1.0, 1e-10);
      }
    }
  }
}

TEST(DiracCoeffs, ImpedanceMatch) {
  auto c = dirac_coeffs(0.7, 1.0, 0.0, 1.0);
  EXPECT_NEAR(std::abs(c.g - 1.0), 0.0, 1e-15);
  EXPECT_EQ(c.B, cplx(0.0));
}

TEST(DiracCoeffs, EvanescentFlag) {
  // E = sqrt(0.01 + 1) < m* = 3.
  auto c = dirac_coeffs(0.1, 1.0, 2.0, 1.0);
  EXPECT_TRUE(c.evanescent);
  EXPECT_GT(c.kprime.imag(), 0.0);
  EXPECT_NEAR(std::norm(c.B) + std::norm(c.F), 1.0, 1e-12);
  EXPECT_LT(std::norm(c.F), 1e-5);
  auto o = dirac_matching(0.1, 1.0, 2.0, 1.0);
  EXPECT_NEAR(std::abs(c.B - o[0] * std::exp(0.2 * I)), 0.0, 1e-10);
}

TEST(PacketQuadrature, FreeClosedFormDirect) {
  PacketSpec1D p{0.5, 1.0, -10.0, 1.0};
  PotentialSpec none{PotentialKind::square, 0.0, 1.0};
  BackwardPacketQuadrature q(p, none, 3.0, -20.0, 20.0, 64);
  EXPECT_FALSE(q.uses_fresnel());
  for (double x = -20.0; x <= 20.0; x += 0.25) {
    cplx exact = free_packet_closed_form(p, x, 3.0);
    EXPECT_NEAR(std::abs(q(x) - exact), 0.0, 1e-8) << x;
  }
}

TEST(PacketQuadrature, FreeClosedFormFresnel) {
  PacketSpec1D p{0.5, 0.4, -60.0, 40.0};
  PotentialSpec none{PotentialKind::square, 0.0, 1.0};
  const double t = 1.2e7;
  BackwardPacketQuadrature q(p, none, t, -1.5e5, 1.5e5, 64);
  EXPECT_TRUE(q.uses_fresnel());
  double peak = std::abs(free_packet_closed_form(p, p.x0 + p.q0 / p.mass * t, t));
  for (double x = -1.5e5; x <= 1.5e5; x += 997.0) {
    cplx exact = free_packet_closed_form(p, x, t);
    EXPECT_NEAR(std::abs(q(x) - exact), 0.0, 1e-8 * peak) << x;
  }
}

TEST(PacketQuadrature, FresnelAgreesWithBruteForce) {
  // Moderate time where a dense direct k-integral is still affordable in the test.
  PacketSpec1D p{0.5, 1.0, -10.0, 1.0};
  PotentialSpec well{PotentialKind::square, -1.0, 1.0};
  const double t = 60.0, tau = t / 2.0;
  BackwardPacketQuadrature q(p, well, t, -80.0, -2.0, 64);
  ASSERT_TRUE(q.uses_fresnel());
  auto rule = specfun::composite_gauss_legendre(40, 1.0 - 12.0, 1.0 + 12.0, 6000);
  std::vector<cplx> Fk(rule.nodes.size());
  for (std::size_t j = 0; j < Fk.size(); ++j) Fk[j] = schrodinger_coeffs(rule.nodes[j], p.mass, well.v0, well.w).F;
  for (double x : {-80.0, -61.3, -40.0, -25.5, -12.0, -2.0}) {
    cplx ref = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      double k = rule.nodes[j];
      cplx F = Fk[j];
      cplx phi = std::exp(I * k * (x - p.x0)) + F * std::exp(-I * k * (x + p.x0 + 2.0 * well.w));
      ref += rule.weights[j] * phi * std::exp(-p.sigma * p.sigma * (k - p.q0) * (k - p.q0) - I * k * k * tau);
    }
    EXPECT_NEAR(std::abs(q(x) - ref), 0.0, 1e-9) << x;
  }
}

TEST(PacketQuadrature, ConvergenceUnderDoubling) {
  PacketSpec1D p{0.5, 0.4, -60.0, 40.0};
  PotentialSpec well{PotentialKind::square, -1.0, 1.0};
  BackwardPacketQuadrature q(p, well, 1.2e7, -1.5e5, -2.0, 64);
  for (double x : {-1.4e5, -6e4, -1e4, -500.0}) {
    auto v = q.evaluate(x);
    EXPECT_LE(v.delta, 1e-8);
  }
}

TEST(PacketQuadrature, Preconditions) {
  PacketSpec1D p{0.5, 0.4, -60.0, 40.0};
  PotentialSpec well{PotentialKind::square, -1.0, 1.0};
  EXPECT_THROW(packet_backward_quadrature(p, well, 0.0, 10.0), ConfigError);
  EXPECT_THROW(packet_backward_quadrature(p, well, -5.0, 10.0, 32), ConfigError);
  EXPECT_THROW(packet_backward_quadrature(p, PotentialSpec{PotentialKind::gaussian, 0.2, 1.0}, -5.0, 10.0),
               ConfigError);
}

TEST(PacketQuadrature, InitialPacketShape) {
  PacketSpec1D p{0.7, 2.0, -5.0, 3.0};
  PotentialSpec well{PotentialKind::square, -1.0, 1.0};
  // Far from the well at t = 0 the reflected term is negligible.
  BackwardPacketQuadrature q(p, well, 0.0, -12.0, -1.5, 64);
  for (double x = -9.0; x <= -1.5; x += 0.5) {
    cplx expect = std::sqrt(specfun::pi) / p.sigma *
                  std::exp(I * p.q0 * (x - p.x0) - (x - p.x0) * (x - p.x0) / (4.0 * p.sigma * p.sigma));
    EXPECT_NEAR(std::abs(q.incoming(x) - expect), 0.0, 1e-10);
  }
}

TEST(DiracQuadrature, InitialPacketMatchesDefinition) {
  // t = 0, free: U(x) = int W(k) e^{ik(x-x0)} dk evaluated by brute force.
  // The weight decays only like e^{-0.21 k} for k > 0 here.
  PacketSpec1D p{0.5, 1.0, -10.0, 1.0};
  auto rule = specfun::composite_gauss_legendre(32, -80.0, 250.0, 2000);
  for (double x : {-12.0, -10.0, -9.3, -7.0}) {
    cplx U = 0.0, V = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      double k = rule.nodes[j], E = std::hypot(k, p.mass);
      cplx e = rule.weights[j] * dirac_weight(p, k) * std::exp(I * k * (x - p.x0));
      U += e;
      V += e * I * k / (E + p.mass);
    }
    auto s = dirac_free_packet(p, x, 0.0);
    EXPECT_NEAR(std::abs(s.U - U), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(s.V - V), 0.0, 1e-10);
  }
}

TEST(DiracQuadrature, NonrelativisticLimitMatchesSchrodinger) {
  PacketSpec1D p{1.0, 1.0, -20.0, 100.0};
  PotentialSpec well{PotentialKind::square, -0.5, 1.0};
  const double t = 2000.0;
  BackwardPacketQuadrature q(p, well, t, -40.0, -1.5, 64);
  double maxpsi = 0.0, maxdiff = 0.0;
  for (double x = -40.0; x <= -1.5; x += 0.5) {
    double s = std::abs(q(x));
    double d = std::abs(dirac_packet_quadrature(p, well, x, t).U);
    maxpsi = std::max(maxpsi, s);
    maxdiff = std::max(maxdiff, std::abs(d - s));
  }
  EXPECT_GT(maxpsi, 0.0);
  EXPECT_LE(maxdiff, 0.01 * maxpsi);
}

TEST(DiracQuadrature, Norm) {
  PacketSpec1D p{1.0, 0.5, 0.0, 1.0};
  // Position-space check of Parseval.
  auto rule = specfun::composite_gauss_legendre(32, -30.0, 30.0, 60);
  double s = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    auto v = dirac_free_packet(p, rule.nodes[j], 0.0);
    s += rule.weights[j] * (std::norm(v.U) + std::norm(v.V));
  }
  EXPECT_NEAR(s / dirac_packet_norm2(p), 1.0, 1e-8);
  PacketSpec1D nr{0.5, 1.0, 0.0, 1.0};
  EXPECT_NEAR(packet_norm2(nr), specfun::pi * std::sqrt(2.0 * specfun::pi) / 0.5, 1e-12);
}
