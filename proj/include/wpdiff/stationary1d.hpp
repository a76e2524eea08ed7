#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "wpdiff/errors.hpp"
#include "wpdiff/model.hpp"
#include "wpdiff/specfun.hpp"

// Stationary square-well scattering and the momentum-space packet integral
//   psi(x, t) = int phi(k, x) a(k) exp(-i k^2 t / 2m) dk,  a(k) = exp(-sigma^2 (k - q0)^2)
// in the backward region x < -w. a(k) is not normalised; see packet_norm2().

namespace wpdiff {

/// Backward-region stationary solution for a square potential of half-width w:
///   phi = D e^{ik(x-x0)} + F e^{-ik(x+x0+2w)}   (x < -w)
///   phi = T e^{ik(x-x0)}                        (x > w)
/// kprime = sqrt(k^2 - 2 m v0); for a well (v0 < 0) this is sqrt(k^2 + 2m|v0|).
struct SchrodingerCoeffs {
  double k = 0.0;
  cplx kprime;
  cplx D{1.0, 0.0};
  cplx E;
  cplx A;
  cplx F;
  cplx T;
};

inline SchrodingerCoeffs schrodinger_coeffs(double k, double m, double v0, double w) {
  if (!(m > 0.0) || !(w > 0.0)) throw ConfigError("schrodinger_coeffs: m and w must be positive");
  using specfun::I;
  SchrodingerCoeffs c;
  c.k = k;
  const cplx K = std::sqrt(cplx(k * k - 2.0 * m * v0, 0.0));
  c.kprime = K;
  // With s = e^{4iK'w} every quantity stays bounded for evanescent K'.
  const cplx s = std::exp(4.0 * I * K * w);
  const cplx den = (k + K) * (k + K) - (k - K) * (k - K) * s;
  const double scale = std::norm(cplx(std::abs(k) + std::abs(K)));
  if (k != 0.0 && std::abs(K) < 1e-9 * (std::abs(k) + 1.0 / w)) {
    // Barrier top, k^2 = 2 m v0: F and T have finite limits as K' -> 0.
    const cplx q = 1.0 - I * k * w;
    c.F = -I * k * w / q;
    c.T = std::exp(-2.0 * I * k * w) / q;
  } else {
    if (std::abs(den) <= 1e-14 * scale) throw PoleError("schrodinger_coeffs: degenerate denominator A");
    c.F = -(k * k - K * K) * (s - 1.0) / den;
    c.T = 4.0 * k * K * std::exp(I * (2.0 * K * w - 2.0 * k * w)) / den;
  }
  c.E = -2.0 * I * (k * k - K * K) * std::sin(2.0 * K * w);
  c.A = (k + K) * (k + K) * std::exp(-2.0 * I * K * w) - (k - K) * (k - K) * std::exp(2.0 * I * K * w);
  return c;
}

/// Dirac scalar-potential square well. B, C, D, F are the printed closed forms;
/// they refer the outer waves to the well edges, so the upper component reads
///   x < -w:  e^{ikx} + B e^{-ik(x+2w)}
///   |x| < w: (C e^{ik'x} + D e^{-ik'x}) e^{-2ikw}
///   x > w:   F e^{ik(x-2w)}
/// with lower component (ik/(E+m)) (...) outside and (ik'/(E+m*)) (...) inside.
/// mstar = m + v0 (a well of depth V0 has v0 = -V0).
struct DiracCoeffs {
  double k = 0.0;
  double E_rel = 0.0;
  double mstar = 0.0;
  cplx kprime;
  cplx g;
  cplx B, C, D, F;
  cplx Delta;
  bool evanescent = false;
};

inline DiracCoeffs dirac_coeffs(double k, double m, double v0, double w) {
  if (!(m > 0.0) || !(w > 0.0)) throw ConfigError("dirac_coeffs: m and w must be positive");
  using specfun::I;
  DiracCoeffs c;
  c.k = k;
  c.E_rel = std::sqrt(k * k + m * m);
  c.mstar = m + v0;
  const double E = c.E_rel;
  c.kprime = std::sqrt(cplx(E * E - c.mstar * c.mstar, 0.0));
  c.evanescent = E < std::abs(c.mstar);
  if (k == 0.0) {
    // Zero-momentum limit: total reflection.
    c.g = cplx(INFINITY, 0.0);
    c.B = -1.0;
    return c;
  }
  if (std::abs(E + c.mstar) <= 1e-14 * E) throw PoleError("dirac_coeffs: E + m* vanishes");
  const cplx kp = c.kprime;
  const cplx g = kp * (E + m) / (k * (E + c.mstar));
  c.g = g;
  const cplx e1 = std::exp(I * k * w);
  const cplx e3 = std::exp(I * kp * w);
  // Divide numerators and Delta by e4^2 = e^{-2ik'w}; s = e3^2 / e4^2.
  const cplx s = e3 * e3 * e3 * e3;
  const cplx den = s * (1.0 - g) * (1.0 - g) - (1.0 + g) * (1.0 + g);
  if (std::abs(den) <= 1e-14 * std::norm(1.0 + std::abs(g))) throw PoleError("dirac_coeffs: degenerate Delta");
  c.B = (1.0 - g * g) * (s - 1.0) / den;
  c.C = -2.0 * e1 * (1.0 + g) * e3 / den;
  c.D = 2.0 * e1 * (1.0 - g) * e3 * e3 * e3 / den;
  c.F = -4.0 * g * e3 * e3 / den;
  const cplx e4 = std::exp(-I * kp * w);
  c.Delta = e3 * e3 * (1.0 - g) * (1.0 - g) - e4 * e4 * (1.0 + g) * (1.0 + g);
  return c;
}

/// Closed-form free packet: int a(k) e^{ik(x-x0) - ik^2 t/2m} dk.
inline cplx free_packet_closed_form(const PacketSpec1D& p, double x, double t) {
  using specfun::I;
  const double s2 = p.sigma * p.sigma;
  const cplx alpha = s2 + I * (t / (2.0 * p.mass));
  const cplx b = 2.0 * s2 * p.q0 + I * (x - p.x0);
  return std::sqrt(specfun::pi / alpha) * std::exp(b * b / (4.0 * alpha) - s2 * p.q0 * p.q0);
}

/// int |psi(x, 0)|^2 dx for the unnormalised packet int a(k) e^{ik(x-x0)} dk.
inline double packet_norm2(const PacketSpec1D& p) {
  return specfun::pi * std::sqrt(2.0 * specfun::pi) / p.sigma;
}

/// Dirac momentum weight exp(-2 sigma^2 (E E0 - k q0 - m^2)).
inline double dirac_weight(const PacketSpec1D& p, double k) {
  const double m = p.mass;
  const double E = std::hypot(k, m);
  const double E0 = std::hypot(p.q0, m);
  return std::exp(-2.0 * p.sigma * p.sigma * (E * E0 - k * p.q0 - m * m));
}

/// Exponent of the weight at which the momentum integrals are truncated (e^-32 ~ 1.3e-14).
inline constexpr double kWeightCutoffExponent = 32.0;
/// Relative change allowed when doubling the node count.
inline constexpr double kQuadratureTolerance = 1e-8;

namespace detail {

struct KWindow {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  double max_abs() const { return std::max(std::abs(lo), std::abs(hi)); }
};

inline KWindow gaussian_window(const PacketSpec1D& p) {
  const double L = std::sqrt(kWeightCutoffExponent) / p.sigma;
  return {p.q0 - L, p.q0 + L};
}

inline KWindow dirac_window(const PacketSpec1D& p) {
  auto expo = [&](double k) { return -std::log(dirac_weight(p, k)); };
  auto edge = [&](double dir) {
    double step = 1.0 / p.sigma;
    double a = p.q0, b = p.q0 + dir * step;
    while (expo(b) < kWeightCutoffExponent) {
      a = b;
      step *= 2.0;
      b = p.q0 + dir * step;
    }
    for (int i = 0; i < 200 && std::abs(b - a) > 1e-12 * (1.0 + std::abs(a)); ++i) {
      const double mid = 0.5 * (a + b);
      (expo(mid) < kWeightCutoffExponent ? a : b) = mid;
    }
    return b;
  };
  return {edge(-1.0), edge(1.0)};
}

inline cplx cis(double phase) { return {std::cos(phase), std::sin(phase)}; }

/// sum_j w_j e^{i(a + j d)} by a multiplicative recurrence, reseeded every 128 terms.
inline cplx phased_sum(const std::vector<cplx>& w, double a, double d) {
  cplx sum = 0.0;
  const cplx step = cis(d);
  cplx z;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (j % 128 == 0) z = cis(a + static_cast<double>(j) * d);
    sum += w[j] * z;
    z *= step;
  }
  return sum;
}

/// Uniform trapezoid grid on [lo, hi] whose spacing resolves phase rate `rate`
/// with `per_radian` nodes per radian. The integrands vanish (to ~1e-14) at the
/// ends, so the rule converges spectrally.
struct UniformGrid {
  double start;
  double step;
  std::size_t count;
  double at(std::size_t j) const { return start + static_cast<double>(j) * step; }
};

inline UniformGrid uniform_grid(double lo, double hi, double rate, double per_radian) {
  const double n = std::ceil((hi - lo) * std::max(rate, 1.0 / (hi - lo)) * per_radian) + 16.0;
  if (n > 5e7) throw ConvergenceError("oscillatory integral needs too many nodes", n);
  const auto count = static_cast<std::size_t>(n) + 1;
  return {lo, (hi - lo) / static_cast<double>(count - 1), count};
}

/// One oscillatory term  int G0(k) e^{i(kX - tau k^2)} dk  over a fixed window,
/// for X in [-xmax_abs, xmax_abs]. Either direct k-quadrature or, when tau is
/// large, the exact Fresnel factorisation through g(y) = (1/2pi) int G0 e^{iky} dk:
///   int dy g(y) sqrt(pi/(i tau)) e^{i(X - y)^2 / (4 tau)}.
/// nk sets the sampling density (nk/32 nodes per radian of phase).
class OscillatoryTerm {
public:
  OscillatoryTerm(const std::function<cplx(double)>& G0, KWindow win, double tau, double xmax_abs,
                  double g0_rate, int nk)
      : tau_(tau) {
    const double per_rad = nk / 32.0;
    // The envelope term keeps the periodic images of the packet (spacing 2pi/dk) out of range.
    const double envelope = 24.0 * std::sqrt(kWeightCutoffExponent) / win.width();
    const double direct_rate = xmax_abs + 2.0 * tau * win.max_abs() + g0_rate + envelope;
    fresnel_ = win.width() * direct_rate * per_rad > kDirectNodeLimit && tau > 0.0;
    if (!fresnel_) {
      grid_ = uniform_grid(win.lo, win.hi, direct_rate, per_rad);
      weights_.resize(grid_.count);
      for (std::size_t j = 0; j < grid_.count; ++j) {
        const double k = grid_.at(j);
        weights_[j] = grid_.step * G0(k) * cis(-tau * k * k);
      }
      return;
    }
    build_fresnel(G0, win, xmax_abs, g0_rate, per_rad);
  }

  cplx operator()(double X) const {
    if (!fresnel_) return phased_sum(weights_, grid_.start * X, grid_.step * X);
    const double inv4t = 1.0 / (4.0 * tau_);
    const cplx sum = phased_sum(weights_, -2.0 * X * grid_.start * inv4t, -2.0 * X * grid_.step * inv4t);
    return std::sqrt(specfun::pi / (specfun::I * tau_)) * cis(X * X * inv4t) * sum;
  }

  bool uses_fresnel() const noexcept { return fresnel_; }
  std::size_t node_count() const noexcept { return grid_.count; }

private:
  static constexpr double kDirectNodeLimit = 20000.0;
  static constexpr double kTailRatio = 1e-13;

  void build_fresnel(const std::function<cplx(double)>& G0, KWindow win, double xmax_abs, double g0_rate,
                     double per_rad) {
    // Grow the y-range until g has decayed at both ends.
    double Y = 24.0 * std::sqrt(kWeightCutoffExponent) / win.width() + g0_rate; // 12 sigma
    for (int attempt = 0;; ++attempt) {
      if (attempt > 40) throw ConvergenceError("oscillatory term: g(y) tail does not decay", Y);
      const auto kg = uniform_grid(win.lo, win.hi, Y + g0_rate, per_rad);
      std::vector<cplx> kw(kg.count);
      for (std::size_t j = 0; j < kg.count; ++j) kw[j] = kg.step * G0(kg.at(j)) / (2.0 * specfun::pi);
      auto g = [&](double y) { return phased_sum(kw, kg.start * y, kg.step * y); };
      double core = 0.0, tail = 0.0;
      constexpr int probes = 64;
      for (int i = 0; i <= probes; ++i) {
        const double y = Y * (static_cast<double>(i) / probes);
        const double a = std::max(std::abs(g(y)), std::abs(g(-y)));
        core = std::max(core, a);
        if (i >= 3 * probes / 4) tail = std::max(tail, a);
      }
      if (tail > kTailRatio * core) {
        Y *= 1.5;
        continue;
      }
      const double rate = win.max_abs() + (xmax_abs + Y) / (2.0 * tau_);
      grid_ = uniform_grid(-Y, Y, rate, per_rad);
      weights_.resize(grid_.count);
      for (std::size_t n = 0; n < grid_.count; ++n) {
        const double y = grid_.at(n);
        weights_[n] = grid_.step * g(y) * cis(y * y / (4.0 * tau_));
      }
      return;
    }
  }

  double tau_;
  bool fresnel_ = false;
  UniformGrid grid_{0.0, 0.0, 0};
  std::vector<cplx> weights_;
};

inline void require_square(const PotentialSpec& v) {
  if (v.kind != PotentialKind::square) throw ConfigError("stationary solution requires a square potential");
  if (!(v.w > 0.0)) throw ConfigError("potential.w must be positive");
}

inline double convergence_scale(const PacketSpec1D& p, double t) {
  const cplx alpha(p.sigma * p.sigma, t / (2.0 * p.mass));
  return std::sqrt(specfun::pi / std::abs(alpha));
}

} // namespace detail

/// Evaluates the backward-region packet integral at many x in [x_lo, x_hi]
/// for fixed t. Two node densities (nk and 2nk) are kept; every
/// evaluation checks that they agree to kQuadratureTolerance.
class BackwardPacketQuadrature {
public:
  BackwardPacketQuadrature(const PacketSpec1D& packet, const PotentialSpec& well, double t, double x_lo, double x_hi,
                           int nk = 64)
      : packet_(validate(packet).value), well_(well), t_(t), x_lo_(x_lo), x_hi_(x_hi) {
    detail::require_square(well);
    if (nk < 64) throw ConfigError("packet quadrature requires nk >= 64");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("packet quadrature requires finite t >= 0");
    if (!(x_lo <= x_hi)) throw ConfigError("packet quadrature requires x_lo <= x_hi");
    if (well.v0 != 0.0 && !(x_hi < -well.w)) throw ConfigError("packet quadrature is valid only for x < -w");
    const auto win = detail::gaussian_window(packet_);
    const double tau = t / (2.0 * packet_.mass);
    const double w = well.w;
    const double xabs = std::max(std::abs(x_lo), std::abs(x_hi));
    const double in_max = xabs + std::abs(packet_.x0);
    const double refl_max = xabs + std::abs(packet_.x0) + 2.0 * w;
    auto a = [p = packet_](double k) { return std::exp(-p.sigma * p.sigma * (k - p.q0) * (k - p.q0)); };
    auto Fa = [p = packet_, well](double k) {
      if (well.v0 == 0.0) return cplx(0.0);
      return schrodinger_coeffs(k, p.mass, well.v0, well.w).F * std::exp(-p.sigma * p.sigma * (k - p.q0) * (k - p.q0));
    };
    const double refl_rate = 4.0 * w + 4.0;
    for (int level = 0; level < 2; ++level) {
      const int n = nk << level;
      in_.emplace_back(a, win, tau, in_max, 0.0, n);
      refl_.emplace_back(Fa, win, tau, refl_max, refl_rate, n);
    }
    scale_ = detail::convergence_scale(packet_, t);
  }

  struct Value {
    cplx psi;
    double delta;
  };

  Value evaluate(double x) const {
    if (x < x_lo_ || x > x_hi_) throw ConfigError("packet quadrature: x outside the prepared range");
    const double X_in = x - packet_.x0;
    const double X_refl = -(x + packet_.x0 + 2.0 * well_.w);
    const cplx coarse = in_[0](X_in) + refl_[0](X_refl);
    const cplx fine = in_[1](X_in) + refl_[1](X_refl);
    const double delta = std::abs(fine - coarse) / std::max(std::abs(fine), scale_);
    if (!(delta <= kQuadratureTolerance))
      throw ConvergenceError("packet quadrature did not converge at x = " + std::to_string(x), delta);
    return {fine, delta};
  }

  cplx operator()(double x) const { return evaluate(x).psi; }

  /// Incoming (D) term alone, at the fine level.
  cplx incoming(double x) const { return in_[1](x - packet_.x0); }
  cplx reflected(double x) const { return refl_[1](-(x + packet_.x0 + 2.0 * well_.w)); }

  bool uses_fresnel() const noexcept { return in_[0].uses_fresnel(); }

private:
  PacketSpec1D packet_;
  PotentialSpec well_;
  double t_;
  double x_lo_, x_hi_;
  double scale_ = 1.0;
  std::vector<detail::OscillatoryTerm> in_;
  std::vector<detail::OscillatoryTerm> refl_;
};

inline cplx packet_backward_quadrature(const PacketSpec1D& packet, const PotentialSpec& well, double x, double t,
                                       int nk = 64) {
  return BackwardPacketQuadrature(packet, well, t, x, x, nk)(x);
}

struct SpinorValue {
  cplx U;
  cplx V;
};

/// Dirac packet in the backward region:
///   U = int phi1(k, x) e^{-ik x0} W(k) e^{-iEt} dk,  V likewise with phi2,
///   W(k) = exp(-2 sigma^2 (E E0 - k q0 - m^2)).
/// Direct trapezoid quadrature at density nk, checked against 2nk.
inline SpinorValue dirac_packet_quadrature(const PacketSpec1D& packet, const PotentialSpec& well, double x, double t,
                                           int nk = 64) {
  const auto p = validate(packet).value;
  detail::require_square(well);
  if (nk < 64) throw ConfigError("packet quadrature requires nk >= 64");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("packet quadrature requires finite t >= 0");
  if (well.v0 != 0.0 && !(x < -well.w)) throw ConfigError("packet quadrature is valid only for x < -w");
  const auto win = detail::dirac_window(p);
  const double m = p.mass;
  // 12 sigma covers the Gaussian core, 32/m the e^{-m|x|} tails of the relativistic packet.
  const double envelope = 12.0 * p.sigma + kWeightCutoffExponent / m;
  double rate = std::abs(x - p.x0) + t + envelope;
  if (well.v0 != 0.0) rate = std::max(rate, std::abs(x + p.x0 + 2.0 * well.w) + t + 4.0 * well.w + envelope);
  auto integrate = [&](int n) {
    const auto grid = detail::uniform_grid(win.lo, win.hi, rate, n / 32.0);
    SpinorValue s{0.0, 0.0};
    for (std::size_t j = 0; j < grid.count; ++j) {
      const double k = grid.at(j);
      const double E = std::hypot(k, m);
      cplx B = 0.0;
      if (well.v0 != 0.0) B = dirac_coeffs(k, m, well.v0, well.w).B * detail::cis(-2.0 * k * well.w);
      const cplx fwd = detail::cis(k * x);
      const cplx bwd = detail::cis(-k * x);
      const cplx common = grid.step * dirac_weight(p, k) * detail::cis(-k * p.x0 - E * t);
      s.U += common * (fwd + B * bwd);
      s.V += common * (specfun::I * k / (E + m)) * (fwd - B * bwd);
    }
    return s;
  };
  const auto coarse = integrate(nk);
  const auto fine = integrate(2 * nk);
  const double mag = std::max({std::abs(fine.U), std::abs(fine.V), detail::convergence_scale(p, t)});
  const double delta = std::max(std::abs(fine.U - coarse.U), std::abs(fine.V - coarse.V)) / mag;
  if (!(delta <= kQuadratureTolerance))
    throw ConvergenceError("Dirac packet quadrature did not converge at x = " + std::to_string(x), delta);
  return fine;
}

inline SpinorValue dirac_free_packet(const PacketSpec1D& packet, double x, double t, int nk = 64) {
  return dirac_packet_quadrature(packet, PotentialSpec{PotentialKind::square, 0.0, 1.0}, x, t, nk);
}

/// int (|U|^2 + |V|^2) dx of the unnormalised Dirac packet, by Parseval.
inline double dirac_packet_norm2(const PacketSpec1D& packet) {
  const auto p = validate(packet).value;
  const auto win = detail::dirac_window(p);
  const auto panels = static_cast<std::size_t>(std::ceil(win.width() * p.sigma)) + 8;
  auto rule = specfun::composite_gauss_legendre(32, win.lo, win.hi, panels);
  double s = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double k = rule.nodes[j];
    const double E = std::hypot(k, p.mass);
    const double wgt = dirac_weight(p, k);
    s += rule.weights[j] * wgt * wgt * (1.0 + k * k / ((E + p.mass) * (E + p.mass)));
  }
  return 2.0 * specfun::pi * s;
}

} // namespace wpdiff
