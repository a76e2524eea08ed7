#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <thread>
#include <vector>

#include "wpdiff/errors.hpp"
#include "wpdiff/model.hpp"
#include "wpdiff/specfun.hpp"

// Gaussian packet scattered by a spherical square well V = -V0 for r < w,
// in the s-wave, long-time description. Throughout, alpha = sigma^2 + i t / 2m.

namespace wpdiff {

struct ComplexDisplacement {
  cplx value;
  /// The vector square was a negative real number; the result is the
  /// purely imaginary root with positive imaginary part.
  bool on_branch_cut = false;
};

/// sqrt(sum_j (r_j - r0_j - 2 i sigma^2 q0_j)^2), principal branch (Re >= 0).
/// No conjugation: the "length" of a complex 3-vector.
inline ComplexDisplacement complex_displacement(const Vec3& r, const Vec3& r0, double sigma, const Vec3& q0) {
  cplx sq = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const cplx c(r[j] - r0[j], -2.0 * sigma * sigma * q0[j]);
    sq += c * c;
  }
  const bool cut = sq.imag() == 0.0 && sq.real() < 0.0;
  if (cut) return {cplx(0.0, std::sqrt(-sq.real())), true};
  return {std::sqrt(sq), false};
}

/// d = |r0 + 2 i sigma^2 q0| in the same vector sense.
inline cplx packet_d(const PacketSpec3D& p) { return complex_displacement({0.0, 0.0, 0.0}, p.r0, p.sigma, p.q0).value; }

namespace detail {

inline cplx alpha3(const PacketSpec3D& p, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("3D forms require finite t >= 0");
  return cplx(p.sigma * p.sigma, t / (2.0 * p.mass));
}

/// (pi / alpha)^{3/2} on the principal branch.
inline cplx gaussian_prefactor(cplx alpha) { return std::exp(1.5 * std::log(specfun::pi / alpha)); }

inline double q0_squared(const PacketSpec3D& p) { return p.q0[0] * p.q0[0] + p.q0[1] * p.q0[1] + p.q0[2] * p.q0[2]; }

inline void require_well(const PotentialSpec& well) {
  validate(well);
  if (well.kind != PotentialKind::square) throw ConfigError("3D scattering requires a square well");
  if (well.v0 > 0.0) throw ConfigError("3D scattering covers wells only (v0 <= 0)");
}

inline cplx checked(cplx z, const char* what) {
  if (!specfun::detail::finite(z)) throw OverflowError(std::string(what) + ": value not representable");
  return z;
}

/// Shared pieces at a point. With c = r0 + 2 i sigma^2 q0 (so d^2 = c.c) every
/// Gaussian exponent is -(r^2 + d^2)/(4 alpha) plus a term linear in r. At large
/// t the quadratic part has a phase of order m r^2 / 2t, far beyond 2 pi, so it
/// is kept apart as a unit phasor and multiplied in last: terms sharing it keep
/// their relative phases to rounding.
struct Frame {
  cplx alpha;
  cplx prefactor;  // (pi/alpha)^{3/2} e^{-q0^2 sigma^2}
  cplx phase;      // e^{i Im Y}
  double re_y;     // Re Y,  Y = -(r^2 + d^2)/(4 alpha)
  cplx d;

  /// e^{Y + s}
  cplx gauss(cplx s) const { return phase * std::exp(re_y + s); }
};

inline Frame frame(const PacketSpec3D& p, double r2, double t) {
  Frame f;
  f.alpha = alpha3(p, t);
  f.d = packet_d(p);
  f.prefactor = gaussian_prefactor(f.alpha) * std::exp(-q0_squared(p) * p.sigma * p.sigma);
  const cplx y = -(r2 + f.d * f.d) / (4.0 * f.alpha);
  f.phase = std::polar(1.0, std::remainder(y.imag(), 2.0 * specfun::pi));
  f.re_y = y.real();
  return f;
}

inline cplx dot_c(const PacketSpec3D& p, const Vec3& r) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < 3; ++j) s += r[j] * cplx(p.r0[j], 2.0 * p.sigma * p.sigma * p.q0[j]);
  return s;
}

inline double norm2(const Vec3& r) { return r[0] * r[0] + r[1] * r[1] + r[2] * r[2]; }

/// e^{-D^2/(4 alpha)}, the exact incoming wave without its prefactor.
inline cplx incoming_exact(const PacketSpec3D& p, const Frame& f, const Vec3& r) {
  return f.gauss(dot_c(p, r) / (2.0 * f.alpha));
}

/// e^{-D^2/(4 alpha)} erfc(-i D / sqrt(alpha)).
inline cplx incoming_erfc(const PacketSpec3D& p, const Frame& f, const Vec3& r) {
  const cplx z = -specfun::I * complex_displacement(r, p.r0, p.sigma, p.q0).value / std::sqrt(f.alpha);
  const cplx lin = dot_c(p, r) / (2.0 * f.alpha);
  // erfc(z) = e^{-z^2} w(iz) for Re z >= 0, else 2 - e^{-z^2} w(-iz).
  if (z.real() >= 0.0) return checked(f.gauss(lin - z * z) * specfun::faddeeva_w(specfun::I * z), "psi_in_3d");
  const cplx tail = f.gauss(lin - z * z) * specfun::faddeeva_w(-specfun::I * z);
  return checked(2.0 * f.gauss(lin) - tail, "psi_in_3d");
}

} // namespace detail

/// Exact free packet  int d^3k e^{-(k - q0)^2 sigma^2 - i k.r0 - i k^2 t / 2m} e^{i k.r}
///   = (pi/alpha)^{3/2} e^{y1},  y1 = -D^2 / (4 alpha) - q0^2 sigma^2.
inline cplx psi_in_3d_exact(const PacketSpec3D& packet, const Vec3& r, double t) {
  const auto p = validate(packet).value;
  const auto f = detail::frame(p, detail::norm2(r), t);
  return f.prefactor * detail::incoming_exact(p, f, r);
}

/// The incoming wave in its erfc form:
///   (pi/alpha)^{3/2} e^{y1} erfc(-i D / sqrt(alpha)).
/// For sqrt|alpha| << |D| << |alpha| / sigma the erfc factor is close to 2, so
/// this is about twice psi_in_3d_exact there; beyond |alpha| / sigma it grows.
inline cplx psi_in_3d(const PacketSpec3D& packet, const Vec3& r, double t) {
  const auto p = validate(packet).value;
  const auto f = detail::frame(p, detail::norm2(r), t);
  return f.prefactor * detail::incoming_erfc(p, f, r);
}

/// u0 = w (1 - tan(kappa w) / (kappa w)), kappa = sqrt(2 m |V0|).
inline double scattering_length(double mass, double v0, double w) {
  if (!(mass > 0.0) || !(w > 0.0)) throw ConfigError("scattering_length: mass and w must be positive");
  const double y = std::sqrt(2.0 * mass * std::abs(v0)) * w;
  if (y < 1e-3) {
    const double y2 = y * y;
    return -w * y2 * (1.0 / 3.0 + y2 * (2.0 / 15.0 + y2 * 17.0 / 315.0));
  }
  if (std::abs(std::cos(y)) < 1e-10) {
    throw PoleError("scattering_length: kappa w is at a zero-energy resonance (tan pole)");
  }
  return w * (1.0 - std::tan(y) / y);
}

/// Low-momentum phase shift of partial wave l:
///   tan d_l = -(k w)^{2l+1} / ((2l-1)!! (2l+1)!!) (z_l - l) / (z_l + l + 1),
///   z_l = x j_l'(x) / j_l(x),  x = sqrt(k^2 + 2 m |V0|) w.
/// Returns d_l in (-pi/2, pi/2].
inline double phase_shift(int l, double k, double mass, double v0, double w) {
  if (l < 0) throw ConfigError("phase_shift: l must be non-negative");
  if (!(k > 0.0) || !(mass > 0.0) || !(w > 0.0)) throw ConfigError("phase_shift: k, mass and w must be positive");
  const double x = std::sqrt(k * k + 2.0 * mass * std::abs(v0)) * w;
  const double z = specfun::bessel_log_derivative(l, x);
  double dfact = 1.0;
  for (int n = 2 * l + 1; n > 1; n -= 2) dfact *= n;             // (2l+1)!!
  for (int n = 2 * l - 1; n > 1; n -= 2) dfact *= n;             // (2l-1)!!
  const double den = z + l + 1.0;
  const double num = -std::pow(k * w, 2 * l + 1) / dfact * (z - l);
  if (den == 0.0) return specfun::pi / 2.0;
  const double d = std::atan(num / den);
  return d == -specfun::pi / 2.0 ? specfun::pi / 2.0 : d;
}

/// The small-momentum expansion behind phase_shift is trusted for k w <= 0.5.
inline bool phase_shift_in_regime(double k, double w) { return k * w <= 0.5; }

struct SWaveResult {
  double u0 = 0.0;
  cplx d;
  cplx lambda1;
  cplx lambda2;
  cplx psi_scatt;
  /// Higher partial waves are suppressed by |w / sqrt(alpha)|^l; true when
  /// that factor is at most 1%.
  bool l0_dominant = false;
};

/// How the e^{lambda^2} erfc(-lambda) factors are evaluated.
enum class ErfcEvaluation { full, long_distance };

/// s-wave scattered packet:
///   -(u0/d) (pi/alpha)^{3/2} e^{-q0^2 sigma^2}
///     ((r+d)/2r e^{l1^2} erfc(-l1) - (r-d)/2r e^{l2^2} erfc(-l2)),
///   l1,2 = i (r +- d) / (2 sqrt(alpha)).
/// e^{l^2} erfc(-l) = w(-i l) is evaluated without overflow; long_distance
/// replaces erfc by 2.
namespace detail {

inline SWaveResult swave(const PacketSpec3D& p, const PotentialSpec& well, const Frame& f, double r,
                         ErfcEvaluation mode) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("psi_scatt_swave: r must be positive");
  SWaveResult s;
  s.u0 = scattering_length(p.mass, well.v0, well.w);
  s.d = f.d;
  if (s.d == 0.0) throw ConfigError("psi_scatt_swave: d = 0 (packet centred on the well with q0 = 0)");
  const cplx sa = std::sqrt(f.alpha);
  s.lambda1 = specfun::I * (r + s.d) / (2.0 * sa);
  s.lambda2 = specfun::I * (r - s.d) / (2.0 * sa);
  s.l0_dominant = std::abs(well.w / sa) <= 0.01;
  // e^{lambda^2} erfc(-lambda): w(-i lambda) when Re(-lambda) >= 0, otherwise
  // 2 e^{lambda^2} - w(i lambda); e^{lambda^2} = e^{Y -+ r d / (2 alpha)}.
  auto scaled = [&](cplx lam, double sign) {
    const cplx g = 2.0 * f.gauss(-sign * r * s.d / (2.0 * f.alpha));
    if (mode == ErfcEvaluation::long_distance) return g;
    if (lam.real() <= 0.0) return specfun::faddeeva_w(-specfun::I * lam);
    return g - specfun::faddeeva_w(specfun::I * lam);
  };
  const cplx bracket =
      (r + s.d) / (2.0 * r) * scaled(s.lambda1, 1.0) - (r - s.d) / (2.0 * r) * scaled(s.lambda2, -1.0);
  s.psi_scatt = checked(-(s.u0 / s.d) * f.prefactor * bracket, "psi_scatt_swave");
  return s;
}

} // namespace detail

inline SWaveResult psi_scatt_swave(const PacketSpec3D& packet, const PotentialSpec& well, double r, double t,
                                   ErfcEvaluation mode = ErfcEvaluation::full) {
  const auto p = validate(packet).value;
  detail::require_well(well);
  return detail::swave(p, well, detail::frame(p, r * r, t), r, mode);
}

/// Which incoming wave the backward closed form is built on.
enum class IncomingForm { erfc_form, exact };

/// Long-time backward wave at distance r from the well on the side the packet
/// comes from (zero impact parameter: r0 antiparallel to q0). With erfc -> 2
/// and |r| >> |d|, psi_in + psi_scatt reduces to
///   (pi/alpha)^{3/2} e^{x} (A e^{-i m r d / t} - B e^{i m r d / t}),
///   x = -q0^2 sigma^2 - r^2 m^2 sigma^2 / t^2 + i m r^2 / 2t,
/// A = c + u0/d (c = 2 for the erfc incoming form, 1 for the exact one),
/// B = u0/d. Equivalently -2i e^{a} sin(m r d / t + i g) with
/// e^{2a} = A B and e^{2g} = A / B.
inline cplx backward_pattern_3d(const PacketSpec3D& packet, const PotentialSpec& well, double r, double t,
                                IncomingForm form = IncomingForm::erfc_form) {
  const auto p = validate(packet).value;
  detail::require_well(well);
  if (!(r > 0.0) || !(t > 0.0)) throw ConfigError("backward_pattern_3d requires r > 0 and t > 0");
  const double rr = std::sqrt(p.r0[0] * p.r0[0] + p.r0[1] * p.r0[1] + p.r0[2] * p.r0[2]);
  const double qq = std::sqrt(detail::q0_squared(p));
  if (rr == 0.0) throw ConfigError("backward_pattern_3d: r0 = 0 has no backward direction");
  if (qq > 0.0) {
    const Vec3 cr{p.r0[1] * p.q0[2] - p.r0[2] * p.q0[1], p.r0[2] * p.q0[0] - p.r0[0] * p.q0[2],
                  p.r0[0] * p.q0[1] - p.r0[1] * p.q0[0]};
    const double cross = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]);
    const double dot = p.r0[0] * p.q0[0] + p.r0[1] * p.q0[1] + p.r0[2] * p.q0[2];
    if (cross > 1e-12 * rr * qq || dot > 0.0) {
      throw ConfigError("backward_pattern_3d requires zero impact parameter (q0 pointing from r0 to the well)");
    }
  }
  const cplx d = packet_d(p);
  if (d == 0.0) throw ConfigError("backward_pattern_3d: d = 0");
  const double m = p.mass, s2 = p.sigma * p.sigma;
  const double u0 = scattering_length(m, well.v0, well.w);
  const cplx B = u0 / d;
  const cplx A = (form == IncomingForm::erfc_form ? 2.0 : 1.0) + B;
  const double phase = std::remainder(m * r * r / (2.0 * t), 2.0 * specfun::pi);
  const cplx ex = std::exp(cplx(-qq * qq * s2 - r * r * m * m * s2 / (t * t), phase));
  const cplx beta = -specfun::I * m * r * d / t;
  const cplx pref = detail::gaussian_prefactor(detail::alpha3(p, t));
  return detail::checked(pref * ex * (A * std::exp(beta) - B * std::exp(-beta)), "backward_pattern_3d");
}

/// Sampling plane: points origin + a e1 + b e2.
struct MapPlane {
  Vec3 origin{0.0, 0.0, 0.0};
  Vec3 e1{1.0, 0.0, 0.0};
  Vec3 e2{0.0, 1.0, 0.0};
};

inline MapPlane z_plane(double z) { return {{0.0, 0.0, z}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}; }

struct FieldMapSpec {
  MapPlane plane;
  double a_min = -1.0, a_max = 1.0;
  double b_min = -1.0, b_max = 1.0;
  int na = 2, nb = 2;

  double a(int i) const { return na == 1 ? a_min : a_min + (a_max - a_min) * i / (na - 1); }
  double b(int j) const { return nb == 1 ? b_min : b_min + (b_max - b_min) * j / (nb - 1); }
};

struct FieldMap {
  FieldMapSpec spec;
  double t = 0.0;
  /// |alpha|^{3/2} |psi|, row-major: values[j * na + i] at (a(i), b(j)).
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * spec.na + i]; }
};

/// |psi_in + psi_scatt| on a plane, rescaled by |alpha|^{3/2} to remove the
/// overall spreading decay. Rows are split over `threads` workers; the output
/// does not depend on the thread count.
inline FieldMap field_map(const PacketSpec3D& packet, const PotentialSpec& well, const FieldMapSpec& spec, double t,
                          unsigned threads = 1, IncomingForm form = IncomingForm::erfc_form) {
  const auto p = validate(packet).value;
  validate(well);
  if (spec.na < 1 || spec.nb < 1) throw ConfigError("field_map: resolution must be positive");
  const double scale = std::pow(std::abs(detail::alpha3(p, t)), 1.5);
  FieldMap out{spec, t, std::vector<double>(static_cast<std::size_t>(spec.na) * spec.nb)};
  const bool scatter = well.v0 != 0.0;
  if (scatter) detail::require_well(well);

  auto row = [&](int j) {
    for (int i = 0; i < spec.na; ++i) {
      Vec3 r;
      for (std::size_t c = 0; c < 3; ++c)
        r[c] = spec.plane.origin[c] + spec.a(i) * spec.plane.e1[c] + spec.b(j) * spec.plane.e2[c];
      const double r2 = detail::norm2(r);
      const auto f = detail::frame(p, r2, t);
      cplx psi = f.prefactor * (form == IncomingForm::exact ? detail::incoming_exact(p, f, r)
                                                           : detail::incoming_erfc(p, f, r));
      if (scatter && r2 > 0.0) psi += detail::swave(p, well, f, std::sqrt(r2), ErfcEvaluation::full).psi_scatt;
      out.values[static_cast<std::size_t>(j) * spec.na + i] = scale * std::abs(psi);
    }
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(spec.nb)));
  if (threads == 1) {
    for (int j = 0; j < spec.nb; ++j) row(j);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int j = static_cast<int>(w); j < spec.nb; j += static_cast<int>(threads)) row(j);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

} // namespace wpdiff
