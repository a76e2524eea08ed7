#pragma once

#include <cmath>
#include <complex>

#include "wpdiff/errors.hpp"
#include "wpdiff/model.hpp"
#include "wpdiff/specfun.hpp"

// Long-time closed forms for the backward wave of a packet hitting a short-range
// potential, in the k -> 0 limit where the reflection amplitude is -1.

namespace wpdiff {

/// |psi| = prefactor * e^{-z} * sqrt(sin^2(sin_arg_real) + sinh^2(sin_arg_imag)).
struct AsymptoticPattern {
  double amplitude_prefactor = 0.0; // 2 sqrt(2 m pi / t)
  double z = 0.0;                   // sigma^2 (m^2 (x^2 + x0^2) / t^2 + q0^2)
  double sin_arg_real = 0.0;        // m x x0 / t
  double sin_arg_imag = 0.0;        // 2 sigma^2 q0 m x / t

  double amplitude() const {
    const double s = std::sin(sin_arg_real);
    const double sh = std::sinh(sin_arg_imag);
    return amplitude_prefactor * std::exp(-z) * std::sqrt(s * s + sh * sh);
  }
};

namespace detail {
inline void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("asymptotic forms require t > 0");
}

inline cplx long_time_gaussian(const PacketSpec1D& p, double shift, double drift_sign, double x, double t) {
  using specfun::I;
  const double m = p.mass;
  const double s2 = p.sigma * p.sigma;
  const cplx alpha = s2 + I * (t / (2.0 * m));
  const double d = x + shift;
  const double c = d - drift_sign * p.q0 * t / m;
  const cplx u = I * (m / (2.0 * t)) * d * d - (m * m * s2 / (t * t)) * c * c;
  return std::sqrt(specfun::pi / alpha) * std::exp(u);
}
} // namespace detail

/// Incoming (D-term) packet at long times.
inline cplx psi_in_asymptotic(const PacketSpec1D& packet, double x, double t) {
  detail::require_positive_time(t);
  return detail::long_time_gaussian(packet, -packet.x0, 1.0, x, t);
}

struct AsymptoticValue {
  cplx psi;
  /// t >> 2 m sigma^2 and |x| >> |x0| >> w, each ">>" read as a factor of 10.
  bool in_validity_regime = false;
};

inline bool asymptotic_validity(const PacketSpec1D& p, const PotentialSpec& well, double x, double t) {
  constexpr double much = 10.0;
  return t >= much * 2.0 * p.mass * p.sigma * p.sigma && std::abs(x) >= much * std::abs(p.x0) &&
         std::abs(p.x0) >= much * well.w;
}

/// Reflected packet at long times, including the zero-momentum reflection
/// amplitude F = -1, so that psi_in + psi_refl is the full backward wave.
inline AsymptoticValue psi_refl_asymptotic(const PacketSpec1D& packet, const PotentialSpec& well, double x, double t) {
  detail::require_positive_time(t);
  const cplx g = detail::long_time_gaussian(packet, packet.x0, -1.0, x, t);
  return {-g, asymptotic_validity(packet, well, x, t)};
}

inline AsymptoticPattern asymptotic_pattern(const PacketSpec1D& p, double x, double t) {
  detail::require_positive_time(t);
  const double m = p.mass;
  const double s2 = p.sigma * p.sigma;
  AsymptoticPattern a;
  a.amplitude_prefactor = 2.0 * std::sqrt(2.0 * m * specfun::pi / t);
  a.z = s2 * (m * m * (x * x + p.x0 * p.x0) / (t * t) + p.q0 * p.q0);
  a.sin_arg_real = m * x * p.x0 / t;
  a.sin_arg_imag = 2.0 * s2 * p.q0 * m * x / t;
  return a;
}

inline double pattern_amplitude(const PacketSpec1D& packet, double x, double t) {
  return asymptotic_pattern(packet, x, t).amplitude();
}

/// Spacing of the zeros of the sin factor, pi t / (m |x0|).
inline double predict_peak_spacing(const PacketSpec1D& p, double t) {
  detail::require_positive_time(t);
  if (p.x0 == 0.0) throw ConfigError("predict_peak_spacing: undefined for x0 = 0");
  return specfun::pi * t / (p.mass * std::abs(p.x0));
}

/// Largest momentum that still reflects with F close to -1, taken as 1/(2w).
inline double k_max_estimate(const PotentialSpec& well) { return 1.0 / (2.0 * well.w); }

/// sinh/|sin| at a maximum of the sin factor, with the sinh argument taken at
/// k_max: sinh(2 sigma^2 q0 k_max). Above 1 the sinh background fills the zeros.
inline double blur_ratio(const PacketSpec1D& p, const PotentialSpec& well) {
  return std::sinh(2.0 * p.sigma * p.sigma * p.q0 * k_max_estimate(well));
}

/// Momentum-space extent of the pattern at time t: |x| <= t k_max / m.
inline double pattern_half_width(const PacketSpec1D& p, const PotentialSpec& well, double t) {
  return t * k_max_estimate(well) / p.mass;
}

} // namespace wpdiff
