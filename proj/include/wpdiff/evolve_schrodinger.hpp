#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "wpdiff/errors.hpp"
#include "wpdiff/model.hpp"
#include "wpdiff/specfun.hpp"

// Crank-Nicolson evolution of the 1D Schroedinger equation
//   i d/dt psi = -(1/2m) psi'' + V(x) psi
// on a uniform grid with hard walls at both ends.

namespace wpdiff {

struct WaveField1D {
  GridSpec grid;
  std::vector<cplx> psi;
  double t = 0.0;
  double mass = 1.0;

  double dx() const { return grid.dx(); }
  std::size_t size() const { return psi.size(); }
};

/// One sample of a conserved-density time series.
struct NormSample {
  double t = 0.0;
  double norm = 0.0;
};

/// dt = m dx^2.
inline double default_schrodinger_dt(const GridSpec& grid, double mass) { return mass * grid.dx() * grid.dx(); }

namespace detail {

/// Cell average of the potential over [x - dx/2, x + dx/2] for the square
/// kind (so the discrete well has the exact width); point value otherwise.
inline double sample_potential(const PotentialSpec& pot, double x, double dx) {
  if (pot.kind != PotentialKind::square) return pot(x);
  const double lo = std::max(x - 0.5 * dx, -pot.w);
  const double hi = std::min(x + 0.5 * dx, pot.w);
  return hi > lo ? pot.v0 * (hi - lo) / dx : 0.0;
}

/// Sets amplitudes below 1e-150 to zero. Far from the packet the implicit
/// solve leaves values that decay into the subnormal range, which is slow.
inline void flush_tiny(std::span<cplx> v) {
  constexpr double tiny = 1e-150;
  for (auto& z : v)
    if (std::abs(z.real()) < tiny && std::abs(z.imag()) < tiny) z = 0.0;
}

inline std::vector<double> sample_potential(const GridSpec& grid, const PotentialSpec& pot) {
  std::vector<double> v(static_cast<std::size_t>(grid.nx));
  const double dx = grid.dx();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = sample_potential(pot, grid.x(j), dx);
  return v;
}

inline void require_support(const GridSpec& grid, const PacketSpec1D& p) {
  validate(grid);
  validate(p);
  if (p.x0 - 6.0 * p.sigma < grid.xmin || p.x0 + 6.0 * p.sigma > grid.xmax) {
    throw ConfigError("packet support x0 +- 6 sigma lies outside the grid");
  }
}

inline void require_interval(const GridSpec& grid, double a, double b) {
  if (!(a < b) || a < grid.xmin || b > grid.xmax) {
    throw ConfigError("probability_in requires xmin <= a < b <= xmax");
  }
}

/// Integral over [a, b] of the piecewise-linear interpolant of the samples f.
inline double trapezoid_between(const GridSpec& grid, const std::vector<double>& f, double a, double b) {
  require_interval(grid, a, b);
  const double dx = grid.dx();
  const auto last = f.size() - 1;
  auto at = [&](double x) {
    const double s = std::clamp((x - grid.xmin) / dx, 0.0, static_cast<double>(last));
    const auto j = std::min(static_cast<std::size_t>(s), last - 1);
    const double u = s - static_cast<double>(j);
    return std::pair{j, (1.0 - u) * f[j] + u * f[j + 1]};
  };
  const auto [ja, fa] = at(a);
  const auto [jb, fb] = at(b);
  if (ja == jb) return 0.5 * (fa + fb) * (b - a);
  double sum = 0.5 * (fa + f[ja + 1]) * (grid.x(ja + 1) - a);
  for (std::size_t j = ja + 1; j < jb; ++j) sum += 0.5 * (f[j] + f[j + 1]) * dx;
  sum += 0.5 * (f[jb] + fb) * (b - grid.x(jb));
  return sum;
}

} // namespace detail

/// Samples C exp(i q0 (x - x0) - (x - x0)^2 / 4 sigma^2), with C fixing the
/// discrete norm to 1. The wall samples are zero.
inline WaveField1D init_gaussian(const GridSpec& grid, const PacketSpec1D& packet) {
  detail::require_support(grid, packet);
  WaveField1D f{grid, std::vector<cplx>(static_cast<std::size_t>(grid.nx)), 0.0, packet.mass};
  const double s4 = 4.0 * packet.sigma * packet.sigma;
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 < f.psi.size(); ++j) {
    const double d = grid.x(j) - packet.x0;
    f.psi[j] = std::polar(std::exp(-d * d / s4), packet.q0 * d);
    sum += std::norm(f.psi[j]);
  }
  const double c = 1.0 / std::sqrt(sum * grid.dx());
  for (auto& z : f.psi) z *= c;
  return f;
}

inline double probability_in(const WaveField1D& field, double a, double b) {
  std::vector<double> rho(field.psi.size());
  for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = std::norm(field.psi[j]);
  return detail::trapezoid_between(field.grid, rho, a, b);
}

inline double norm(const WaveField1D& field) { return probability_in(field, field.grid.xmin, field.grid.xmax); }

/// Half-width a hard-walled domain centred on 0 needs so that the packet,
/// including momenta five standard deviations out, stays off the walls until t.
inline double required_half_extent(const PacketSpec1D& p, double t) {
  return std::abs(p.x0) + (std::abs(p.q0) + 5.0 / (2.0 * p.sigma)) * t / p.mass + 6.0 * p.sigma;
}

inline void check_domain(const GridSpec& grid, const PacketSpec1D& p, double t) {
  const double reach = required_half_extent(p, t);
  if (grid.xmin > -reach || grid.xmax < reach) {
    throw ConfigError("grid [" + std::to_string(grid.xmin) + ", " + std::to_string(grid.xmax) +
                      "] too small: the packet reaches |x| = " + std::to_string(reach) + " by t = " +
                      std::to_string(t));
  }
}

/// (1 + i H dt/2) psi' = (1 - i H dt/2) psi with the three-point Laplacian.
/// The left-hand matrix is factored once.
class SchrodingerPropagator {
public:
  SchrodingerPropagator(const GridSpec& grid, const PotentialSpec& pot, double mass, double dt)
      : n_(static_cast<std::size_t>(grid.nx)), dt_(dt) {
    validate(grid);
    validate(pot);
    if (!(mass > 0.0)) throw ConfigError("propagator: mass must be positive");
    if (!std::isfinite(dt) || dt == 0.0) throw ConfigError("propagator: dt must be finite and non-zero");
    const double dx = grid.dx();
    const double kappa = 1.0 / (2.0 * mass * dx * dx);
    const cplx ith = specfun::I * (0.5 * dt);
    const auto v = detail::sample_potential(grid, pot);
    const std::size_t m = n_ - 2;
    std::vector<cplx> diag(m), off(m - 1, -ith * kappa);
    rhs_diag_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double h = 2.0 * kappa + v[i + 1];
      diag[i] = 1.0 + ith * h;
      rhs_diag_[i] = 1.0 - ith * h;
    }
    rhs_off_ = ith * kappa;
    factor_ = specfun::TridiagonalFactor(off, diag, off);
    work_.resize(m);
  }

  double dt() const noexcept { return dt_; }

  /// Advances the samples by one step; psi[0] and psi[n-1] stay zero.
  void advance(std::span<cplx> psi) {
    if (psi.size() != n_) throw ConfigError("propagator: field length does not match the grid");
    const std::size_t m = n_ - 2;
    for (std::size_t i = 0; i < m; ++i) {
      work_[i] = rhs_diag_[i] * psi[i + 1] + rhs_off_ * (psi[i] + psi[i + 2]);
    }
    factor_.solve_in_place(work_);
    detail::flush_tiny(work_);
    std::copy(work_.begin(), work_.end(), psi.begin() + 1);
    psi[0] = psi[n_ - 1] = 0.0;
  }

  void step(WaveField1D& field) {
    advance(field.psi);
    field.t += dt_;
  }

private:
  std::size_t n_;
  double dt_;
  std::vector<cplx> rhs_diag_;
  cplx rhs_off_;
  specfun::TridiagonalFactor factor_;
  std::vector<cplx> work_;
};

/// One step with dt = field.grid.dt. Refactors the matrix on every call; use
/// SchrodingerPropagator for long runs.
inline WaveField1D step(WaveField1D field, const PotentialSpec& pot) {
  SchrodingerPropagator prop(field.grid, pot, field.mass, field.grid.dt);
  prop.step(field);
  return field;
}

struct EvolveResult {
  WaveField1D final;
  std::vector<WaveField1D> snapshots;
  std::vector<NormSample> norm_series;
};

namespace detail {

inline std::size_t step_count(double from, double to, double dt) {
  return static_cast<std::size_t>(std::llround((to - from) / dt));
}

/// Shared driver for both evolvers: Field has a `t` member, Prop advances it.
template <class Field, class Advance, class Norm>
void drive(Field& field, double dt, double until, const std::vector<double>& snapshot_times,
           std::size_t norm_every, Advance&& advance, Norm&& norm_of, std::vector<Field>& snapshots,
           std::vector<NormSample>& series) {
  if (!(until >= field.t)) throw ConfigError("evolve: until must not precede the field time");
  const double t0 = field.t;
  const std::size_t total = step_count(t0, until, dt);
  std::vector<std::size_t> marks;
  for (double ts : snapshot_times) {
    if (ts < t0 || ts > until) throw ConfigError("evolve: snapshot time outside [t, until]");
    marks.push_back(std::min(step_count(t0, ts, dt), total));
  }
  if (!std::is_sorted(marks.begin(), marks.end())) throw ConfigError("evolve: snapshot times must be ordered");
  if (norm_every == 0) norm_every = std::max<std::size_t>(1, total / 1000);

  std::size_t next = 0;
  auto record = [&](std::size_t n) {
    field.t = t0 + static_cast<double>(n) * dt;
    while (next < marks.size() && marks[next] == n) {
      snapshots.push_back(field);
      ++next;
    }
    if (n % norm_every == 0 || n == total) series.push_back({field.t, norm_of(field)});
  };
  record(0);
  for (std::size_t n = 1; n <= total; ++n) {
    advance(field);
    record(n);
  }
}

} // namespace detail

/// Evolves to `until` (rounded to a whole number of steps). Snapshots are the
/// fields at the steps nearest the requested times; the norm is recorded
/// every `norm_every` steps (0 picks about a thousand samples).
inline EvolveResult evolve(WaveField1D field, const PotentialSpec& pot, double until,
                           const std::vector<double>& snapshot_times = {}, std::size_t norm_every = 0) {
  SchrodingerPropagator prop(field.grid, pot, field.mass, field.grid.dt);
  EvolveResult r;
  detail::drive(
      field, prop.dt(), until, snapshot_times, norm_every, [&](WaveField1D& f) { prop.advance(f.psi); },
      [](const WaveField1D& f) { return norm(f); }, r.snapshots, r.norm_series);
  r.final = std::move(field);
  return r;
}

} // namespace wpdiff
