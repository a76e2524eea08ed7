#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "wpdiff/errors.hpp"
#include "wpdiff/evolve_schrodinger.hpp"
#include "wpdiff/model.hpp"
#include "wpdiff/specfun.hpp"
#include "wpdiff/stationary1d.hpp"

// Crank-Nicolson evolution of the 1D Dirac equation with a scalar potential,
// gamma_0 = sigma_z, gamma_1 = sigma_z sigma_x, written as
//   i d/dt (U, V) = H (U, V),  H = -i sigma_y d/dx + sigma_z (m + S(x)).
// Componentwise: i U_t = -V_x + (m + S) U,  i V_t = U_x - (m + S) V.

namespace wpdiff {

struct SpinorField1D {
  GridSpec grid;
  std::vector<cplx> U;
  std::vector<cplx> V;
  double t = 0.0;
  double mass = 1.0;

  double dx() const { return grid.dx(); }
  std::size_t size() const { return U.size(); }
};

/// Largest dt allowed by (m + max|S|) dt <= 0.1.
inline double max_dirac_dt(double mass, const PotentialSpec& pot) { return 0.1 / (mass + pot.max_abs()); }

/// Momentum bound of the lower quarter of the Brillouin zone, pi / (4 dx).
inline double dirac_bandwidth_limit(const GridSpec& grid) { return specfun::pi / (4.0 * grid.dx()); }

/// Distance from x0 beyond which the initial packet is below ~1e-14:
/// 12 sigma for the Gaussian core, 32/m for the e^{-m|x|} tails.
inline double dirac_packet_radius(const PacketSpec1D& p) { return 12.0 * p.sigma + 32.0 / p.mass; }

inline void check_dirac_bandwidth(const GridSpec& grid, const PacketSpec1D& p) {
  const double top = std::abs(p.q0) + 6.0 / (2.0 * p.sigma);
  if (!(top < dirac_bandwidth_limit(grid))) {
    throw ConfigError("packet momenta up to " + std::to_string(top) + " exceed pi/(4 dx) = " +
                      std::to_string(dirac_bandwidth_limit(grid)) + "; refine the grid");
  }
}

inline void check_dirac_dt(double dt, double mass, const PotentialSpec& pot) {
  if (!(std::abs(dt) <= max_dirac_dt(mass, pot) * (1.0 + 1e-12))) {
    throw ConfigError("Dirac time step " + std::to_string(dt) + " violates (m + max|S|) dt <= 0.1");
  }
}

/// A relativistic packet reaches at most |x0| + t + radius.
inline void check_dirac_domain(const GridSpec& grid, const PacketSpec1D& p, double t) {
  const double reach = std::abs(p.x0) + t + 6.0 * p.sigma;
  if (grid.xmin > -reach || grid.xmax < reach) {
    throw ConfigError("grid too small for the Dirac run: the packet reaches |x| = " + std::to_string(reach));
  }
}

namespace detail {

inline std::vector<double> spinor_density(const SpinorField1D& f) {
  std::vector<double> rho(f.size());
  for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = std::norm(f.U[j]) + std::norm(f.V[j]);
  return rho;
}

} // namespace detail

inline double probability_in(const SpinorField1D& field, double a, double b) {
  return detail::trapezoid_between(field.grid, detail::spinor_density(field), a, b);
}

/// rho = int (|U|^2 + |V|^2) dx over the whole grid.
inline double density(const SpinorField1D& field) { return probability_in(field, field.grid.xmin, field.grid.xmax); }

/// U = int W(k) e^{ik(x - x0)} dk, V = int ik/(E + m) W(k) e^{ik(x - x0)} dk with
/// W(k) = exp(-2 sigma^2 (E E0 - k q0 - m^2)), sampled on the grid and scaled
/// so that rho = 1. The k-trapezoid spacing puts the periodic images of the
/// packet beyond its radius; samples further than the radius from x0 are zero.
inline SpinorField1D init_dirac_gaussian(const GridSpec& grid, const PacketSpec1D& packet) {
  validate(grid);
  const auto p = validate(packet).value;
  const double radius = dirac_packet_radius(p);
  if (p.x0 - 6.0 * p.sigma < grid.xmin || p.x0 + 6.0 * p.sigma > grid.xmax) {
    throw ConfigError("packet support x0 +- 6 sigma lies outside the grid");
  }
  check_dirac_bandwidth(grid, p);

  const auto n = static_cast<std::size_t>(grid.nx);
  SpinorField1D f{grid, std::vector<cplx>(n), std::vector<cplx>(n), 0.0, p.mass};
  const double dx = grid.dx();
  const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil((p.x0 - radius - grid.xmin) / dx)));
  const auto last = static_cast<std::size_t>(
      std::min(static_cast<double>(n - 2), std::floor((p.x0 + radius - grid.xmin) / dx)));
  if (first > last) throw ConfigError("packet does not overlap the grid interior");

  const auto win = detail::dirac_window(p);
  const double period = 3.0 * radius;
  const double dk = 2.0 * specfun::pi / period;
  const auto nodes = static_cast<std::size_t>(std::ceil((win.hi - win.lo) / dk)) + 1;
  const double m = p.mass;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double k = win.lo + static_cast<double>(i) * dk;
    const double E = std::hypot(k, m);
    const double wgt = dirac_weight(p, k);
    const cplx lower = specfun::I * k / (E + m);
    const cplx step = detail::cis(k * dx);
    cplx z;
    for (std::size_t j = first; j <= last; ++j) {
      if ((j - first) % 128 == 0) z = detail::cis(k * (grid.x(j) - p.x0));
      f.U[j] += wgt * z;
      f.V[j] += wgt * lower * z;
      z *= step;
    }
  }
  const double c = 1.0 / std::sqrt(density(f));
  for (std::size_t j = 0; j < n; ++j) {
    f.U[j] *= c;
    f.V[j] *= c;
  }
  return f;
}

/// Cayley step (1 + i H dt/2) psi' = (1 - i H dt/2) psi with centred first
/// differences, solved as a block-tridiagonal system with 2x2 blocks.
class DiracPropagator {
public:
  DiracPropagator(const GridSpec& grid, const PotentialSpec& pot, double mass, double dt)
      : n_(static_cast<std::size_t>(grid.nx)), dt_(dt) {
    validate(grid);
    validate(pot);
    if (!(mass > 0.0)) throw ConfigError("propagator: mass must be positive");
    if (!std::isfinite(dt) || dt == 0.0) throw ConfigError("propagator: dt must be finite and non-zero");
    check_dirac_dt(dt, mass, pot);
    const double dx = grid.dx();
    const cplx ith = specfun::I * (0.5 * dt);
    const cplx c = ith / (2.0 * dx);
    const auto s = detail::sample_potential(grid, pot);
    const std::size_t m = n_ - 2;
    std::vector<specfun::Block2> diag(m), lower(m - 1, {0.0, c, -c, 0.0}), upper(m - 1, {0.0, -c, c, 0.0});
    rhs_mass_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const cplx a = ith * (mass + s[i + 1]);
      diag[i] = {1.0 + a, 0.0, 0.0, 1.0 - a};
      rhs_mass_[i] = a;
    }
    rhs_c_ = c;
    factor_ = specfun::BlockTridiagonalFactor(std::move(lower), std::move(diag), std::move(upper));
    wu_.resize(m);
    wv_.resize(m);
  }

  double dt() const noexcept { return dt_; }

  void advance(std::span<cplx> U, std::span<cplx> V) {
    if (U.size() != n_ || V.size() != n_) throw ConfigError("propagator: field length does not match the grid");
    const std::size_t m = n_ - 2;
    for (std::size_t i = 0; i < m; ++i) {
      const cplx a = rhs_mass_[i];
      wu_[i] = (1.0 - a) * U[i + 1] + rhs_c_ * (V[i + 2] - V[i]);
      wv_[i] = (1.0 + a) * V[i + 1] - rhs_c_ * (U[i + 2] - U[i]);
    }
    factor_.solve_in_place(wu_, wv_, 1e-150);
    std::copy(wu_.begin(), wu_.end(), U.begin() + 1);
    std::copy(wv_.begin(), wv_.end(), V.begin() + 1);
    U[0] = U[n_ - 1] = V[0] = V[n_ - 1] = 0.0;
  }

  void step(SpinorField1D& field) {
    advance(field.U, field.V);
    field.t += dt_;
  }

private:
  std::size_t n_;
  double dt_;
  std::vector<cplx> rhs_mass_;
  cplx rhs_c_;
  specfun::BlockTridiagonalFactor factor_;
  std::vector<cplx> wu_, wv_;
};

inline SpinorField1D step(SpinorField1D field, const PotentialSpec& scalar_pot) {
  DiracPropagator prop(field.grid, scalar_pot, field.mass, field.grid.dt);
  prop.step(field);
  return field;
}

struct DiracEvolveResult {
  SpinorField1D final;
  std::vector<SpinorField1D> snapshots;
  std::vector<NormSample> norm_series;
};

inline DiracEvolveResult evolve(SpinorField1D field, const PotentialSpec& scalar_pot, double until,
                                const std::vector<double>& snapshot_times = {}, std::size_t norm_every = 0) {
  DiracPropagator prop(field.grid, scalar_pot, field.mass, field.grid.dt);
  DiracEvolveResult r;
  detail::drive(
      field, prop.dt(), until, snapshot_times, norm_every, [&](SpinorField1D& f) { prop.advance(f.U, f.V); },
      [](const SpinorField1D& f) { return density(f); }, r.snapshots, r.norm_series);
  r.final = std::move(field);
  return r;
}

} // namespace wpdiff
