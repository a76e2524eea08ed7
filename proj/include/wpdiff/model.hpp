#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "wpdiff/errors.hpp"

// Domain types. Natural units throughout (hbar = c = 1) unless a UnitSystem
// says otherwise; see UnitSystem::laboratory() for the cm/s convention used by
// the helium-drop setup.

namespace wpdiff {

using Vec3 = std::array<double, 3>;

/// Gaussian packet exp(i q0 (x - x0) - (x - x0)^2 / (4 sigma^2)).
struct PacketSpec1D {
  double sigma = 1.0;
  double q0 = 0.0;
  double x0 = 0.0;
  double mass = 1.0;

  bool operator==(const PacketSpec1D&) const = default;
};

struct PacketSpec3D {
  double sigma = 1.0;
  Vec3 q0{0.0, 0.0, 0.0};
  Vec3 r0{0.0, 0.0, 0.0};
  double mass = 1.0;

  bool operator==(const PacketSpec3D&) const = default;
};

enum class PotentialKind { square, gaussian };

/// Signed strength: v0 < 0 is a well, v0 > 0 a barrier.
/// square:   V(x) = v0 for |x| < w (total width 2w)
/// gaussian: V(x) = v0 exp(-x^2 / w^2)
struct PotentialSpec {
  PotentialKind kind = PotentialKind::square;
  double v0 = 0.0;
  double w = 1.0;

  double operator()(double x) const {
    if (kind == PotentialKind::square) return std::abs(x) < w ? v0 : 0.0;
    return v0 * std::exp(-x * x / (w * w));
  }
  double max_abs() const { return std::abs(v0); }

  bool operator==(const PotentialSpec&) const = default;
};

/// Uniform grid x_j = xmin + j dx, j = 0..nx-1, plus time-stepping controls.
struct GridSpec {
  double xmin = -1.0;
  double xmax = 1.0;
  int nx = 3;
  double dt = 1.0;
  double t_final = 0.0;
  std::vector<double> snapshot_times;

  double dx() const { return (xmax - xmin) / (nx - 1); }
  double x(std::size_t j) const { return xmin + static_cast<double>(j) * dx(); }

  bool operator==(const GridSpec&) const = default;
};

template <class T>
struct Validated {
  T value;
  std::vector<std::string> notes;
};

inline std::string_view to_string(PotentialKind k) { return k == PotentialKind::square ? "square" : "gaussian"; }

inline PotentialKind parse_potential_kind(std::string_view s) {
  if (s == "square") return PotentialKind::square;
  if (s == "gaussian") return PotentialKind::gaussian;
  throw ConfigError("unknown potential kind '" + std::string(s) + "'");
}

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}
} // namespace detail

/// q0/m below this counts as nonrelativistic.
inline constexpr double kNonrelativisticSpeed = 0.1;

inline bool is_nonrelativistic(const PacketSpec1D& p) { return std::abs(p.q0) / p.mass < kNonrelativisticSpeed; }

inline Validated<PacketSpec1D> validate(const PacketSpec1D& p) {
  detail::require(std::isfinite(p.sigma) && p.sigma > 0.0, "packet.sigma must be positive");
  detail::require(std::isfinite(p.mass) && p.mass > 0.0, "packet.mass must be positive");
  detail::require(std::isfinite(p.q0) && std::isfinite(p.x0), "packet.q0 and packet.x0 must be finite");
  Validated<PacketSpec1D> out{p, {}};
  if (is_nonrelativistic(p)) out.notes.emplace_back("nonrelativistic");
  return out;
}

inline Validated<PacketSpec3D> validate(const PacketSpec3D& p) {
  detail::require(std::isfinite(p.sigma) && p.sigma > 0.0, "packet.sigma must be positive");
  detail::require(std::isfinite(p.mass) && p.mass > 0.0, "packet.mass must be positive");
  for (double c : p.q0) detail::require(std::isfinite(c), "packet.q0 must be finite");
  for (double c : p.r0) detail::require(std::isfinite(c), "packet.r0 must be finite");
  return {p, {}};
}

inline Validated<PotentialSpec> validate(const PotentialSpec& v) {
  detail::require(std::isfinite(v.w) && v.w > 0.0, "potential.w must be positive");
  detail::require(std::isfinite(v.v0), "potential.v0 must be finite");
  Validated<PotentialSpec> out{v, {}};
  if (v.v0 < 0.0) out.notes.emplace_back("well");
  if (v.v0 > 0.0) out.notes.emplace_back("barrier");
  return out;
}

inline Validated<GridSpec> validate(const GridSpec& g) {
  detail::require(std::isfinite(g.xmin) && std::isfinite(g.xmax) && g.xmin < g.xmax, "grid requires xmin < xmax");
  detail::require(g.nx >= 3, "grid.nx must be at least 3");
  detail::require(std::isfinite(g.dt) && g.dt > 0.0, "grid.dt must be positive");
  detail::require(std::isfinite(g.t_final) && g.t_final >= 0.0, "grid.t_final must be non-negative");
  double prev = -1.0;
  for (double t : g.snapshot_times) {
    detail::require(t >= 0.0 && t <= g.t_final, "snapshot times must lie in [0, t_final]");
    detail::require(t >= prev, "snapshot times must be ordered");
    prev = t;
  }
  return {g, {}};
}

enum class Narrowness { diffractive, marginal, single_hump };

inline std::string_view to_string(Narrowness n) {
  switch (n) {
  case Narrowness::diffractive: return "diffractive";
  case Narrowness::marginal: return "marginal";
  case Narrowness::single_hump: return "single-hump";
  }
  return "?";
}

inline constexpr double kDiffractiveMax = 0.5;
inline constexpr double kSingleHumpMin = 2.0;

/// sigma * sqrt(q0 / w): the packet must be much narrower than sqrt(w/q0) for
/// the multi-peak reflected train to survive.
inline double narrowness_ratio(const PacketSpec1D& p, const PotentialSpec& v) {
  if (!(p.q0 > 0.0)) throw ConfigError("narrowness_ratio: classification undefined for q0 <= 0");
  return p.sigma * std::sqrt(p.q0 / v.w);
}

inline Narrowness classify_narrowness(double ratio) {
  if (ratio <= kDiffractiveMax) return Narrowness::diffractive;
  if (ratio >= kSingleHumpMin) return Narrowness::single_hump;
  return Narrowness::marginal;
}

// Physical constants (CODATA 2018).
namespace constants {
inline constexpr double hbar_c_MeV_fm = 197.3269804;
inline constexpr double hbar_eV_s = 6.582119569e-16;
inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double c_m_per_s = 299792458.0;
inline constexpr double amu_MeV = 931.49410242;
inline constexpr double neutron_mass_MeV = 939.56542052;
inline constexpr double helium4_mass_amu = 4.00260325413; // atomic mass
inline constexpr double eV_J = 1.602176634e-19;
} // namespace constants

enum class Dimension { length, time, energy, mass, wavenumber };

/// Conversion between laboratory units and one natural system.
///   nuclear():    hbar = c = 1, lengths in fm (energies and masses in 1/fm)
///   laboratory(): hbar = 1, lengths in cm, times in s (energies in 1/s, masses in s/cm^2)
class UnitSystem {
public:
  static UnitSystem nuclear() { return UnitSystem(true); }
  static UnitSystem laboratory() { return UnitSystem(false); }

  bool is_nuclear() const noexcept { return nuclear_; }

  double to_natural(double value, std::string_view unit) const { return value * factor(unit); }
  double from_natural(double value, std::string_view unit) const { return value / factor(unit); }

  /// Multiplier taking a value in `unit` to this system's natural units.
  double factor(std::string_view unit) const {
    using namespace constants;
    const double c_cm_per_s = c_m_per_s * 100.0;
    // length
    const double per_fm = nuclear_ ? 1.0 : 1e-13;
    if (unit == "fm") return per_fm;
    if (unit == "nm") return per_fm * 1e6;
    if (unit == "mm") return per_fm * 1e12;
    if (unit == "cm") return per_fm * 1e13;
    if (unit == "m") return per_fm * 1e15;
    // wavenumber / momentum
    if (unit == "1/fm") return 1.0 / per_fm;
    if (unit == "1/cm") return 1.0 / (per_fm * 1e13);
    if (unit == "1/m") return 1.0 / (per_fm * 1e15);
    // time
    const double per_s = nuclear_ ? c_m_per_s * 1e15 : 1.0;
    if (unit == "s") return per_s;
    if (unit == "ms") return per_s * 1e-3;
    if (unit == "us") return per_s * 1e-6;
    // energy (E / hbar, or E / (hbar c) in the nuclear system)
    const double per_eV = nuclear_ ? 1e-6 / hbar_c_MeV_fm : 1.0 / hbar_eV_s;
    if (unit == "eV") return per_eV;
    if (unit == "keV") return per_eV * 1e3;
    if (unit == "MeV") return per_eV * 1e6;
    // mass (m c / hbar in the nuclear system, m / hbar in the laboratory one)
    const double per_eV_c2 = nuclear_ ? 1e-6 / hbar_c_MeV_fm : 1.0 / (hbar_eV_s * c_cm_per_s * c_cm_per_s);
    if (unit == "eV/c2") return per_eV_c2;
    if (unit == "MeV/c2") return per_eV_c2 * 1e6;
    if (unit == "amu") return per_eV_c2 * amu_MeV * 1e6;
    if (unit == "kg") return per_eV_c2 * c_m_per_s * c_m_per_s / eV_J;
    throw ConfigError("unknown unit tag '" + std::string(unit) + "'");
  }

  static Dimension dimension(std::string_view unit) {
    if (unit == "fm" || unit == "nm" || unit == "mm" || unit == "cm" || unit == "m") return Dimension::length;
    if (unit == "1/fm" || unit == "1/cm" || unit == "1/m") return Dimension::wavenumber;
    if (unit == "s" || unit == "ms" || unit == "us") return Dimension::time;
    if (unit == "eV" || unit == "keV" || unit == "MeV") return Dimension::energy;
    if (unit == "eV/c2" || unit == "MeV/c2" || unit == "amu" || unit == "kg") return Dimension::mass;
    throw ConfigError("unknown unit tag '" + std::string(unit) + "'");
  }

private:
  explicit UnitSystem(bool nuclear) : nuclear_(nuclear) {}
  bool nuclear_;
};

} // namespace wpdiff
