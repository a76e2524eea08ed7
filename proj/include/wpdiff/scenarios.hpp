#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wpdiff/asymptotic1d.hpp"
#include "wpdiff/errors.hpp"
#include "wpdiff/evolve_dirac.hpp"
#include "wpdiff/evolve_schrodinger.hpp"
#include "wpdiff/model.hpp"
#include "wpdiff/scatter3d.hpp"
#include "wpdiff/stationary1d.hpp"

// Figure presets, peak counting, profile comparison and the helium-drop run.

namespace wpdiff {

// ---------------------------------------------------------------------------
// Peaks

struct PeakRule {
  int window = 3;               // strictly above this many neighbours on each side
  double height_fraction = 0.05; // of the profile maximum
  double valley_fraction = 0.8;  // a valley above this fraction of the lower peak merges the two
};

struct PeakReport {
  int count = 0;
  std::vector<double> positions;
  std::vector<double> heights;
  PeakRule rule;

  std::vector<double> spacings() const {
    std::vector<double> s;
    for (std::size_t i = 1; i < positions.size(); ++i) s.push_back(positions[i] - positions[i - 1]);
    return s;
  }
};

namespace detail {

inline std::vector<std::size_t> peak_indices(std::span<const double> v, const PeakRule& rule) {
  std::vector<std::size_t> kept;
  const auto w = static_cast<std::size_t>(rule.window);
  if (v.size() < 2 * w + 1) return kept;
  const double top = *std::max_element(v.begin(), v.end());
  if (!(top > 0.0)) return kept;
  for (std::size_t i = w; i + w < v.size(); ++i) {
    if (v[i] < rule.height_fraction * top) continue;
    bool peak = true;
    for (std::size_t d = 1; d <= w && peak; ++d) peak = v[i] > v[i - d] && v[i] > v[i + d];
    if (!peak) continue;
    if (!kept.empty()) {
      const std::size_t j = kept.back();
      const double valley = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(j),
                                              v.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      if (valley > rule.valley_fraction * std::min(v[i], v[j])) {
        if (v[i] > v[j]) kept.back() = i;
        continue;
      }
    }
    kept.push_back(i);
  }
  return kept;
}

} // namespace detail

/// Peaks of a sampled profile on x = origin + i dx. A peak is strictly above its
/// three neighbours on each side and at least 5% of the maximum; two peaks
/// whose separating valley stays above 80% of the lower one count once.
inline PeakReport count_peaks(std::span<const double> profile, double dx, double origin = 0.0,
                              const PeakRule& rule = {}) {
  if (!(dx > 0.0)) throw ConfigError("count_peaks: dx must be positive");
  if (profile.size() < 7) throw ConfigError("count_peaks: profile needs at least 7 samples");
  PeakReport r;
  r.rule = rule;
  for (std::size_t i : detail::peak_indices(profile, rule)) {
    r.positions.push_back(origin + static_cast<double>(i) * dx);
    r.heights.push_back(profile[i]);
  }
  r.count = static_cast<int>(r.positions.size());
  return r;
}

// ---------------------------------------------------------------------------
// Profile comparison

struct PeakMatch {
  double position_a = 0.0;
  double position_b = 0.0;
  double offset = 0.0;        // position_b - position_a
  double relative_height = 0.0; // height_a / height_b - 1
};

struct ProfileComparison {
  double max_abs = 0.0;
  double max_relative_at_peaks = 0.0;
  double max_peak_offset = 0.0;
  std::vector<PeakMatch> matches;
  int peaks_a = 0;
  int peaks_b = 0;
};

/// Compares two profiles sampled on the same grid. Each peak of `a` is paired
/// with the nearest peak of `b`.
inline ProfileComparison compare_profiles(std::span<const double> a, std::span<const double> b, double dx,
                                          double origin = 0.0) {
  if (a.size() != b.size()) throw ConfigError("compare_profiles: profiles are not on the same grid");
  ProfileComparison c;
  for (std::size_t i = 0; i < a.size(); ++i) c.max_abs = std::max(c.max_abs, std::abs(a[i] - b[i]));
  if (a.size() < 7) return c;
  const auto pa = count_peaks(a, dx, origin), pb = count_peaks(b, dx, origin);
  c.peaks_a = pa.count;
  c.peaks_b = pb.count;
  if (pb.count == 0) return c;
  for (std::size_t i = 0; i < pa.positions.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < pb.positions.size(); ++j)
      if (std::abs(pb.positions[j] - pa.positions[i]) < std::abs(pb.positions[best] - pa.positions[i])) best = j;
    PeakMatch m{pa.positions[i], pb.positions[best], pb.positions[best] - pa.positions[i],
                pa.heights[i] / pb.heights[best] - 1.0};
    c.max_peak_offset = std::max(c.max_peak_offset, std::abs(m.offset));
    c.max_relative_at_peaks = std::max(c.max_relative_at_peaks, std::abs(m.relative_height));
    c.matches.push_back(m);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Configuration and records

enum class Mode { schrodinger1d, dirac1d, analytic1d, analytic3d, experiment };

inline std::string_view to_string(Mode m) {
  switch (m) {
  case Mode::schrodinger1d: return "schrodinger1d";
  case Mode::dirac1d: return "dirac1d";
  case Mode::analytic1d: return "analytic1d";
  case Mode::analytic3d: return "analytic3d";
  case Mode::experiment: return "experiment";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::schrodinger1d, Mode::dirac1d, Mode::analytic1d, Mode::analytic3d, Mode::experiment})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown run mode '" + std::string(s) + "'");
}

/// Detector window [position - width/2, position + width/2] sampled every
/// `interval` time units.
struct DetectorSpec {
  double position = 0.0;
  double width = 0.1;
  double interval = 1.0;

  bool operator==(const DetectorSpec&) const = default;
};

struct ScenarioConfig {
  Mode mode = Mode::schrodinger1d;
  PacketSpec1D packet;
  PacketSpec3D packet3d;
  PotentialSpec potential;
  GridSpec grid;
  std::optional<std::string> preset_name;
  std::optional<DetectorSpec> detector;
  std::optional<double> particle_count;
  /// analytic3d: sampled plane.
  FieldMapSpec map;
  /// Units the numbers are expressed in ("natural", "nuclear" or "laboratory").
  std::string units = "natural";
  /// Peak-counting window [peak_lo, peak_hi]; empty means the backward region x < -w.
  std::optional<std::pair<double, double>> peak_region;
  /// Defaulted values, echoed into reports as key=value.
  std::vector<std::pair<std::string, std::string>> assumptions;

  bool operator==(const ScenarioConfig& o) const {
    return mode == o.mode && packet == o.packet && packet3d == o.packet3d && potential == o.potential &&
           grid == o.grid && preset_name == o.preset_name && detector == o.detector &&
           particle_count == o.particle_count && map.plane.origin == o.map.plane.origin &&
           map.plane.e1 == o.map.plane.e1 && map.plane.e2 == o.map.plane.e2 && map.a_min == o.map.a_min &&
           map.a_max == o.map.a_max && map.b_min == o.map.b_min && map.b_max == o.map.b_max && map.na == o.map.na &&
           map.nb == o.map.nb && units == o.units && peak_region == o.peak_region && assumptions == o.assumptions;
  }
};

/// A sampled 1D field. V is empty for scalar fields.
struct Profile {
  std::string label;
  double t = 0.0;
  std::vector<double> x;
  std::vector<cplx> U;
  std::vector<cplx> V;

  bool spinor() const { return !V.empty(); }
  std::vector<double> abs_upper() const {
    std::vector<double> a(U.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(U[i]);
    return a;
  }
};

struct DetectorSample {
  double t = 0.0;
  double counts = 0.0;
  double total = 0.0; // expected particles over all space
};

struct RunRecord {
  ScenarioConfig config;
  std::vector<Profile> profiles;
  std::optional<FieldMap> field;
  std::vector<NormSample> norm_series;
  double drift_bound = 1e-3;
  std::optional<PeakReport> peaks;
  std::vector<DetectorSample> detector_series;
  std::optional<ProfileComparison> comparison;
  /// Further results as ordered key=value pairs.
  std::vector<std::pair<std::string, std::string>> metrics;
  double wall_seconds = 0.0;

  double max_norm_drift() const {
    double d = 0.0;
    for (const auto& s : norm_series) d = std::max(d, std::abs(s.norm - 1.0));
    return d;
  }
};

struct RunOptions {
  unsigned threads = 1;
  int nk = 64;
};

namespace detail {

inline std::string num(double v, int digits = 17) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline GridSpec symmetric_grid(double half, double dx, double dt, double t_final) {
  const auto cells = static_cast<int>(std::ceil(2.0 * half / dx));
  return GridSpec{-0.5 * cells * dx, 0.5 * cells * dx, cells + 1, dt, t_final, {}};
}

inline std::pair<double, double> backward_region(const ScenarioConfig& c) {
  if (c.peak_region) return *c.peak_region;
  return {c.grid.xmin, -c.potential.w};
}

template <class Abs>
PeakReport peaks_in(const GridSpec& g, const Abs& values, std::pair<double, double> region) {
  const double dx = g.dx();
  const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((region.first - g.xmin) / dx)));
  const auto hi = static_cast<std::size_t>(
      std::min(static_cast<double>(g.nx - 1), std::floor((region.second - g.xmin) / dx)));
  if (hi < lo + 6) throw ConfigError("peak region holds fewer than 7 samples");
  std::vector<double> v(values.begin() + static_cast<std::ptrdiff_t>(lo),
                        values.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return count_peaks(v, dx, g.x(lo));
}

inline void check_drift(const RunRecord& r) {
  if (r.max_norm_drift() > r.drift_bound) {
    throw NumericalError("norm drift " + num(r.max_norm_drift()) + " exceeds " + num(r.drift_bound));
  }
}

inline Profile profile_of(const WaveField1D& f, std::string label) {
  Profile p{std::move(label), f.t, {}, f.psi, {}};
  p.x.resize(f.size());
  for (std::size_t j = 0; j < p.x.size(); ++j) p.x[j] = f.grid.x(j);
  return p;
}

inline Profile profile_of(const SpinorField1D& f, std::string label) {
  Profile p{std::move(label), f.t, {}, f.U, f.V};
  p.x.resize(f.size());
  for (std::size_t j = 0; j < p.x.size(); ++j) p.x[j] = f.grid.x(j);
  return p;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Runs

/// Schroedinger evolution to grid.t_final with snapshots at grid.snapshot_times.
inline RunRecord run_schrodinger(const ScenarioConfig& c) {
  RunRecord r;
  r.config = c;
  check_domain(c.grid, c.packet, c.grid.t_final);
  auto field = init_gaussian(c.grid, c.packet);
  auto ev = evolve(std::move(field), c.potential, c.grid.t_final, c.grid.snapshot_times);
  for (const auto& s : ev.snapshots) r.profiles.push_back(detail::profile_of(s, "t=" + detail::num(s.t, 12)));
  r.profiles.push_back(detail::profile_of(ev.final, "final"));
  r.norm_series = std::move(ev.norm_series);
  std::vector<double> a(ev.final.size());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = std::abs(ev.final.psi[j]);
  r.peaks = detail::peaks_in(c.grid, a, detail::backward_region(c));
  detail::check_drift(r);
  return r;
}

inline RunRecord run_dirac(const ScenarioConfig& c) {
  RunRecord r;
  r.config = c;
  check_dirac_domain(c.grid, c.packet, c.grid.t_final);
  auto field = init_dirac_gaussian(c.grid, c.packet);
  auto ev = evolve(std::move(field), c.potential, c.grid.t_final, c.grid.snapshot_times);
  for (const auto& s : ev.snapshots) r.profiles.push_back(detail::profile_of(s, "t=" + detail::num(s.t, 12)));
  r.profiles.push_back(detail::profile_of(ev.final, "final"));
  r.norm_series = std::move(ev.norm_series);
  std::vector<double> a(ev.final.size());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = std::abs(ev.final.U[j]);
  r.peaks = detail::peaks_in(c.grid, a, detail::backward_region(c));
  r.metrics.emplace_back("density.final", detail::num(density(ev.final)));
  const double edge = dirac_bandwidth_limit(c.grid);
  r.metrics.emplace_back("bandwidth.edge_weight",
                         detail::num(std::max(dirac_weight(c.packet, edge), dirac_weight(c.packet, -edge))));
  detail::check_drift(r);
  return r;
}

/// Backward-region packet quadrature against the long-time closed form, on the
/// grid [grid.xmin, grid.xmax] (which must lie in x < -w) at t = grid.t_final.
inline RunRecord run_analytic1d(const ScenarioConfig& c, const RunOptions& o = {}) {
  RunRecord r;
  r.config = c;
  const double t = c.grid.t_final;
  const GridSpec& g = c.grid;
  BackwardPacketQuadrature q(c.packet, c.potential, t, g.xmin, g.xmax, o.nk);
  Profile num{"quadrature", t, {}, {}, {}}, ana{"asymptotic", t, {}, {}, {}};
  std::vector<double> a_num, a_ana;
  bool any_invalid = false;
  for (int j = 0; j < g.nx; ++j) {
    const double x = g.x(static_cast<std::size_t>(j));
    num.x.push_back(x);
    ana.x.push_back(x);
    num.U.push_back(q(x));
    const auto refl = psi_refl_asymptotic(c.packet, c.potential, x, t);
    ana.U.push_back(psi_in_asymptotic(c.packet, x, t) + refl.psi);
    any_invalid = any_invalid || !refl.in_validity_regime;
    a_num.push_back(std::abs(num.U.back()));
    a_ana.push_back(std::abs(ana.U.back()));
  }
  r.comparison = compare_profiles(a_ana, a_num, g.dx(), g.xmin);
  r.peaks = count_peaks(a_num, g.dx(), g.xmin);
  r.profiles.push_back(std::move(num));
  r.profiles.push_back(std::move(ana));
  r.metrics.emplace_back("pattern.predicted_spacing", detail::num(predict_peak_spacing(c.packet, t)));
  r.metrics.emplace_back("pattern.half_width", detail::num(pattern_half_width(c.packet, c.potential, t)));
  r.metrics.emplace_back("asymptotic.validity_everywhere", any_invalid ? "false" : "true");
  return r;
}

inline RunRecord run_analytic3d(const ScenarioConfig& c, const RunOptions& o = {}) {
  RunRecord r;
  r.config = c;
  r.field = field_map(c.packet3d, c.potential, c.map, c.grid.t_final, o.threads);
  return r;
}

// ---------------------------------------------------------------------------
// Nonrelativistic correspondence

struct CorrespondenceSample {
  double t = 0.0;
  double max_abs = 0.0;    // max_x ||U| - |psi||
  double peak = 0.0;       // max_x |psi|
  double relative() const { return max_abs / peak; }
};

/// Evolves the same packet with the Dirac (scalar potential S = V) and
/// Schroedinger solvers on one grid and compares |U| with |psi| at `times`.
/// The Dirac rest phase e^{-imt} drops out of the moduli.
inline std::vector<CorrespondenceSample> dirac_schrodinger_correspondence(const PacketSpec1D& p,
                                                                           const PotentialSpec& pot,
                                                                           const GridSpec& grid, double schrodinger_dt,
                                                                           std::vector<double> times) {
  if (times.empty()) throw ConfigError("correspondence: no comparison times");
  std::sort(times.begin(), times.end());
  const double until = times.back();
  times.pop_back();
  GridSpec gd = grid, gs = grid;
  gd.dt = std::min(grid.dt, max_dirac_dt(p.mass, pot));
  gs.dt = schrodinger_dt;
  check_domain(gs, p, until);
  auto d = evolve(init_dirac_gaussian(gd, p), pot, until, times);
  auto s = evolve(init_gaussian(gs, p), pot, until, times);
  d.snapshots.push_back(std::move(d.final));
  s.snapshots.push_back(std::move(s.final));
  std::vector<CorrespondenceSample> out;
  for (std::size_t k = 0; k < d.snapshots.size(); ++k) {
    const auto& U = d.snapshots[k].U;
    const auto& psi = s.snapshots[k].psi;
    CorrespondenceSample c{s.snapshots[k].t, 0.0, 0.0};
    for (std::size_t j = 0; j < U.size(); ++j) {
      c.max_abs = std::max(c.max_abs, std::abs(std::abs(U[j]) - std::abs(psi[j])));
      c.peak = std::max(c.peak, std::abs(psi[j]));
    }
    out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Helium drop

namespace detail {

/// Right-moving half of the momentum distribution |a(k)|^2 of a Gaussian
/// packet, normalised over all k. Midpoint nodes keep clear of k = 0 and of
/// round thresholds such as k = kappa.
template <class F>
double right_moving_average(const PacketSpec1D& p, F&& f) {
  const double spread = 1.0 / (2.0 * p.sigma);
  const double lo = std::max(0.0, p.q0 - 8.0 * spread), hi = p.q0 + 8.0 * spread;
  if (!(hi > lo)) return 0.0;
  const int n = 4001;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = lo + (i + 0.5) * h;
    const double z = (k - p.q0) / spread;
    s += std::exp(-0.5 * z * z) * f(k);
  }
  return s * h / (std::sqrt(2.0 * specfun::pi) * spread);
}

} // namespace detail

struct TransmissionEstimate {
  /// Stationary |T(k)|^2 averaged over the right-moving part of the packet.
  double fraction = 0.0;
  /// log10 of the same, valid when the barrier is opaque and `fraction`
  /// underflows: |T|^2 ~ 16 k^2 kappa^2 / (k^2 + kappa^2)^2 e^{-4 kappa w}.
  double log10_fraction = 0.0;
  /// The opaque-barrier form alone, computed in every case.
  double log10_opaque = 0.0;
  bool representable = true;
};

inline TransmissionEstimate stationary_transmission(const PacketSpec1D& p, const PotentialSpec& barrier) {
  if (barrier.kind != PotentialKind::square || barrier.v0 <= 0.0) {
    throw ConfigError("stationary_transmission requires a square barrier");
  }
  TransmissionEstimate e;
  e.fraction = detail::right_moving_average(
      p, [&](double k) { return std::norm(schrodinger_coeffs(k, p.mass, barrier.v0, barrier.w).T); });
  const double kappa = std::sqrt(2.0 * p.mass * barrier.v0);
  const double opaque = detail::right_moving_average(p, [&](double k) {
    const double kk = std::sqrt(std::max(kappa * kappa - k * k, 0.0));
    return 16.0 * k * k * kk * kk / std::pow(k * k + kk * kk, 2);
  });
  e.log10_opaque = std::log10(opaque) - 4.0 * kappa * barrier.w / std::log(10.0);
  e.representable = e.fraction > 1e-290;
  e.log10_fraction = e.representable ? std::log10(e.fraction) : e.log10_opaque;
  return e;
}

/// Default helium setup in laboratory units (cm, s, hbar = 1).
inline ScenarioConfig helium_config() {
  const auto lab = UnitSystem::laboratory();
  ScenarioConfig c;
  c.mode = Mode::experiment;
  c.units = "laboratory";
  c.preset_name = "fig10";
  c.packet = {0.5, 0.0, -3.5, lab.to_natural(constants::helium4_mass_amu, "amu")};
  c.potential = {PotentialKind::square, lab.to_natural(4.0, "eV"), 0.5};
  c.particle_count = 5e21;
  c.detector = DetectorSpec{-5.5, 0.1, 250.0};
  const double t_final = 5e4, dx = 0.02;
  c.grid = detail::symmetric_grid(required_half_extent(c.packet, t_final), dx, c.packet.mass * dx * dx, t_final);
  c.assumptions = {{"packet.q0", "0"},
                   {"packet.sigma", "0.5 cm"},
                   {"packet.x0", "-3.5 cm (3 cm before the near plate face)"},
                   {"potential.w", "0.5 cm (plate thickness 1 cm)"},
                   {"detector.position", "-5.5 cm (5 cm from the plate, on the drop side)"},
                   {"detector.interval", "250 s"},
                   {"run.t_final", "5e4 s"},
                   {"grid.dx", "0.02 cm"},
                   {"grid.dt", "m dx^2 (2.5 s)"}};
  return c;
}

/// Evolves the drop against the plate and records expected detector counts
/// N * P(detector window) and N * P(all space) every detector interval.
inline RunRecord run_experiment_helium(const ScenarioConfig& c) {
  if (!c.detector || !c.particle_count) throw ConfigError("experiment mode requires a detector and particle_count");
  const auto& det = *c.detector;
  const double N = *c.particle_count;
  if (!(N > 0.0) || !(det.width > 0.0) || !(det.interval > 0.0)) {
    throw ConfigError("experiment: particle_count, detector width and interval must be positive");
  }
  const double a = det.position - 0.5 * det.width, b = det.position + 0.5 * det.width;
  if (a < c.grid.xmin || b > c.grid.xmax) throw ConfigError("experiment: detector window outside the grid");
  check_domain(c.grid, c.packet, c.grid.t_final);

  RunRecord r;
  r.config = c;
  auto field = init_gaussian(c.grid, c.packet);
  SchrodingerPropagator prop(c.grid, c.potential, c.packet.mass, c.grid.dt);
  const double dt = prop.dt();
  const std::size_t total = detail::step_count(0.0, c.grid.t_final, dt);
  auto sample = [&] {
    const double n = norm(field);
    r.norm_series.push_back({field.t, n});
    r.detector_series.push_back({field.t, N * probability_in(field, a, b), N * n});
  };
  sample();
  double next = det.interval;
  for (std::size_t s = 1; s <= total; ++s) {
    prop.advance(field.psi);
    field.t = static_cast<double>(s) * dt;
    if (field.t + 0.5 * dt >= next || s == total) {
      sample();
      while (next <= field.t + 0.5 * dt) next += det.interval;
    }
  }
  r.profiles.push_back(detail::profile_of(field, "final"));
  const double w = c.potential.w;
  const double transmitted = probability_in(field, w, c.grid.xmax);
  r.metrics.emplace_back("transmitted.fraction", detail::num(transmitted));
  if (c.potential.kind == PotentialKind::square && c.potential.v0 > 0.0) {
    const auto est = stationary_transmission(c.packet, c.potential);
    r.metrics.emplace_back("transmitted.estimate", detail::num(est.fraction));
    r.metrics.emplace_back("transmitted.estimate_log10", detail::num(est.log10_fraction));
    r.metrics.emplace_back("transmitted.numerical_log10",
                           transmitted > 0.0 ? detail::num(std::log10(transmitted)) : "-inf");
    r.metrics.emplace_back("transmitted.representable", est.representable ? "true" : "false");
  }
  detail::check_drift(r);
  return r;
}

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
  return names;
}

inline ScenarioConfig preset_config(std::string_view name) {
  ScenarioConfig c;
  c.preset_name = std::string(name);
  if (name == "fig1") {
    c.mode = Mode::analytic1d;
    c.packet = {0.5, 0.4, -60.0, 40.0};
    c.potential = {PotentialKind::square, -1.0, 1.0};
    const double t = 1.2e7;
    const double dx = predict_peak_spacing(c.packet, t) / 8.0;
    const double reach = pattern_half_width(c.packet, c.potential, t);
    const int n = static_cast<int>(std::floor((reach - 2.0 * c.potential.w) / dx)) + 1;
    const double hi = -2.0 * c.potential.w;
    c.grid = GridSpec{hi - (n - 1) * dx, hi, n, 1.0, t, {}};
    c.assumptions = {{"grid.dx", "pi t / (8 m |x0|) (8 samples per fringe)"},
                     {"grid.range", "[-t k_max / m, -2w], k_max = 1/(2w)"}};
    return c;
  }
  if (name == "fig4" || name == "fig5") {
    const bool narrow = name == "fig4";
    c.mode = Mode::schrodinger1d;
    c.packet = {narrow ? 0.5 : 2.0, 1.0, -10.0, 1.0};
    c.potential = {PotentialKind::gaussian, 0.2, 1.0};
    const double t = narrow ? 800.0 : 1200.0, dx = 0.1;
    c.grid = detail::symmetric_grid(required_half_extent(c.packet, t), dx, c.packet.mass * dx * dx, t);
    c.assumptions = {{"packet.mass", "1"}, {"grid.dx", "0.1"}, {"grid.dt", "m dx^2"}};
    return c;
  }
  if (name == "fig6" || name == "fig7") {
    const bool narrow = name == "fig6";
    c.mode = Mode::dirac1d;
    c.packet = {narrow ? 0.5 : 2.0, 1.0, -10.0, 1.0};
    c.potential = {PotentialKind::square, -1.0, 1.0};
    const double t = narrow ? 800.0 : 1200.0;
    const double dx = narrow ? 0.01 : 0.1;
    const double half = std::abs(c.packet.x0) + t + 6.0 * c.packet.sigma + 10.0;
    c.grid = detail::symmetric_grid(half, dx, max_dirac_dt(c.packet.mass, c.potential), t);
    // dx keeps the packet weight at pi/(4 dx) below 1e-6 of its peak.
    c.assumptions = {{"packet.mass", "1"}, {"grid.dx", detail::num(dx)}, {"grid.dt", "0.1 / (m + |V0|)"}};
    return c;
  }
  if (name == "fig8" || name == "fig9") {
    const auto nuc = UnitSystem::nuclear();
    c.mode = Mode::analytic3d;
    c.units = "nuclear";
    const double m = nuc.to_natural(constants::neutron_mass_MeV, "MeV/c2");
    c.packet3d = {1.0, {m * 0.02, 0.0, 0.0}, {-20.0, 2.0, 0.0}, m};
    c.potential = {PotentialKind::square, -nuc.to_natural(40.0, "MeV"), 10.0};
    if (name == "fig9") c.potential.v0 *= 1.05;
    c.grid = GridSpec{-1.0, 1.0, 3, 1.0, 5e14, {}};
    c.map = FieldMapSpec{z_plane(0.0), -2e14, 2e14, -2e14, 2e14, 241, 241};
    c.assumptions = {{"units", "fm (hbar = c = 1)"},
                     {"packet.r0", "(-20, 2, 0) fm (impact parameter b = 2 fm along y)"},
                     {"map", "z = 0, [-2e14, 2e14]^2 fm, 241 x 241"}};
    return c;
  }
  if (name == "fig10") return helium_config();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

inline RunRecord run_scenario(const ScenarioConfig& c, const RunOptions& o = {}) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  switch (c.mode) {
  case Mode::schrodinger1d: r = run_schrodinger(c); break;
  case Mode::dirac1d: r = run_dirac(c); break;
  case Mode::analytic1d: r = run_analytic1d(c, o); break;
  case Mode::analytic3d: r = run_analytic3d(c, o); break;
  case Mode::experiment: r = run_experiment_helium(c); break;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline RunRecord run_preset(std::string_view name, const RunOptions& o = {}) {
  return run_scenario(preset_config(name), o);
}

} // namespace wpdiff
