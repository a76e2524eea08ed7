#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "wpdiff/scenarios.hpp"

using namespace wpdiff;

namespace {

std::vector<double> sampled(int n, double dx, double x0, auto f) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f(x0 + i * dx);
  return v;
}

ScenarioConfig small_schrodinger() {
  ScenarioConfig c;
  c.mode = Mode::schrodinger1d;
  c.packet = {0.5, 1.0, -10.0, 1.0};
  c.potential = {PotentialKind::gaussian, 0.2, 1.0};
  const double t = 40.0, dx = 0.1;
  c.grid = detail::symmetric_grid(required_half_extent(c.packet, t), dx, dx * dx, t);
  c.grid.snapshot_times = {20.0};
  return c;
}

ScenarioConfig reduced_helium(double kappa_w) {
  auto c = helium_config();
  const double kappa = kappa_w / c.potential.w;
  c.potential.v0 = kappa * kappa / (2.0 * c.packet.mass);
  const double t = 1e5, dx = 0.02;
  c.grid = detail::symmetric_grid(required_half_extent(c.packet, t), dx, c.packet.mass * dx * dx, t);
  c.detector->interval = 5e3;
  return c;
}

} // namespace

TEST(CountPeaks, Gaussian) {
  auto v = sampled(401, 0.05, -10.0, [](double x) { return std::exp(-x * x); });
  auto r = count_peaks(v, 0.05, -10.0);
  ASSERT_EQ(r.count, 1);
  EXPECT_NEAR(r.positions[0], 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.heights[0], 1.0);
}

TEST(CountPeaks, EnvelopedSine) {
  const double dx = 0.01;
  auto v = sampled(1257, dx, 0.0, [](double x) { return std::abs(std::sin(x)) * std::exp(-0.02 * (x - 6.0) * (x - 6.0)); });
  auto r = count_peaks(v, dx, 0.0);
  ASSERT_EQ(r.count, 4);
  for (double s : r.spacings()) EXPECT_NEAR(s, specfun::pi, 0.15); // the envelope pulls outer peaks inwards
}

TEST(CountPeaks, FlatAndZero) {
  std::vector<double> flat(100, 3.0), zero(100, 0.0);
  EXPECT_EQ(count_peaks(flat, 1.0).count, 0);
  EXPECT_EQ(count_peaks(zero, 1.0).count, 0);
}

TEST(CountPeaks, ThresholdAndMerge) {
  const double dx = 0.01;
  // A second hump at 4% of the first is ignored.
  auto small = sampled(2001, dx, -10.0, [](double x) {
    return std::exp(-x * x) + 0.04 * std::exp(-(x - 5.0) * (x - 5.0));
  });
  EXPECT_EQ(count_peaks(small, dx, -10.0).count, 1);
  // Two humps with a valley at ~97% of the lower one merge into the higher.
  auto shallow = sampled(2001, dx, -10.0, [](double x) {
    return std::exp(-(x + 0.6) * (x + 0.6)) + 0.98 * std::exp(-(x - 0.6) * (x - 0.6)) +
           0.3 * std::cos(3.0 * x) * std::exp(-x * x / 0.2);
  });
  auto r = count_peaks(shallow, dx, -10.0);
  ASSERT_EQ(r.count, 1);
  // Well separated humps stay apart.
  auto deep = sampled(2001, dx, -10.0, [](double x) { return std::exp(-(x + 3) * (x + 3)) + std::exp(-(x - 3) * (x - 3)); });
  EXPECT_EQ(count_peaks(deep, dx, -10.0).count, 2);
}

TEST(CountPeaks, NeedsThreeNeighboursEachSide) {
  std::vector<double> v{0, 1, 2, 1, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(count_peaks(v, 1.0).count, 0);
  std::vector<double> plateau{0, 0, 0, 1, 2, 2, 1, 0, 0, 0};
  EXPECT_EQ(count_peaks(plateau, 1.0).count, 0);
  std::vector<double> w{0, 0, 0, 1, 2, 1, 0, 0, 0, 0};
  EXPECT_EQ(count_peaks(w, 1.0).count, 1);
  EXPECT_THROW(count_peaks(std::vector<double>(5, 1.0), 1.0), ConfigError);
  EXPECT_THROW(count_peaks(w, 0.0), ConfigError);
}

TEST(CompareProfiles, IdenticalAndShifted) {
  const double dx = 0.01;
  auto a = sampled(1001, dx, -5.0, [](double x) { return std::exp(-x * x); });
  auto c = compare_profiles(a, a, dx, -5.0);
  EXPECT_EQ(c.max_abs, 0.0);
  EXPECT_EQ(c.max_peak_offset, 0.0);
  ASSERT_EQ(c.matches.size(), 1u);
  auto b = sampled(1001, dx, -5.0, [](double x) { return 1.05 * std::exp(-(x - 0.2) * (x - 0.2)); });
  c = compare_profiles(a, b, dx, -5.0);
  EXPECT_NEAR(c.max_peak_offset, 0.2, 1e-9);
  EXPECT_NEAR(c.max_relative_at_peaks, 1.0 - 1.0 / 1.05, 1e-12);
  EXPECT_THROW(compare_profiles(a, std::vector<double>(10), dx), ConfigError);
}

TEST(Config, ModeNames) {
  for (Mode m : {Mode::schrodinger1d, Mode::dirac1d, Mode::analytic1d, Mode::analytic3d, Mode::experiment})
    EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_THROW(parse_mode("schroedinger"), ConfigError);
}

TEST(Presets, AllBuild) {
  for (const auto& n : preset_names()) {
    auto c = preset_config(n);
    EXPECT_EQ(c.preset_name, n);
    EXPECT_FALSE(c.assumptions.empty()) << n;
  }
  EXPECT_THROW(preset_config("fig2"), ConfigError);
}

TEST(Presets, Fig9DiffersFromFig8OnlyInWellDepth) {
  auto a = preset_config("fig8"), b = preset_config("fig9");
  EXPECT_DOUBLE_EQ(b.potential.v0 / a.potential.v0, 1.05);
  b.potential.v0 = a.potential.v0;
  b.preset_name = a.preset_name;
  EXPECT_TRUE(a == b);
}

TEST(Presets, DichotomyPairsShareAllButWidthAndTime) {
  for (auto [narrow, wide] : {std::pair{"fig4", "fig5"}, std::pair{"fig6", "fig7"}}) {
    auto a = preset_config(narrow), b = preset_config(wide);
    EXPECT_EQ(a.mode, b.mode);
    EXPECT_EQ(a.potential, b.potential);
    EXPECT_EQ(a.packet.q0, b.packet.q0);
    EXPECT_EQ(a.packet.x0, b.packet.x0);
    EXPECT_EQ(a.packet.sigma, 0.5);
    EXPECT_EQ(b.packet.sigma, 2.0);
    EXPECT_EQ(a.grid.t_final, 800.0);
    EXPECT_EQ(b.grid.t_final, 1200.0);
  }
}

TEST(Presets, GridsCoverTheRun) {
  for (const char* n : {"fig4", "fig5"}) {
    auto c = preset_config(n);
    EXPECT_NO_THROW(check_domain(c.grid, c.packet, c.grid.t_final)) << n;
  }
  for (const char* n : {"fig6", "fig7"}) {
    auto c = preset_config(n);
    EXPECT_NO_THROW(check_dirac_domain(c.grid, c.packet, c.grid.t_final)) << n;
    EXPECT_NO_THROW(check_dirac_bandwidth(c.grid, c.packet)) << n;
    EXPECT_NO_THROW(check_dirac_dt(c.grid.dt, c.packet.mass, c.potential)) << n;
    const double edge = dirac_bandwidth_limit(c.grid);
    EXPECT_LT(dirac_weight(c.packet, edge), 1e-6) << n;
  }
}

TEST(RunSchrodinger, DeterministicWithSnapshots) {
  auto c = small_schrodinger();
  auto a = run_scenario(c), b = run_scenario(c);
  ASSERT_EQ(a.profiles.size(), 2u);
  EXPECT_EQ(a.profiles[0].label, "t=20");
  EXPECT_EQ(a.profiles[1].label, "final");
  EXPECT_NEAR(a.profiles[1].t, 40.0, 1e-9);
  EXPECT_EQ(a.profiles[1].U, b.profiles[1].U);
  EXPECT_LT(a.max_norm_drift(), 1e-10);
  ASSERT_TRUE(a.peaks);
  EXPECT_EQ(a.peaks->count, b.peaks->count);
  for (double x : a.peaks->positions) EXPECT_LT(x, -c.potential.w);
  EXPECT_GT(a.wall_seconds, 0.0);
}

TEST(RunSchrodinger, RejectsSmallGrid) {
  auto c = small_schrodinger();
  c.grid.xmin = -20.0;
  EXPECT_THROW(run_scenario(c), ConfigError);
}

TEST(RunDirac, ShortRun) {
  ScenarioConfig c;
  c.mode = Mode::dirac1d;
  c.packet = {2.0, 1.0, -10.0, 1.0};
  c.potential = {PotentialKind::square, -1.0, 1.0};
  const double t = 20.0;
  c.grid = detail::symmetric_grid(std::abs(c.packet.x0) + t + 40.0, 0.1, max_dirac_dt(1.0, c.potential), t);
  auto r = run_scenario(c);
  ASSERT_EQ(r.profiles.size(), 1u);
  EXPECT_TRUE(r.profiles[0].spinor());
  EXPECT_LT(r.max_norm_drift(), 1e-3);
  ASSERT_FALSE(r.metrics.empty());
  EXPECT_EQ(r.metrics[0].first, "density.final");
}

TEST(RunAnalytic1D, Fig1PresetAgrees) {
  auto r = run_preset("fig1");
  ASSERT_TRUE(r.comparison);
  const auto& c = *r.comparison;
  const double dx = r.config.grid.dx();
  EXPECT_GE(c.peaks_a, 8);
  EXPECT_EQ(c.peaks_a, c.peaks_b);
  EXPECT_LE(c.max_peak_offset, dx + 1e-9);
  EXPECT_LE(c.max_relative_at_peaks, 0.1);
}

TEST(RunAnalytic3D, SmallMap) {
  auto c = preset_config("fig8");
  c.map.na = c.map.nb = 5;
  auto a = run_scenario(c, {2, 64});
  ASSERT_TRUE(a.field);
  EXPECT_EQ(a.field->values.size(), 25u);
  auto b = run_scenario(c, {1, 64});
  EXPECT_EQ(a.field->values, b.field->values);
}

TEST(Helium, DefaultConfigInLabUnits) {
  auto c = helium_config();
  EXPECT_EQ(c.units, "laboratory");
  EXPECT_NEAR(c.packet.mass, 6302.5, 1.0);       // s / cm^2
  EXPECT_NEAR(c.potential.v0, 6.077e15, 1e12);   // 4 eV / hbar in 1/s
  EXPECT_NEAR(c.grid.dt, 2.521, 1e-3);
}

TEST(Helium, OpaqueBarrierEstimateInLogSpace) {
  auto c = helium_config();
  auto e = stationary_transmission(c.packet, c.potential);
  EXPECT_FALSE(e.representable);
  EXPECT_EQ(e.fraction, 0.0);
  const double kappa = std::sqrt(2.0 * c.packet.mass * c.potential.v0);
  EXPECT_NEAR(e.log10_fraction / (-4.0 * kappa * c.potential.w / std::log(10.0)), 1.0, 1e-6);
}

TEST(Helium, LogEstimateMatchesDirectWhereBothExist) {
  // kappa w = 140: |T|^2 ~ 1e-247 is still a normal double and k << kappa.
  auto c = reduced_helium(140.0);
  auto e = stationary_transmission(c.packet, c.potential);
  ASSERT_TRUE(e.representable);
  EXPECT_LT(e.fraction, 1e-240);
  EXPECT_NEAR(e.log10_fraction, e.log10_opaque, 0.01);
  auto shallow = stationary_transmission(c.packet, reduced_helium(2.0).potential);
  EXPECT_GT(std::abs(shallow.log10_fraction - shallow.log10_opaque), 0.1);
}

TEST(Helium, ReducedBarrierRun) {
  auto c = reduced_helium(2.0);
  auto r = run_scenario(c);
  const double N = *c.particle_count;
  ASSERT_GE(r.detector_series.size(), 20u);
  EXPECT_EQ(r.detector_series.front().t, 0.0);
  EXPECT_NEAR(r.detector_series.back().t, 1e5, 3.0);
  for (const auto& s : r.detector_series) {
    EXPECT_NEAR(s.total / N, 1.0, 1e-3);
    EXPECT_GE(s.counts, 0.0);
    EXPECT_LE(s.counts, s.total);
  }
  double numerical = -1, estimate = -1;
  for (const auto& [k, v] : r.metrics) {
    if (k == "transmitted.fraction") numerical = std::stod(v);
    if (k == "transmitted.estimate") estimate = std::stod(v);
  }
  ASSERT_GT(estimate, 0.0);
  EXPECT_GT(numerical / estimate, 0.5);
  EXPECT_LT(numerical / estimate, 2.0);
}

TEST(Helium, RequiresDetectorAndCount) {
  auto c = reduced_helium(2.0);
  c.detector.reset();
  EXPECT_THROW(run_scenario(c), ConfigError);
  c = reduced_helium(2.0);
  c.detector->position = 1e6;
  EXPECT_THROW(run_scenario(c), ConfigError);
}

TEST(Correspondence, SlowDiracPacketFollowsSchrodinger) {
  const PacketSpec1D p{1.0, 1.0, -4.0, 100.0}; // q0 / m = 0.01
  const PotentialSpec well{PotentialKind::square, -0.01, 1.0};
  const auto g = detail::symmetric_grid(20.0, 0.05, 1.0, 0.0);
  auto r = dirac_schrodinger_correspondence(p, well, g, 0.01, {150.0, 75.0});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0].t, 75.0, 1e-9);
  EXPECT_NEAR(r[1].t, 150.0, 1e-9);
  for (const auto& c : r) {
    EXPECT_LT(c.relative(), 0.01) << c.t;
    EXPECT_GT(c.relative(), 0.0);
  }
}
