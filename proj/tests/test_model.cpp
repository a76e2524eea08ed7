#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "wpdiff/model.hpp"

using namespace wpdiff;

TEST(Validate, PacketNonrelativisticFlag) {
  auto v = validate(PacketSpec1D{0.5, 0.4, -60.0, 40.0});
  EXPECT_EQ(v.value.sigma, 0.5);
  ASSERT_EQ(v.notes.size(), 1u);
  EXPECT_EQ(v.notes[0], "nonrelativistic");

  auto rel = validate(PacketSpec1D{2.0, 1.0, 0.0, 1.0});
  EXPECT_TRUE(rel.notes.empty());
}

TEST(Validate, RejectsBadPacket) {
  EXPECT_THROW(validate(PacketSpec1D{0.0, 1.0, 0.0, 1.0}), ConfigError);
  EXPECT_THROW(validate(PacketSpec1D{-1.0, 1.0, 0.0, 1.0}), ConfigError);
  EXPECT_THROW(validate(PacketSpec1D{1.0, 1.0, 0.0, 0.0}), ConfigError);
  EXPECT_THROW(validate(PacketSpec1D{1.0, NAN, 0.0, 1.0}), ConfigError);
  PacketSpec3D p3;
  p3.sigma = 0.0;
  EXPECT_THROW(validate(p3), ConfigError);
}

TEST(Validate, RejectsBadPotentialAndGrid) {
  EXPECT_THROW(validate(PotentialSpec{PotentialKind::square, -1.0, 0.0}), ConfigError);
  GridSpec g{1.0, 1.0, 10, 0.1, 1.0, {}};
  EXPECT_THROW(validate(g), ConfigError);
  g = GridSpec{2.0, 1.0, 10, 0.1, 1.0, {}};
  EXPECT_THROW(validate(g), ConfigError);
  g = GridSpec{0.0, 1.0, 2, 0.1, 1.0, {}};
  EXPECT_THROW(validate(g), ConfigError);
  g = GridSpec{0.0, 1.0, 10, 0.1, 1.0, {0.5, 2.0}};
  EXPECT_THROW(validate(g), ConfigError);
  g = GridSpec{0.0, 1.0, 10, 0.1, 1.0, {0.5, 0.2}};
  EXPECT_THROW(validate(g), ConfigError);
  g = GridSpec{0.0, 1.0, 11, 0.1, 1.0, {0.0, 0.5, 1.0}};
  auto ok = validate(g);
  EXPECT_DOUBLE_EQ(ok.value.dx(), 0.1);
}

TEST(Potential, Shapes) {
  PotentialSpec sq{PotentialKind::square, -2.0, 1.5};
  EXPECT_EQ(sq(0.0), -2.0);
  EXPECT_EQ(sq(1.49), -2.0);
  EXPECT_EQ(sq(1.51), 0.0);
  PotentialSpec ga{PotentialKind::gaussian, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(ga(2.0), 3.0 * std::exp(-1.0));
  EXPECT_EQ(parse_potential_kind("gaussian"), PotentialKind::gaussian);
  EXPECT_THROW(parse_potential_kind("triangle"), ConfigError);
}

TEST(Narrowness, Examples) {
  PotentialSpec w1{PotentialKind::gaussian, 1.0, 1.0};
  double r = narrowness_ratio(PacketSpec1D{0.5, 1.0, 0.0, 1.0}, w1);
  EXPECT_DOUBLE_EQ(r, 0.5);
  EXPECT_EQ(classify_narrowness(r), Narrowness::diffractive);
  r = narrowness_ratio(PacketSpec1D{2.0, 1.0, 0.0, 1.0}, w1);
  EXPECT_DOUBLE_EQ(r, 2.0);
  EXPECT_EQ(classify_narrowness(r), Narrowness::single_hump);
  EXPECT_EQ(classify_narrowness(1.0), Narrowness::marginal);
  EXPECT_LT(narrowness_ratio(PacketSpec1D{1.0, 1e-12, 0.0, 1.0}, w1), 1e-5);
  EXPECT_THROW(narrowness_ratio(PacketSpec1D{1.0, 0.0, 0.0, 1.0}, w1), ConfigError);
  EXPECT_THROW(narrowness_ratio(PacketSpec1D{1.0, -1.0, 0.0, 1.0}, w1), ConfigError);
}

TEST(Narrowness, MonotoneProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 500; ++i) {
    double s = u(rng), q = u(rng), w = u(rng), f = 1.0 + u(rng);
    PotentialSpec pot{PotentialKind::square, -1.0, w};
    double base = narrowness_ratio(PacketSpec1D{s, q, 0.0, 1.0}, pot);
    EXPECT_GT(narrowness_ratio(PacketSpec1D{s * f, q, 0.0, 1.0}, pot), base);
    EXPECT_GT(narrowness_ratio(PacketSpec1D{s, q * f, 0.0, 1.0}, pot), base);
    EXPECT_LT(narrowness_ratio(PacketSpec1D{s, q, 0.0, 1.0}, PotentialSpec{PotentialKind::square, -1.0, w * f}), base);
  }
}

// Oracle values from mpmath at 30 digits (CODATA 2018 constants).
TEST(Units, NeutronMassNuclear) {
  auto u = UnitSystem::nuclear();
  double m = u.to_natural(939.565, "MeV");
  EXPECT_NEAR(m, 4.76146241175644118861, 1e-13);
  EXPECT_NEAR(m, 4.7618, 1e-3);
  EXPECT_DOUBLE_EQ(u.to_natural(939.565, "MeV/c2"), m);
  EXPECT_NEAR(u.to_natural(1.0, "amu"), 931.49410242 / 197.3269804, 1e-13);
}

TEST(Units, BarrierHeightLaboratory) {
  auto u = UnitSystem::laboratory();
  double v = u.to_natural(4.0, "eV");
  EXPECT_NEAR(v / 6077069791984509.60257844565449, 1.0, 1e-14);
  EXPECT_NEAR(std::log10(v), 15.0, 1.0);
  double m = u.to_natural(constants::helium4_mass_amu, "amu");
  EXPECT_NEAR(m / 6302.5381115842468013313703378, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(u.to_natural(1.0, "mm"), 0.1);
  EXPECT_DOUBLE_EQ(u.to_natural(2.0, "m"), 200.0);
}

TEST(Units, KilogramConsistentWithAmu) {
  for (auto u : {UnitSystem::nuclear(), UnitSystem::laboratory()}) {
    double amu_kg = 1.66053906660e-27;
    EXPECT_NEAR(u.to_natural(amu_kg, "kg") / u.to_natural(1.0, "amu"), 1.0, 1e-9);
  }
}

TEST(Units, TimeLengthConsistency) {
  // c = 1 in the nuclear system: one second of light travel is c * 1 s.
  auto n = UnitSystem::nuclear();
  EXPECT_NEAR(n.to_natural(1.0, "s") / n.to_natural(constants::c_m_per_s, "m"), 1.0, 1e-15);
}

TEST(Units, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> e(-30.0, 30.0);
  const char* tags[] = {"fm", "nm", "mm", "cm", "m", "1/fm", "1/cm", "1/m", "s", "ms", "us",
                        "eV", "keV", "MeV", "eV/c2", "MeV/c2", "amu", "kg"};
  for (auto u : {UnitSystem::nuclear(), UnitSystem::laboratory()}) {
    for (const char* t : tags) {
      (void)UnitSystem::dimension(t);
      for (int i = 0; i < 50; ++i) {
        double x = std::pow(10.0, e(rng));
        EXPECT_NEAR(u.from_natural(u.to_natural(x, t), t) / x, 1.0, 1e-12) << t;
      }
    }
  }
}

TEST(Units, UnknownTag) {
  EXPECT_THROW(UnitSystem::nuclear().to_natural(1.0, "furlong"), ConfigError);
  EXPECT_THROW(UnitSystem::dimension("parsec"), ConfigError);
  EXPECT_EQ(UnitSystem::dimension("keV"), Dimension::energy);
  EXPECT_EQ(UnitSystem::dimension("amu"), Dimension::mass);
}
