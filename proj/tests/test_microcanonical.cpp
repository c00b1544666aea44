#include <gtest/gtest.h>

#include <cmath>
#include <tuple>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tangentstat/microcanonical.hpp"

using namespace tangentstat;

namespace {

SystemSpec ho(std::size_t dof = 1, UnitsConfig units = {}) {
  return make_system(PotentialSpec::harmonic(1.0), dof, units);
}
SystemSpec double_well() { return make_system(PotentialSpec::double_well(1.0)); }

// Independent high-precision values of measure{E <= U}/(2 pi) for V = (q^2 - 1)^2/4.
constexpr double kDoubleWellOmega01 = 0.14771124966752249;
constexpr double kDoubleWellOmega05 = 0.82665239657216102;

}  // namespace

TEST(VolumeBelow, HarmonicExamples) {
  EXPECT_DOUBLE_EQ(volume_below(ho(), 1.0, MicroMethod::analytic).omega, 1.0);
  EXPECT_EQ(volume_below(ho(), 0.0, MicroMethod::analytic).omega, 0.0);
  EXPECT_DOUBLE_EQ(volume_below(ho(2), 2.0, MicroMethod::analytic).omega, 2.0);
  EXPECT_NEAR(volume_below(ho(), 1.0, MicroMethod::quadrature).omega, 1.0, 1e-10);
  EXPECT_EQ(volume_below(ho(), 0.0, MicroMethod::quadrature).omega, 0.0);
  EXPECT_NEAR(volume_below(ho(2), 2.0, MicroMethod::quadrature).omega, 2.0, 1e-9);
}

TEST(VolumeBelow, BallVolumeOracle) {
  // 4-ball of radius sqrt(2U): pi^2 r^4 / 2, divided by (2 pi)^2.
  for (double U : {0.5, 1.0, 3.0}) {
    const double r = std::sqrt(2.0 * U);
    const double oracle = std::pow(std::numbers::pi, 2) * std::pow(r, 4) / 2.0 / std::pow(2.0 * std::numbers::pi, 2);
    EXPECT_NEAR(volume_below(ho(2), U, MicroMethod::quadrature).omega, oracle, 1e-9 * oracle);
  }
}

TEST(VolumeBelow, DoubleWellQuadrature) {
  EXPECT_NEAR(volume_below(double_well(), 0.1, MicroMethod::quadrature).omega, kDoubleWellOmega01, 1e-10);
  EXPECT_NEAR(volume_below(double_well(), 0.5, MicroMethod::quadrature).omega, kDoubleWellOmega05, 1e-10);
}

TEST(VolumeBelow, Errors) {
  try {
    volume_below(ho(), -0.1, MicroMethod::analytic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_shell);
  }
  try {
    volume_below(make_system(PotentialSpec::polynomial({0, 0, 0, 1.0})), 1.0, MicroMethod::quadrature);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported);
  }
  EXPECT_THROW(volume_below(double_well(), 0.5, MicroMethod::analytic), Error);
  EXPECT_THROW(volume_below(ho(3), 1.0, MicroMethod::quadrature), Error);
}

TEST(VolumeBelow, Monotone) {
  for (const auto& sys : {ho(), ho(2), double_well()}) {
    double prev = -1.0;
    for (double U = 0.05; U <= 3.0; U += 0.15) {
      const double omega = volume_below(sys, U, MicroMethod::quadrature).omega;
      EXPECT_GT(omega, prev) << sys.potential.name() << " U=" << U;
      prev = omega;
    }
  }
}

TEST(VolumeBelow, HitOrMissAgreement) {
  for (const auto& [sys, U, seed] : std::vector<std::tuple<SystemSpec, double, std::uint64_t>>{
           {ho(), 1.5, 11}, {ho(2), 2.0, 12}, {double_well(), 0.5, 13}}) {
    const auto mc = volume_below(sys, U, MicroMethod::hit_or_miss, 1'000'000, seed);
    const auto exact = volume_below(sys, U, MicroMethod::quadrature);
    EXPECT_GT(mc.stderr, 0.0);
    EXPECT_LE(std::abs(mc.omega - exact.omega), 3.0 * mc.stderr) << sys.potential.name();
  }
}

TEST(VolumeBelow, HitOrMissDeterministic) {
  const auto a = volume_below(ho(2), 2.0, MicroMethod::hit_or_miss, 100000, 5);
  const auto b = volume_below(ho(2), 2.0, MicroMethod::hit_or_miss, 100000, 5);
  EXPECT_EQ(a.omega, b.omega);
  EXPECT_EQ(a.stderr, b.stderr);
}

TEST(IntegrationDomain, ContainsShell) {
  const auto box = integration_domain(double_well(), 0.5);
  ASSERT_EQ(box.q.size(), 1u);
  const double turning = std::sqrt(1.0 + std::sqrt(2.0));
  EXPECT_LT(box.q[0].lo, -turning);
  EXPECT_GT(box.q[0].hi, turning);
  EXPECT_NEAR(box.qtilde[0].hi, 1.1, 1e-12);
  EXPECT_GT(box.volume(), 0.0);
}

TEST(ShellDensity, Examples) {
  for (double U : {0.5, 1.0, 4.0}) {
    const auto r = shell_density(ho(), U, 1e-3, MicroMethod::analytic);
    EXPECT_NEAR(*r.sigma, 1.0, 1e-6);
    EXPECT_TRUE(r.warnings.empty());
  }
  EXPECT_NEAR(*shell_density(ho(2), 2.0, 1e-3, MicroMethod::analytic).sigma, 2.0, 1e-4);
  const auto coarse = shell_density(ho(), 0.5, 2.0, MicroMethod::analytic);
  EXPECT_TRUE(std::isfinite(*coarse.sigma));
  EXPECT_FALSE(coarse.warnings.empty());
  EXPECT_THROW(shell_density(ho(), 1.0, 0.0, MicroMethod::analytic), Error);
  EXPECT_THROW(shell_density(ho(), 0.0, 1e-3, MicroMethod::analytic), Error);
}

TEST(ShellDensity, MatchesDerivativeOfVolume) {
  // Oracles: dOmega/dU = U for the 2-dof HO; for the double well dOmega/dU is the
  // orbit period over 2 pi, integrated with endpoint singularities by tanh-sinh.
  for (double U : {0.3, 0.8, 1.7}) {
    EXPECT_NEAR(*shell_density(ho(2), U, 1e-3, MicroMethod::quadrature).sigma / U, 1.0, 1e-3);
  }
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double U : {0.1, 0.3, 0.8, 1.7}) {
    auto rate = [U](double q) {
      const double gap = U - 0.25 * (q * q - 1.0) * (q * q - 1.0);
      return gap > 0.0 ? 2.0 / std::sqrt(2.0 * gap) : 0.0;
    };
    const double s = 2.0 * std::sqrt(U);
    double period = 2.0 * ts.integrate(rate, 1.0, std::sqrt(1.0 + s));
    if (s < 1.0) {
      period += 2.0 * ts.integrate(rate, std::sqrt(1.0 - s), 1.0);
    } else {
      period += 2.0 * ts.integrate(rate, 0.0, 1.0);
    }
    const double oracle = period / (2.0 * std::numbers::pi);
    const double sigma = *shell_density(double_well(), U, 1e-3, MicroMethod::quadrature).sigma;
    EXPECT_NEAR(sigma / oracle, 1.0, 1e-3) << "U=" << U;
  }
}

TEST(ShellDensity, HitOrMiss) {
  const auto r = shell_density(ho(), 1.0, 0.05, MicroMethod::hit_or_miss, 1'000'000, 3);
  EXPECT_LE(std::abs(*r.sigma - 1.0), 3.0 * r.stderr);
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(*entropy_micro(ho(), 1.0, MicroMethod::analytic).S, 0.0);
  EXPECT_NEAR(*entropy_micro(ho(), 2.0, MicroMethod::analytic).S, std::log(2.0), 1e-15);
  try {
    entropy_micro(ho(), 0.0, MicroMethod::analytic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined_entropy);
  }
  const auto kb = make_system(PotentialSpec::harmonic(1.0), 1, UnitsConfig(1.0, 2.5));
  EXPECT_NEAR(*entropy_micro(kb, 2.0, MicroMethod::analytic).S, 2.5 * std::log(2.0), 1e-14);
}

TEST(Temperature, Examples) {
  EXPECT_NEAR(*temperature_micro(ho(), 3.0, 1e-4, MicroMethod::analytic).T, 3.0, 1e-6);
  EXPECT_NEAR(*temperature_micro(ho(2), 4.0, 1e-4, MicroMethod::analytic).T, 2.0, 1e-5);
  try {
    temperature_micro(ho(), 3.0, 0.0, MicroMethod::analytic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::precondition);
  }
  EXPECT_NEAR(*temperature_micro(ho(), 3.0, 1e-4, MicroMethod::quadrature).T, 3.0, 1e-5);
}

TEST(Compose, Examples) {
  MicroResult a;
  a.omega = 2.0;
  MicroResult b;
  b.omega = 3.0;
  const auto ab = compose_systems(a, b);
  EXPECT_EQ(ab.omega, 6.0);
  EXPECT_NEAR(*ab.S, std::log(6.0), 1e-15);

  MicroResult one;
  one.omega = 1.0;
  const auto a1 = compose_systems(a, one);
  EXPECT_EQ(a1.omega, 2.0);
  EXPECT_EQ(*a1.S, std::log(2.0));

  const auto r = entropy_micro(ho(), 1.0, MicroMethod::analytic);
  const auto rr = compose_systems(r, r);
  EXPECT_EQ(rr.omega, 1.0);
  EXPECT_EQ(*rr.S, 0.0);
}

TEST(Compose, AdditivityProperty) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int n = 0; n < 50; ++n) {
    const auto a = entropy_micro(ho(1 + n % 2), u(rng), MicroMethod::analytic);
    const auto b = entropy_micro(double_well(), u(rng), MicroMethod::quadrature);
    const auto ab = compose_systems(a, b);
    EXPECT_NEAR(*ab.S - *a.S - *b.S, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(ab.omega, a.omega * b.omega);
  }
}

TEST(Compose, StderrInRelativeQuadrature) {
  MicroResult a;
  a.omega = 2.0;
  a.stderr = 0.02;
  MicroResult b;
  b.omega = 4.0;
  b.stderr = 0.04;
  EXPECT_NEAR(compose_systems(a, b).stderr, 8.0 * std::hypot(0.01, 0.01), 1e-15);
}

TEST(Units, HbarScaling) {
  for (std::size_t d : {1u, 2u}) {
    for (double c : {0.5, 2.0, 3.7}) {
      const auto base = entropy_micro(ho(d), 2.5, MicroMethod::analytic);
      const auto scaled = entropy_micro(ho(d, UnitsConfig(c, 1.0)), 2.5, MicroMethod::analytic);
      EXPECT_NEAR(scaled.omega, base.omega * std::pow(c, -static_cast<double>(d)), 1e-14 * base.omega);
      EXPECT_NEAR(*scaled.S, *base.S - static_cast<double>(d) * std::log(c), 1e-13);
    }
  }
}
