#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "tangentstat/canonical.hpp"
#include "tangentstat/dynamics.hpp"

using namespace tangentstat;

namespace {

SystemSpec ho(std::size_t dof = 1, UnitsConfig units = {}) {
  return make_system(PotentialSpec::harmonic(1.0), dof, units);
}
SystemSpec double_well(std::size_t dof = 1) { return make_system(PotentialSpec::double_well(1.0), dof); }
SystemSpec quartic(std::size_t dof = 1) { return make_system(PotentialSpec::polynomial({0, 0, 0, 0, 0.25}), dof); }

// Frozen fixtures from an independent 30-digit quadrature of the full (qtilde, q) integral.
constexpr double kQuarticZBeta1 = 1.0227656721131687;
constexpr double kDoubleWellQ2Beta5 = 0.83089535266520552;
struct ZFixture {
  double beta;
  double double_well;
  double quartic;
};
constexpr ZFixture kZFixtures[] = {
    {0.5, 2.0044547737362748, 1.7200799746490391},
    {1.0, 1.2133126864747537, 1.0227656721131687},
    {2.0, 0.71275591270376075, 0.60814010712876014},
};

double closed_form_quartic_z(double beta) {
  // integral exp(-beta q^4/4) dq = Gamma(1/4) / (2 (beta/4)^(1/4)).
  const double position = std::tgamma(0.25) / (2.0 * std::pow(beta / 4.0, 0.25));
  return std::sqrt(2.0 * std::numbers::pi / beta) * position / (2.0 * std::numbers::pi);
}

double kronrod_2d_z(const PotentialSpec& v, double beta) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double q) {
    auto f = [&](double qt) { return std::exp(-beta * (0.5 * qt * qt + v.value(q))); };
    return gauss_kronrod<double, 61>::integrate(f, -std::numeric_limits<double>::infinity(),
                                                std::numeric_limits<double>::infinity(), 15, 1e-12);
  };
  return gauss_kronrod<double, 61>::integrate(inner, -std::numeric_limits<double>::infinity(),
                                              std::numeric_limits<double>::infinity(), 15, 1e-12) /
         (2.0 * std::numbers::pi);
}

double sample_mean(const std::vector<double>& x) { return numerics::mean(x); }

}  // namespace

TEST(Boltzmann, Examples) {
  const auto sys = ho();
  EXPECT_NEAR(boltzmann_weight(sys, TangentPoint{{1.0}, {1.0}}, InverseTemperature(1.0)).value, std::exp(-1.0),
              1e-15);
  EXPECT_EQ(boltzmann_weight(sys, TangentPoint{{0.0}, {0.0}}, InverseTemperature(1.0)).value, 1.0);
  EXPECT_NEAR(boltzmann_weight(sys, TangentPoint{{3.0}, {-2.0}}, InverseTemperature(1e-14)).value, 1.0, 1e-12);
  const auto tiny = boltzmann_weight(sys, TangentPoint{{100.0}, {0.0}}, InverseTemperature(1.0));
  EXPECT_TRUE(tiny.underflow);
  EXPECT_THROW(InverseTemperature(0.0), Error);
  EXPECT_THROW(InverseTemperature(-1.0), Error);
}

TEST(PartitionFunction, HarmonicExamples) {
  for (const auto method : {CanonMethod::analytic, CanonMethod::quadrature}) {
    EXPECT_NEAR(partition_function(ho(), InverseTemperature(1.0), method).Z, 1.0, 1e-6) << to_string(method);
    EXPECT_NEAR(partition_function(ho(), InverseTemperature(2.0), method).Z, 0.5, 1e-6) << to_string(method);
  }
}

TEST(PartitionFunction, QuarticFixture) {
  // The frozen fixture agrees with two further independent routes.
  EXPECT_NEAR(closed_form_quartic_z(1.0), kQuarticZBeta1, 1e-14);
  EXPECT_NEAR(kronrod_2d_z(quartic().potential, 1.0), kQuarticZBeta1, 1e-10);
  const auto r = partition_function(quartic(), InverseTemperature(1.0), CanonMethod::quadrature);
  EXPECT_NEAR(r.Z / kQuarticZBeta1, 1.0, 1e-8);
  EXPECT_GE(r.stderr, 0.0);
}

TEST(PartitionFunction, BuiltinFixtures) {
  for (const auto& f : kZFixtures) {
    EXPECT_NEAR(partition_function(double_well(), InverseTemperature(f.beta), CanonMethod::quadrature).Z /
                    f.double_well,
                1.0, 1e-8);
    EXPECT_NEAR(partition_function(quartic(), InverseTemperature(f.beta), CanonMethod::quadrature).Z / f.quartic,
                1.0, 1e-8);
  }
}

TEST(PartitionFunction, Errors) {
  const auto cubic = make_system(PotentialSpec::polynomial({0, 0, 1.0, 1.0}));
  try {
    partition_function(cubic, InverseTemperature(1.0), CanonMethod::quadrature);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported);
  }
  EXPECT_THROW(partition_function(double_well(), InverseTemperature(1.0), CanonMethod::analytic), Error);
  EXPECT_THROW(partition_function(ho(3), InverseTemperature(1.0), CanonMethod::quadrature), Error);
}

TEST(PartitionFunction, ImportanceAgreesWithQuadrature) {
  std::uint64_t seed = 100;
  for (const auto& sys : {ho(), double_well(), quartic()}) {
    for (double b : {0.5, 1.0, 2.0}) {
      const auto q = partition_function(sys, InverseTemperature(b), CanonMethod::quadrature);
      const auto mc = partition_function(sys, InverseTemperature(b), CanonMethod::importance_mc, 1'000'000, ++seed);
      // Combined error of both estimators; the HO estimator has zero variance, so
      // the tolerance is floored at roundoff.
      const double tol = 3.0 * std::hypot(mc.stderr, q.stderr) + 1e-12 * q.Z;
      EXPECT_LE(std::abs(mc.Z - q.Z), tol) << sys.potential.name() << " beta=" << b;
    }
  }
}

TEST(PartitionFunction, BetaScaling) {
  for (double b = 0.25; b <= 8.0; b *= 1.5) {
    EXPECT_NEAR(partition_function(ho(), InverseTemperature(b), CanonMethod::quadrature).Z * b, 1.0, 1e-6);
  }
  const auto omega2 = make_system(PotentialSpec::harmonic(2.0), 1, UnitsConfig(0.5, 1.0));
  EXPECT_NEAR(partition_function(omega2, InverseTemperature(3.0), CanonMethod::quadrature).Z * 3.0, 1.0, 1e-6);
}

TEST(PartitionFunction, Factorization) {
  for (const auto& one : {ho(), double_well(), quartic()}) {
    SystemSpec two = one;
    two.dof = 2;
    const auto z1 = partition_function(one, InverseTemperature(1.3), CanonMethod::quadrature);
    const auto z2 = partition_function(two, InverseTemperature(1.3), CanonMethod::quadrature);
    EXPECT_NEAR(z2.Z / (z1.Z * z1.Z), 1.0, 1e-8) << one.potential.name();
  }
}

TEST(Ensemble, Normalization) {
  for (const auto& sys : {ho(), double_well(), quartic(), double_well(2)}) {
    const auto e = ensemble_average_quadrature(sys, Observable::constant(1.0), InverseTemperature(1.0));
    EXPECT_NEAR(e.value, 1.0, 1e-6);
  }
}

TEST(Ensemble, QuadratureExamples) {
  const auto energy = ensemble_average(ho(), Observable::energy(), InverseTemperature(2.0), EnsembleMethod::quadrature);
  EXPECT_NEAR(energy.value, 0.5, 1e-5);
  const auto kinetic =
      ensemble_average(ho(), Observable::kinetic(), InverseTemperature(1.0), EnsembleMethod::quadrature);
  EXPECT_NEAR(kinetic.value, 0.5, 1e-5);
  for (const auto& sys : {ho(), double_well(), quartic()}) {
    EXPECT_NEAR(
        ensemble_average(sys, Observable::coordinate(0), InverseTemperature(1.0), EnsembleMethod::quadrature).value,
        0.0, 1e-10);
  }
  const auto q2 = ensemble_average(double_well(), Observable::monomial({2}, {0}), InverseTemperature(5.0),
                                   EnsembleMethod::quadrature);
  EXPECT_NEAR(q2.value, kDoubleWellQ2Beta5, 1e-8);
}

TEST(Ensemble, TwoDofQuadrature) {
  const auto e = ensemble_average(ho(2), Observable::energy(), InverseTemperature(2.0), EnsembleMethod::quadrature);
  EXPECT_NEAR(e.value, 1.0, 1e-5);
  const auto q2 = ensemble_average(double_well(2), Observable::monomial({2, 2}, {0, 0}), InverseTemperature(5.0),
                                   EnsembleMethod::quadrature);
  EXPECT_NEAR(q2.value, kDoubleWellQ2Beta5 * kDoubleWellQ2Beta5, 1e-6);
  EXPECT_LE(q2.stderr, 1e-6);
}

TEST(Sampling, HarmonicMoments) {
  ChainConfig cfg;
  cfg.n_samples = 400000;
  cfg.seed = 7;
  const auto s = sample_canonical(ho(), InverseTemperature(1.0), cfg);
  ASSERT_EQ(s.points.size(), cfg.n_samples - cfg.burn_in);
  std::vector<double> q, vt2;
  for (const auto& x : s.points) {
    q.push_back(x.q[0]);
    vt2.push_back(x.qtilde[0] * x.qtilde[0]);
  }
  EXPECT_LE(std::abs(sample_mean(q)), 3.0 * numerics::batch_means_stderr(q));
  const double mean_v = [&] {
    double acc = 0.0;
    for (const auto& x : s.points) acc += x.qtilde[0];
    return acc / static_cast<double>(s.points.size());
  }();
  const double var_v = sample_mean(vt2) - mean_v * mean_v;
  EXPECT_LE(std::abs(var_v - 1.0), 3.0 * numerics::batch_means_stderr(vt2));
  EXPECT_GT(s.acceptance_rate, 0.05);
  EXPECT_LT(s.acceptance_rate, 0.95);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Sampling, DoubleWellSecondMoment) {
  ChainConfig cfg;
  cfg.n_samples = 600000;
  cfg.seed = 9;
  const auto est = ensemble_average(double_well(), Observable::monomial({2}, {0}), InverseTemperature(5.0),
                                    EnsembleMethod::metropolis, cfg);
  EXPECT_LE(std::abs(est.value - kDoubleWellQ2Beta5), 3.0 * est.stderr) << est.value << " +- " << est.stderr;
}

TEST(Sampling, ConfigurationAndWarnings) {
  ChainConfig bad;
  bad.n_samples = 10;
  bad.burn_in = 10;
  EXPECT_THROW(sample_canonical(ho(), InverseTemperature(1.0), bad), Error);
  ChainConfig timid;
  timid.n_samples = 5000;
  timid.burn_in = 100;
  timid.proposal_scale = 1e-4;
  EXPECT_FALSE(sample_canonical(ho(), InverseTemperature(1.0), timid).warnings.empty());
  ChainConfig thin;
  thin.n_samples = 2100;
  thin.burn_in = 100;
  thin.thinning = 10;
  EXPECT_EQ(sample_canonical(ho(), InverseTemperature(1.0), thin).points.size(), 200u);
  ChainConfig a;
  a.n_samples = 3000;
  a.seed = 4;
  EXPECT_EQ(sample_canonical(double_well(), InverseTemperature(2.0), a).points,
            sample_canonical(double_well(), InverseTemperature(2.0), a).points);
}

TEST(Sampling, StationaryUnderFlow) {
  // Advect an equilibrium cloud and compare moments against the same cloud at tau = 0.
  ChainConfig cfg;
  cfg.n_samples = 41000;
  cfg.thinning = 10;
  cfg.seed = 21;
  const auto sys = double_well();
  const auto s = sample_canonical(sys, InverseTemperature(2.0), cfg);
  std::vector<double> e0, e1, q0, q1;
  for (const auto& x : s.points) {
    const auto y = advance(sys, x, 1.0, 1e-2);
    e0.push_back(lagrangian_eval(sys, x).E);
    e1.push_back(lagrangian_eval(sys, y).E);
    q0.push_back(x.q[0] * x.q[0]);
    q1.push_back(y.q[0] * y.q[0]);
  }
  const double se_e = std::hypot(numerics::batch_means_stderr(e0), numerics::batch_means_stderr(e1));
  const double se_q = std::hypot(numerics::batch_means_stderr(q0), numerics::batch_means_stderr(q1));
  EXPECT_LE(std::abs(sample_mean(e1) - sample_mean(e0)), 3.0 * se_e);
  EXPECT_LE(std::abs(sample_mean(q1) - sample_mean(q0)), 3.0 * se_q);
}

TEST(Thermodynamics, HarmonicExamples) {
  for (const auto method : {CanonMethod::analytic, CanonMethod::quadrature}) {
    const auto r = thermodynamics(ho(), InverseTemperature(1.0), 1e-3, method);
    EXPECT_NEAR(r.Z, 1.0, 1e-4);
    EXPECT_NEAR(*r.F, 0.0, 1e-4);
    EXPECT_NEAR(*r.U, 1.0, 1e-4);
    EXPECT_NEAR(*r.S, 1.0, 1e-4);

    const auto hot = thermodynamics(ho(), InverseTemperature(0.5), 1e-3, method);
    EXPECT_NEAR(InverseTemperature(0.5).temperature(UnitsConfig{}), 2.0, 1e-15);
    EXPECT_NEAR(hot.Z, 2.0, 1e-4);
    EXPECT_NEAR(*hot.U, 2.0, 1e-4);
    EXPECT_NEAR(*hot.F, -2.0 * std::log(2.0), 1e-4);
    EXPECT_NEAR(*hot.S, 1.0 + std::log(2.0), 1e-4);
  }
  try {
    thermodynamics(ho(), InverseTemperature(1.0), 0.0, CanonMethod::analytic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::precondition);
  }
}

TEST(Thermodynamics, GibbsIdentityAndEntropy) {
  for (double b : {0.3, 0.7, 1.0, 2.5}) {
    const InverseTemperature beta(b);
    const auto r = thermodynamics(ho(), beta, 1e-3, CanonMethod::quadrature);
    const double T = beta.temperature(UnitsConfig{});
    EXPECT_NEAR(*r.S, (*r.U - *r.F) / T, 1e-12);
    EXPECT_NEAR(*r.S, 1.0 + std::log(T), 1e-4);
  }
}

TEST(Equivalence, Examples) {
  EXPECT_NEAR(hamiltonian_equivalence(ho(), InverseTemperature(1.0), CanonMethod::quadrature).ratio, 1.0, 1e-10);
  EXPECT_NEAR(hamiltonian_equivalence(quartic(), InverseTemperature(1.0), CanonMethod::quadrature).ratio, 1.0, 1e-8);
  const auto mc = hamiltonian_equivalence(ho(), InverseTemperature(3.0), CanonMethod::importance_mc, 100000, 42);
  EXPECT_EQ(mc.ratio, 1.0);
  EXPECT_EQ(mc.Z_lagrangian, mc.Z_hamiltonian);
}

TEST(Equivalence, AllPotentials) {
  for (const auto& sys : {ho(), double_well(), quartic(), double_well(2)}) {
    for (double b : {0.5, 2.0}) {
      EXPECT_NEAR(hamiltonian_equivalence(sys, InverseTemperature(b), CanonMethod::quadrature).ratio, 1.0, 1e-10);
    }
  }
}
