#ifndef TANGENTSTAT_CANONICAL_HPP
#define TANGENTSTAT_CANONICAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tangentstat/errors.hpp"
#include "tangentstat/model.hpp"
#include "tangentstat/numerics.hpp"
#include "tangentstat/random.hpp"

namespace tangentstat {

class InverseTemperature {
 public:
  explicit InverseTemperature(double beta) : beta_(beta) {
    detail::require(std::isfinite(beta) && beta > 0.0, ErrorCode::domain, "beta must be > 0");
  }

  static InverseTemperature from_temperature(double T, const UnitsConfig& units) {
    return InverseTemperature(1.0 / (units.kB() * T));
  }

  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double temperature(const UnitsConfig& units) const noexcept { return 1.0 / (units.kB() * beta_); }

 private:
  double beta_;
};

enum class CanonMethod { analytic, quadrature, importance_mc };

inline std::string to_string(CanonMethod m) {
  switch (m) {
    case CanonMethod::analytic: return "analytic";
    case CanonMethod::quadrature: return "quadrature";
    case CanonMethod::importance_mc: return "importance-mc";
  }
  return "unknown";
}

struct ThermoResult {
  double beta = 0.0;
  double Z = 0.0;
  std::optional<double> U;
  std::optional<double> F;
  std::optional<double> S;
  CanonMethod method = CanonMethod::analytic;
  double stderr = 0.0;
  std::vector<std::string> warnings;
};

struct ChainConfig {
  std::uint64_t n_samples = 100000;  // chain length including burn-in
  std::uint64_t burn_in = 1000;
  std::optional<double> proposal_scale;  // defaults to 1/sqrt(beta)
  std::uint64_t seed = 0;
  std::uint64_t thinning = 1;
};

struct SampleSet {
  std::vector<TangentPoint> points;
  double acceptance_rate = 0.0;
  std::vector<std::string> warnings;
};

struct EnsembleEstimate {
  double value = 0.0;
  double stderr = 0.0;
  std::string method;
  std::vector<std::string> warnings;
};

struct BoltzmannWeight {
  double value = 0.0;
  bool underflow = false;
};

/// exp(beta L(x)) = exp(-beta E(x)).
inline BoltzmannWeight boltzmann_weight(const SystemSpec& system, const TangentPoint& x, InverseTemperature beta) {
  const auto lv = lagrangian_eval(system, x);
  const double w = std::exp(beta.beta() * lv.L);
  return {w, w < std::numeric_limits<double>::min()};
}

namespace detail {

inline constexpr std::size_t kHermiteOrder = 64;
inline constexpr double kPositionTolerance = 1e-8;
inline constexpr double kTailExponent = 46.0;  // exp(-46) ~ 1e-20 of the peak
// Two-coordinate averages run on the product grid, so each slice is coarser.
inline constexpr std::size_t kHermiteOrder2d = 20;
inline constexpr std::size_t kHermiteOrder2dFine = 24;
inline constexpr double kPositionTolerance2d = 1e-6;

// Gauss-Hermite nodes scaled to the kinetic Gaussian exp(-beta v^2/2); weights already
// divide out the Gaussian so that sum W_k g(v_k) ~ integral g(v) dv.
inline numerics::QuadratureRule kinetic_rule(double beta, std::size_t order = kHermiteOrder) {
  auto gh = numerics::gauss_hermite(order);
  const double s = std::sqrt(2.0 / beta);
  for (std::size_t k = 0; k < gh.size(); ++k) {
    gh.weights[k] *= s * std::exp(gh.nodes[k] * gh.nodes[k]);
    gh.nodes[k] *= s;
  }
  return gh;
}

// Adaptive Simpson panels on q for exp(-beta (V - Vmin)), truncated where the weight
// is below exp(-kTailExponent).
inline numerics::QuadratureRule position_rule(const PotentialSpec& v, double beta, double rel_tol) {
  const double vmin = v.minimum().value;
  const auto intervals = v.sublevel_intervals(vmin + kTailExponent / beta);
  require(!intervals.empty(), ErrorCode::numerical, "empty position domain");
  auto w = [&](double q) { return std::exp(-beta * (v.value(q) - vmin)); };
  return numerics::adaptive_simpson(w, intervals.front().lo, intervals.back().hi, rel_tol, 32).rule;
}

inline void require_quadrature(const SystemSpec& system) {
  require(system.potential.confining(), ErrorCode::unsupported, "canonical integrals need a confining potential");
  require(system.dof <= 2, ErrorCode::unsupported, "canonical quadrature supports dof <= 2");
}

inline SystemSpec single_dof(const SystemSpec& system) {
  SystemSpec s = system;
  s.dof = 1;
  return s;
}

enum class Integrand { lagrangian, hamiltonian };

// Tangent-bundle (or phase-space) integral of the Boltzmann weight for one coordinate.
inline double slice_integral(const SystemSpec& one, double beta, Integrand which, double rel_tol) {
  const auto qr = position_rule(one.potential, beta, rel_tol);
  const auto vr = kinetic_rule(beta);
  double acc = 0.0;
  std::vector<double> q(1), v(1);
  for (std::size_t j = 0; j < qr.size(); ++j) {
    double inner = 0.0;
    q[0] = qr.nodes[j];
    for (std::size_t k = 0; k < vr.size(); ++k) {
      v[0] = vr.nodes[k];
      const double f = which == Integrand::lagrangian
                           ? std::exp(beta * lagrangian_eval(one, TangentPoint{q, v}).L)
                           : std::exp(-beta * hamiltonian_eval(one, v, q));
      inner += vr.weights[k] * f;
    }
    acc += qr.weights[j] * inner;
  }
  return acc;
}

inline double quadrature_z(const SystemSpec& system, double beta, Integrand which, double rel_tol) {
  require_quadrature(system);
  const double slice = slice_integral(single_dof(system), beta, which, rel_tol) / system.units.h();
  return std::pow(slice, static_cast<double>(system.dof));
}

// Per-coordinate Gaussian mixture centred at every global minimum of V, with the
// local curvature as precision (1/beta variance where the curvature is not positive).
struct ImportanceProposal {
  std::vector<double> centers;
  std::vector<double> sigmas;
  double velocity_sigma = 1.0;

  ImportanceProposal(const PotentialSpec& v, double beta) {
    const auto minimum = v.minimum();
    centers = minimum.locations;
    for (double m : centers) {
      const double k = v.second_derivative(m);
      sigmas.push_back(k > 0.0 ? 1.0 / std::sqrt(beta * k) : 1.0 / std::sqrt(beta));
    }
    velocity_sigma = 1.0 / std::sqrt(beta);
  }

  [[nodiscard]] double log_density_q(double q) const {
    double acc = 0.0;
    const double weight = 1.0 / static_cast<double>(centers.size());
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double z = (q - centers[c]) / sigmas[c];
      acc += weight * std::exp(-0.5 * z * z) / (sigmas[c] * std::sqrt(2.0 * std::numbers::pi));
    }
    return std::log(acc);
  }

  [[nodiscard]] double log_density_v(double v) const {
    const double z = v / velocity_sigma;
    return -0.5 * z * z - std::log(velocity_sigma * std::sqrt(2.0 * std::numbers::pi));
  }
};

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * n * o.n / total;
    n = total;
  }
};

struct ImportanceEstimate {
  double z = 0.0;
  double stderr = 0.0;
  double ess_fraction = 0.0;
};

// Importance-sampling estimate of Z; both integrands consume identical draws.
inline ImportanceEstimate importance_z(const SystemSpec& system, double beta, Integrand which,
                                       std::uint64_t budget, std::uint64_t seed) {
  require(system.potential.confining(), ErrorCode::unsupported, "canonical integrals need a confining potential");
  require(budget >= 2, ErrorCode::precondition, "importance sampling budget must be >= 2");
  const std::size_t d = system.dof;
  const ImportanceProposal proposal(system.potential, beta);
  Moments all;
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  for (std::uint64_t s = 0; s < kDefaultStreams; ++s) {
    auto engine = stream_engine(seed, s);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> component(0, proposal.centers.size() - 1);
    std::vector<double> q(d), v(d);
    Moments local;
    double lw = 0.0;
    double lw2 = 0.0;
    const std::uint64_t n = stream_share(budget, kDefaultStreams, s);
    for (std::uint64_t k = 0; k < n; ++k) {
      double log_g = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t c = proposal.centers.size() > 1 ? component(engine) : 0;
        q[i] = proposal.centers[c] + proposal.sigmas[c] * normal(engine);
        v[i] = proposal.velocity_sigma * normal(engine);
        log_g += proposal.log_density_q(q[i]) + proposal.log_density_v(v[i]);
      }
      const double log_f = which == Integrand::lagrangian ? beta * lagrangian_eval(system, TangentPoint{q, v}).L
                                                          : -beta * hamiltonian_eval(system, v, q);
      const double w = std::exp(log_f - log_g);
      local.push(w);
      lw += w;
      lw2 += w * w;
    }
    all.merge(local);
    sum_w += lw;
    sum_w2 += lw2;
  }
  const double hd = std::pow(system.units.h(), static_cast<double>(d));
  ImportanceEstimate out;
  out.z = all.mean / hd;
  // Each weight carries a few ulps of systematic evaluation error that averaging does not
  // remove; a near-exact proposal would otherwise report a stderr below one ulp of Z.
  const double rounding = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(out.z);
  out.stderr = std::hypot(std::sqrt(all.m2 / (all.n - 1.0) / all.n) / hd, rounding);
  out.ess_fraction = sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 / all.n : 0.0;
  return out;
}

inline double analytic_z(const SystemSpec& system, double beta) {
  require(system.potential.is_harmonic(), ErrorCode::unsupported,
          "analytic partition function is available for the harmonic oscillator only");
  return std::pow(1.0 / (beta * system.units.hbar() * system.potential.omega()), static_cast<double>(system.dof));
}

}  // namespace detail

/// Z = (1/h^d) integral exp(beta L) dGamma.
inline ThermoResult partition_function(const SystemSpec& system, InverseTemperature beta, CanonMethod method,
                                       std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  ThermoResult r;
  r.beta = beta.beta();
  r.method = method;
  switch (method) {
    case CanonMethod::analytic:
      r.Z = detail::analytic_z(system, beta.beta());
      break;
    case CanonMethod::quadrature: {
      r.Z = detail::quadrature_z(system, beta.beta(), detail::Integrand::lagrangian, detail::kPositionTolerance);
      const double fine = detail::quadrature_z(system, beta.beta(), detail::Integrand::lagrangian,
                                               detail::kPositionTolerance * 1e-2);
      r.stderr = std::abs(r.Z - fine);
      break;
    }
    case CanonMethod::importance_mc: {
      const auto est = detail::importance_z(system, beta.beta(), detail::Integrand::lagrangian, budget, seed);
      r.Z = est.z;
      r.stderr = est.stderr;
      if (est.ess_fraction < 0.01) {
        r.warnings.push_back("low effective sample size fraction: " + std::to_string(est.ess_fraction));
      }
      break;
    }
  }
  detail::require(r.Z > 0.0 && std::isfinite(r.Z), ErrorCode::numerical, "partition function not positive");
  return r;
}

/// Metropolis chain targeting rho ~ exp(beta L) on the tangent bundle.
inline SampleSet sample_canonical(const SystemSpec& system, InverseTemperature beta, const ChainConfig& cfg) {
  detail::require(cfg.n_samples > cfg.burn_in, ErrorCode::precondition, "n_samples must exceed burn_in");
  detail::require(cfg.thinning >= 1, ErrorCode::precondition, "thinning must be >= 1");
  const double scale = cfg.proposal_scale.value_or(1.0 / std::sqrt(beta.beta()));
  detail::require(std::isfinite(scale) && scale > 0.0, ErrorCode::precondition, "proposal_scale must be > 0");
  detail::require(system.potential.confining(), ErrorCode::unsupported, "sampling needs a confining potential");

  const std::size_t d = system.dof;
  const double b = beta.beta();
  auto engine = stream_engine(cfg.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TangentPoint x{std::vector<double>(d, system.potential.minimum().locations.front()), std::vector<double>(d, 0.0)};
  double e = lagrangian_eval(system, x).E;
  TangentPoint trial = x;
  SampleSet out;
  out.points.reserve((cfg.n_samples - cfg.burn_in) / cfg.thinning + 1);
  std::uint64_t accepted = 0;
  for (std::uint64_t it = 0; it < cfg.n_samples; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      trial.q[i] = x.q[i] + scale * normal(engine);
      trial.qtilde[i] = x.qtilde[i] + scale * normal(engine);
    }
    const double e_trial = detail::kinetic(trial.qtilde) + system.potential.total(trial.q);
    const double log_ratio = -b * (e_trial - e);
    if (log_ratio >= 0.0 || std::log(unit(engine)) < log_ratio) {
      std::swap(x, trial);
      e = e_trial;
      ++accepted;
    }
    if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thinning == 0) out.points.push_back(x);
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_samples);
  if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.95) {
    out.warnings.push_back("acceptance rate " + std::to_string(out.acceptance_rate) +
                           " outside [0.05, 0.95]; retune proposal_scale");
  }
  return out;
}

enum class EnsembleMethod { quadrature, metropolis };

namespace detail {

struct WeightedPoint {
  double q;
  double v;
  double w;
};

// Slice grid for one coordinate with weights W_j W_k exp(-beta E); negligible nodes pruned.
inline std::vector<WeightedPoint> weighted_slice(const PotentialSpec& pot, double beta, double rel_tol,
                                                std::size_t order) {
  const auto qr = position_rule(pot, beta, rel_tol);
  const auto vr = kinetic_rule(beta, order);
  std::vector<WeightedPoint> pts;
  double wmax = 0.0;
  for (std::size_t j = 0; j < qr.size(); ++j) {
    for (std::size_t k = 0; k < vr.size(); ++k) {
      const double v = vr.nodes[k];
      const double w = qr.weights[j] * vr.weights[k] * std::exp(-beta * (0.5 * v * v + pot.value(qr.nodes[j])));
      pts.push_back({qr.nodes[j], v, w});
      wmax = std::max(wmax, w);
    }
  }
  std::erase_if(pts, [wmax](const WeightedPoint& p) { return p.w < 1e-18 * wmax; });
  return pts;
}

inline double quadrature_average(const SystemSpec& system, const Observable& Q, double beta, double rel_tol,
                                 std::size_t order) {
  require_quadrature(system);
  const auto slice = weighted_slice(system.potential, beta, rel_tol, order);
  TangentPoint x{std::vector<double>(system.dof), std::vector<double>(system.dof)};
  double num = 0.0;
  double den = 0.0;
  if (system.dof == 1) {
    for (const auto& p : slice) {
      x.q[0] = p.q;
      x.qtilde[0] = p.v;
      num += p.w * Q.value(system, x);
      den += p.w;
    }
  } else {
    for (const auto& a : slice) {
      x.q[0] = a.q;
      x.qtilde[0] = a.v;
      for (const auto& b : slice) {
        x.q[1] = b.q;
        x.qtilde[1] = b.v;
        const double w = a.w * b.w;
        num += w * Q.value(system, x);
        den += w;
      }
    }
  }
  return num / den;
}

}  // namespace detail

/// <Q> under rho ~ exp(beta L) by tensor quadrature (error = refinement delta).
inline EnsembleEstimate ensemble_average_quadrature(const SystemSpec& system, const Observable& Q,
                                                    InverseTemperature beta) {
  EnsembleEstimate est;
  est.method = "quadrature";
  const double b = beta.beta();
  double fine = 0.0;
  if (system.dof == 1) {
    est.value = detail::quadrature_average(system, Q, b, detail::kPositionTolerance, detail::kHermiteOrder);
    fine = detail::quadrature_average(system, Q, b, detail::kPositionTolerance * 1e-2, detail::kHermiteOrder);
  } else {
    est.value = detail::quadrature_average(system, Q, b, detail::kPositionTolerance2d, detail::kHermiteOrder2d);
    fine = detail::quadrature_average(system, Q, b, detail::kPositionTolerance2d * 1e-1,
                                      detail::kHermiteOrder2dFine);
  }
  est.stderr = std::abs(est.value - fine);
  return est;
}

/// <Q> from a Metropolis chain (error = batch-means standard error).
inline EnsembleEstimate ensemble_average_metropolis(const SystemSpec& system, const Observable& Q,
                                                    InverseTemperature beta, const ChainConfig& cfg) {
  const auto samples = sample_canonical(system, beta, cfg);
  detail::require(samples.points.size() >= 64, ErrorCode::precondition, "chain too short for batch means");
  std::vector<double> values(samples.points.size());
  std::transform(samples.points.begin(), samples.points.end(), values.begin(),
                 [&](const TangentPoint& x) { return Q.value(system, x); });
  EnsembleEstimate est;
  est.method = "metropolis";
  est.value = numerics::mean(values);
  est.stderr = numerics::batch_means_stderr(values);
  est.warnings = samples.warnings;
  return est;
}

inline EnsembleEstimate ensemble_average(const SystemSpec& system, const Observable& Q, InverseTemperature beta,
                                         EnsembleMethod method, const ChainConfig& cfg = {}) {
  return method == EnsembleMethod::quadrature ? ensemble_average_quadrature(system, Q, beta)
                                              : ensemble_average_metropolis(system, Q, beta, cfg);
}

/// U = -d ln Z / d beta (central difference), F = -kB T ln Z, S = (U - F)/T.
inline ThermoResult thermodynamics(const SystemSpec& system, InverseTemperature beta, double dbeta,
                                   CanonMethod method, std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  detail::require(std::isfinite(dbeta) && dbeta > 0.0, ErrorCode::precondition, "dbeta must be > 0");
  detail::require(beta.beta() - dbeta > 0.0, ErrorCode::precondition, "beta - dbeta must stay positive");
  auto r = partition_function(system, beta, method, budget, seed);
  const double up = partition_function(system, InverseTemperature(beta.beta() + dbeta), method, budget, seed).Z;
  const double down = partition_function(system, InverseTemperature(beta.beta() - dbeta), method, budget, seed).Z;
  const double T = beta.temperature(system.units);
  r.U = -(std::log(up) - std::log(down)) / (2.0 * dbeta);
  r.F = -system.units.kB() * T * std::log(r.Z);
  r.S = (*r.U - *r.F) / T;
  return r;
}

struct EquivalenceResult {
  double Z_lagrangian = 0.0;
  double Z_hamiltonian = 0.0;
  double ratio = 0.0;
};

/// Z from the tangent bundle (weight exp(beta L)) against Z from phase space
/// (weight exp(-beta H)) under identical numerical settings.
inline EquivalenceResult hamiltonian_equivalence(const SystemSpec& system, InverseTemperature beta, CanonMethod method,
                                                 std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  EquivalenceResult r;
  const double b = beta.beta();
  switch (method) {
    case CanonMethod::analytic:
      r.Z_lagrangian = detail::analytic_z(system, b);
      r.Z_hamiltonian = detail::analytic_z(system, b);
      break;
    case CanonMethod::quadrature:
      r.Z_lagrangian = detail::quadrature_z(system, b, detail::Integrand::lagrangian, detail::kPositionTolerance);
      r.Z_hamiltonian = detail::quadrature_z(system, b, detail::Integrand::hamiltonian, detail::kPositionTolerance);
      break;
    case CanonMethod::importance_mc:
      r.Z_lagrangian = detail::importance_z(system, b, detail::Integrand::lagrangian, budget, seed).z;
      r.Z_hamiltonian = detail::importance_z(system, b, detail::Integrand::hamiltonian, budget, seed).z;
      break;
  }
  r.ratio = r.Z_lagrangian / r.Z_hamiltonian;
  return r;
}

}  // namespace tangentstat

#endif  // TANGENTSTAT_CANONICAL_HPP
