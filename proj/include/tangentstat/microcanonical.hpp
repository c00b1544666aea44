#ifndef TANGENTSTAT_MICROCANONICAL_HPP
#define TANGENTSTAT_MICROCANONICAL_HPP

#include <cmath>
#include <cstdint>
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

enum class MicroMethod { analytic, quadrature, hit_or_miss };

inline std::string to_string(MicroMethod m) {
  switch (m) {
    case MicroMethod::analytic: return "analytic";
    case MicroMethod::quadrature: return "quadrature";
    case MicroMethod::hit_or_miss: return "hit-or-miss";
  }
  return "unknown";
}

/// Microcanonical quantities at energy U. Omega is the dimensionless count
/// measure{E <= U} / h^d; sigma is dOmega/dU in the same normalization.
struct MicroResult {
  double U = 0.0;
  double omega = 0.0;
  std::optional<double> sigma;
  std::optional<double> S;
  std::optional<double> T;
  MicroMethod method = MicroMethod::analytic;
  double stderr = 0.0;
  double kB = 1.0;
  std::vector<std::string> warnings;
};

/// Box on (qtilde, q) that contains {E <= U_max}, padded 10% beyond the shell.
struct IntegrationDomain {
  std::vector<Interval> q;
  std::vector<Interval> qtilde;

  [[nodiscard]] double volume() const {
    double v = 1.0;
    for (const auto& b : q) v *= b.width();
    for (const auto& b : qtilde) v *= b.width();
    return v;
  }
};

namespace detail {

inline void require_confining(const SystemSpec& system) {
  require(system.potential.confining(), ErrorCode::unsupported,
          "ensemble integrals need a confining potential");
}

inline double minimum_energy(const SystemSpec& system) {
  return static_cast<double>(system.dof) * system.potential.minimum().value;
}

inline double ball_volume(std::size_t dims, double radius) {
  const double k = static_cast<double>(dims);
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0) * std::pow(radius, k);
}

// Physical measure of {sum_{i >= level} qtilde_i^2/2 + V(q_i) - Vmin <= budget} over the
// remaining coordinates. The velocities are integrated in closed form (a ball), the
// positions by nested endpoint-regular quadrature between turning points.
inline double shell_measure(const SystemSpec& system, double vmin, std::size_t level, double budget,
                            double rel_tol) {
  if (budget <= 0.0) return 0.0;
  if (level == system.dof) return ball_volume(system.dof, std::sqrt(2.0 * budget));
  double acc = 0.0;
  for (const auto& iv : system.potential.sublevel_intervals(vmin + budget)) {
    auto inner = [&](double q) {
      return shell_measure(system, vmin, level + 1, budget - (system.potential.value(q) - vmin), rel_tol);
    };
    acc += numerics::endpoint_regular_integral(inner, iv.lo, iv.hi, rel_tol);
  }
  return acc;
}

inline double analytic_omega(const SystemSpec& system, double excess) {
  require(system.potential.is_harmonic(), ErrorCode::unsupported,
          "analytic microcanonical volume is available for the harmonic oscillator only");
  const double d = static_cast<double>(system.dof);
  return std::pow(excess / (system.units.hbar() * system.potential.omega()), d) / std::tgamma(d + 1.0);
}

inline double quadrature_omega(const SystemSpec& system, double excess) {
  require(system.dof <= 2, ErrorCode::unsupported, "quadrature volume supports dof <= 2");
  const double vmin = system.potential.minimum().value;
  const double measure = shell_measure(system, vmin, 0, excess, 1e-11);
  return measure / std::pow(system.units.h(), static_cast<double>(system.dof));
}

inline double energy_of(const SystemSpec& system, const std::vector<double>& q, const std::vector<double>& qt) {
  return kinetic(qt) + system.potential.total(q);
}

struct HitCounts {
  std::uint64_t below_low = 0;   // E <= low
  std::uint64_t below_high = 0;  // E <= high
  std::uint64_t samples = 0;
};

// Uniform samples over the domain; counts E <= low and E <= high with common draws.
inline HitCounts hit_or_miss_counts(const SystemSpec& system, const IntegrationDomain& box, double low,
                                    double high, std::uint64_t budget, std::uint64_t seed) {
  require(budget >= 1, ErrorCode::precondition, "hit-or-miss budget must be >= 1");
  const std::size_t d = system.dof;
  HitCounts total;
  for (std::uint64_t s = 0; s < kDefaultStreams; ++s) {
    auto engine = stream_engine(seed, s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> q(d), qt(d);
    const std::uint64_t n = stream_share(budget, kDefaultStreams, s);
    HitCounts local;
    for (std::uint64_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        q[i] = box.q[i].lo + box.q[i].width() * unit(engine);
        qt[i] = box.qtilde[i].lo + box.qtilde[i].width() * unit(engine);
      }
      const double e = energy_of(system, q, qt);
      local.below_low += e <= low ? 1 : 0;
      local.below_high += e <= high ? 1 : 0;
    }
    local.samples = n;
    total.below_low += local.below_low;
    total.below_high += local.below_high;
    total.samples += local.samples;
  }
  return total;
}

inline void require_energy(const SystemSpec& system, double U) {
  require(std::isfinite(U), ErrorCode::domain, "energy must be finite");
  require(U >= minimum_energy(system), ErrorCode::empty_shell, "energy below the potential minimum");
}

}  // namespace detail

inline IntegrationDomain integration_domain(const SystemSpec& system, double U_max) {
  detail::require_confining(system);
  const double vmin = system.potential.minimum().value;
  const double excess = U_max - detail::minimum_energy(system);
  detail::require(excess >= 0.0, ErrorCode::empty_shell, "energy below the potential minimum");

  const auto intervals = system.potential.sublevel_intervals(vmin + excess);
  Interval hull{intervals.empty() ? 0.0 : intervals.front().lo, intervals.empty() ? 0.0 : intervals.back().hi};
  if (intervals.empty()) {
    const double at = system.potential.minimum().locations.front();
    hull = {at, at};
  }
  const double vmax = std::sqrt(2.0 * excess);
  auto pad = [](Interval iv) {
    const double c = 0.5 * (iv.lo + iv.hi);
    const double r = 0.5 * iv.width() * 1.1;
    return Interval{c - r, c + r};
  };
  IntegrationDomain box{std::vector<Interval>(system.dof, pad(hull)),
                        std::vector<Interval>(system.dof, pad({-vmax, vmax}))};

  // Every boundary face must lie outside the shell.
  auto engine = stream_engine(0x626f78u, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = system.dof;
  std::vector<double> q(d), qt(d);
  for (std::size_t face = 0; face < 4 * d && excess > 0.0; ++face) {
    for (int k = 0; k < 256; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        q[i] = box.q[i].lo + box.q[i].width() * unit(engine);
        qt[i] = box.qtilde[i].lo + box.qtilde[i].width() * unit(engine);
      }
      const std::size_t coord = face / 4;
      const bool upper = face % 2 == 1;
      auto& target = (face / 2) % 2 == 0 ? q : qt;
      const auto& bounds = (face / 2) % 2 == 0 ? box.q[coord] : box.qtilde[coord];
      target[coord] = upper ? bounds.hi : bounds.lo;
      detail::require(detail::energy_of(system, q, qt) > U_max, ErrorCode::numerical,
                      "integration box does not contain the energy shell");
    }
  }
  return box;
}

/// Omega(U) = measure{E <= U} / h^d.
inline MicroResult volume_below(const SystemSpec& system, double U, MicroMethod method,
                                std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  detail::require_confining(system);
  detail::require_energy(system, U);
  const double excess = U - detail::minimum_energy(system);
  MicroResult r;
  r.U = U;
  r.method = method;
  r.kB = system.units.kB();
  switch (method) {
    case MicroMethod::analytic:
      r.omega = detail::analytic_omega(system, excess);
      break;
    case MicroMethod::quadrature:
      r.omega = detail::quadrature_omega(system, excess);
      break;
    case MicroMethod::hit_or_miss: {
      if (excess == 0.0) break;
      const auto box = integration_domain(system, U);
      const auto counts = detail::hit_or_miss_counts(system, box, U, U, budget, seed);
      const double n = static_cast<double>(counts.samples);
      const double p = static_cast<double>(counts.below_high) / n;
      const double scale = box.volume() / std::pow(system.units.h(), static_cast<double>(system.dof));
      r.omega = scale * p;
      r.stderr = scale * std::sqrt(p * (1.0 - p) / n);
      break;
    }
  }
  return r;
}

/// Sigma(U) ~ [Omega(U + eps/2) - Omega(U - eps/2)] / eps.
inline MicroResult shell_density(const SystemSpec& system, double U, double epsilon, MicroMethod method,
                                 std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  detail::require_confining(system);
  detail::require(std::isfinite(epsilon) && epsilon > 0.0, ErrorCode::precondition, "epsilon must be > 0");
  detail::require_energy(system, U);
  const double emin = detail::minimum_energy(system);
  detail::require(U > emin, ErrorCode::empty_shell, "shell density needs U above the minimum energy");
  const double high = U + 0.5 * epsilon;
  const double low = std::max(U - 0.5 * epsilon, emin);

  MicroResult r;
  r.U = U;
  r.method = method;
  r.kB = system.units.kB();
  if (method == MicroMethod::hit_or_miss) {
    const auto box = integration_domain(system, high);
    const auto counts = detail::hit_or_miss_counts(system, box, low, high, budget, seed);
    const double n = static_cast<double>(counts.samples);
    const double scale = box.volume() / std::pow(system.units.h(), static_cast<double>(system.dof));
    const double p_window = static_cast<double>(counts.below_high - counts.below_low) / n;
    r.sigma = scale * p_window / epsilon;
    r.stderr = scale * std::sqrt(p_window * (1.0 - p_window) / n) / epsilon;
    r.omega = volume_below(system, U, method, budget, seed).omega;
  } else {
    const double up = volume_below(system, high, method).omega;
    const double down = low > emin ? volume_below(system, low, method).omega : 0.0;
    r.sigma = (up - down) / epsilon;
    r.omega = volume_below(system, U, method).omega;
  }
  if (r.omega > 0.0 && epsilon * *r.sigma / r.omega > 0.1) {
    r.warnings.push_back("energy window too coarse: eps*Sigma/Omega = " +
                         std::to_string(epsilon * *r.sigma / r.omega));
  }
  return r;
}

/// S = kB ln Omega(U).
inline MicroResult entropy_micro(const SystemSpec& system, double U, MicroMethod method,
                                 std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  MicroResult r = volume_below(system, U, method, budget, seed);
  detail::require(r.omega > 0.0, ErrorCode::undefined_entropy, "entropy undefined for Omega = 0");
  r.S = r.kB * std::log(r.omega);
  r.stderr = r.kB * r.stderr / r.omega;
  return r;
}

/// 1/T = dS/dU by central difference with step dU.
inline MicroResult temperature_micro(const SystemSpec& system, double U, double dU, MicroMethod method,
                                     std::uint64_t budget = 1'000'000, std::uint64_t seed = 0) {
  detail::require(std::isfinite(dU) && dU > 0.0, ErrorCode::precondition, "dU must be > 0");
  detail::require_confining(system);
  detail::require_energy(system, U);
  detail::require(U - dU > detail::minimum_energy(system), ErrorCode::precondition,
                  "U - dU must lie above the minimum energy");
  const auto up = entropy_micro(system, U + dU, method, budget, seed);
  const auto down = entropy_micro(system, U - dU, method, budget, seed);
  const double slope = (*up.S - *down.S) / (2.0 * dU);
  detail::require(slope > 0.0 && std::isfinite(slope), ErrorCode::nonphysical_temperature,
                  "dS/dU <= 0 gives no positive temperature");
  MicroResult r = entropy_micro(system, U, method, budget, seed);
  r.T = 1.0 / slope;
  r.stderr = *r.T * *r.T * std::hypot(up.stderr, down.stderr) / (2.0 * dU);
  return r;
}

/// Two separated systems: Omega multiplies, S adds.
inline MicroResult compose_systems(const MicroResult& a, const MicroResult& b) {
  MicroResult r;
  r.U = a.U + b.U;
  r.omega = a.omega * b.omega;
  r.method = a.method == b.method ? a.method : MicroMethod::quadrature;
  r.kB = a.kB;
  if (a.omega > 0.0 && b.omega > 0.0) {
    r.S = a.kB * (std::log(a.omega) + std::log(b.omega));
    r.stderr = r.omega * std::hypot(a.stderr / a.omega, b.stderr / b.omega);
  }
  if (a.T && b.T && *a.T == *b.T) r.T = a.T;
  return r;
}

}  // namespace tangentstat

#endif  // TANGENTSTAT_MICROCANONICAL_HPP
