#ifndef TANGENTSTAT_MODEL_HPP
#define TANGENTSTAT_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tangentstat/errors.hpp"
#include "tangentstat/potential.hpp"

namespace tangentstat {

/// Physical constants. The Planck cell h is always 2*pi*hbar.
class UnitsConfig {
 public:
  UnitsConfig() = default;
  UnitsConfig(double hbar, double kB) : hbar_(hbar), kB_(kB) {
    detail::require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::domain, "hbar must be > 0");
    detail::require(std::isfinite(kB) && kB > 0.0, ErrorCode::domain, "kB must be > 0");
  }

  [[nodiscard]] double hbar() const noexcept { return hbar_; }
  [[nodiscard]] double kB() const noexcept { return kB_; }
  [[nodiscard]] double h() const noexcept { return 2.0 * std::numbers::pi * hbar_; }

  friend bool operator==(const UnitsConfig&, const UnitsConfig&) = default;

 private:
  double hbar_ = 1.0;
  double kB_ = 1.0;
};

/// Thermodynamic bookkeeping; carries no dynamics for a single-particle system.
struct SystemMetadata {
  double volume = 1.0;
  std::size_t particles = 1;
};

/// A mechanical system with unit mass and a separable potential.
struct SystemSpec {
  std::size_t dof = 1;
  PotentialSpec potential = PotentialSpec::harmonic(1.0);
  UnitsConfig units{};
  std::string label{};
  SystemMetadata metadata{};
};

inline SystemSpec make_system(PotentialSpec potential, std::size_t dof = 1, UnitsConfig units = {},
                              std::string label = {}) {
  detail::require(dof >= 1, ErrorCode::domain, "dof must be >= 1");
  return SystemSpec{dof, std::move(potential), units, std::move(label), {}};
}

/// A microstate (qtilde, q) on the tangent bundle; qtilde = dq/dtau.
struct TangentPoint {
  std::vector<double> q;
  std::vector<double> qtilde;

  friend bool operator==(const TangentPoint&, const TangentPoint&) = default;
};

namespace detail {

inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) require(std::isfinite(x), ErrorCode::domain, std::string(what) + " not finite");
}

inline void validate_vector(const SystemSpec& system, std::span<const double> v, const char* what) {
  require(v.size() == system.dof, ErrorCode::domain, std::string(what) + " has wrong length");
  require_finite(v, what);
}

inline void validate_point(const SystemSpec& system, const TangentPoint& x) {
  validate_vector(system, x.q, "q");
  validate_vector(system, x.qtilde, "qtilde");
}

inline double kinetic(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += 0.5 * x * x;
  return acc;
}

}  // namespace detail

inline double potential_eval(const PotentialSpec& spec, std::span<const double> q) {
  detail::require_finite(q, "q");
  return spec.total(q);
}

inline std::vector<double> potential_grad(const PotentialSpec& spec, std::span<const double> q) {
  detail::require_finite(q, "q");
  std::vector<double> g(q.size());
  std::transform(q.begin(), q.end(), g.begin(), [&](double x) { return spec.derivative(x); });
  return g;
}

/// Imaginary-time Lagrangian and the energy it equals up to sign.
struct LagrangianValue {
  double L = 0.0;
  double E = 0.0;
};

/// -L = sum qtilde^2/2 + V(q) = E.
inline LagrangianValue lagrangian_eval(const SystemSpec& system, const TangentPoint& x) {
  detail::validate_point(system, x);
  const double e = detail::kinetic(x.qtilde) + system.potential.total(x.q);
  return {-e, e};
}

/// Reference Hamiltonian H(p, q) = sum p^2/2 + V(q), evaluated with the same arithmetic.
inline double hamiltonian_eval(const SystemSpec& system, std::span<const double> p,
                               std::span<const double> q) {
  detail::validate_vector(system, p, "p");
  detail::validate_vector(system, q, "q");
  return detail::kinetic(p) + system.potential.total(q);
}

/// Function on the tangent bundle. Builtin kinds carry analytic partial derivatives.
class Observable {
 public:
  enum class Kind {
    constant,
    energy,
    lagrangian,
    kinetic,
    potential,
    coordinate,
    velocity,
    monomial,
    custom,
  };

  using Callable = std::function<double(const TangentPoint&)>;

  struct Partials {
    std::vector<double> dq;
    std::vector<double> dqtilde;
  };

  static Observable constant(double c) { return Observable(Kind::constant, c); }
  static Observable energy() { return Observable(Kind::energy); }
  static Observable lagrangian() { return Observable(Kind::lagrangian); }
  static Observable kinetic() { return Observable(Kind::kinetic); }
  static Observable potential() { return Observable(Kind::potential); }
  static Observable coordinate(std::size_t i) { return Observable(Kind::coordinate, 0.0, i); }
  static Observable velocity(std::size_t i) { return Observable(Kind::velocity, 0.0, i); }

  /// prod_i q_i^{q_powers[i]} qtilde_i^{qtilde_powers[i]}; missing entries are zero powers.
  static Observable monomial(std::vector<unsigned> q_powers, std::vector<unsigned> qtilde_powers) {
    Observable o(Kind::monomial);
    o.q_powers_ = std::move(q_powers);
    o.qtilde_powers_ = std::move(qtilde_powers);
    return o;
  }

  static Observable custom(Callable fn, std::string name = "custom") {
    detail::require(static_cast<bool>(fn), ErrorCode::domain, "custom observable needs a callable");
    Observable o(Kind::custom);
    o.fn_ = std::move(fn);
    o.name_ = std::move(name);
    return o;
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t index() const noexcept { return index_; }

  [[nodiscard]] std::string name() const {
    switch (kind_) {
      case Kind::constant: return "constant";
      case Kind::energy: return "energy";
      case Kind::lagrangian: return "lagrangian";
      case Kind::kinetic: return "kinetic";
      case Kind::potential: return "potential";
      case Kind::coordinate: return "coordinate(" + std::to_string(index_) + ")";
      case Kind::velocity: return "velocity(" + std::to_string(index_) + ")";
      case Kind::monomial: return "monomial";
      case Kind::custom: return name_;
    }
    return "unknown";
  }

  [[nodiscard]] double value(const SystemSpec& system, const TangentPoint& x) const {
    switch (kind_) {
      case Kind::constant: return constant_;
      case Kind::energy: return detail::kinetic(x.qtilde) + system.potential.total(x.q);
      case Kind::lagrangian: return -(detail::kinetic(x.qtilde) + system.potential.total(x.q));
      case Kind::kinetic: return detail::kinetic(x.qtilde);
      case Kind::potential: return system.potential.total(x.q);
      case Kind::coordinate: return x.q.at(index_);
      case Kind::velocity: return x.qtilde.at(index_);
      case Kind::monomial: return monomial_value(x, nullptr, 0);
      case Kind::custom: return fn_(x);
    }
    return 0.0;
  }

  [[nodiscard]] Partials partials(const SystemSpec& system, const TangentPoint& x) const {
    const std::size_t d = x.q.size();
    Partials p{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    const double sign = kind_ == Kind::lagrangian ? -1.0 : 1.0;
    switch (kind_) {
      case Kind::constant:
        break;
      case Kind::energy:
      case Kind::lagrangian:
        for (std::size_t i = 0; i < d; ++i) {
          p.dq[i] = sign * system.potential.derivative(x.q[i]);
          p.dqtilde[i] = sign * x.qtilde[i];
        }
        break;
      case Kind::kinetic:
        p.dqtilde = x.qtilde;
        break;
      case Kind::potential:
        for (std::size_t i = 0; i < d; ++i) p.dq[i] = system.potential.derivative(x.q[i]);
        break;
      case Kind::coordinate:
        p.dq.at(index_) = 1.0;
        break;
      case Kind::velocity:
        p.dqtilde.at(index_) = 1.0;
        break;
      case Kind::monomial:
        for (std::size_t i = 0; i < d; ++i) {
          p.dq[i] = monomial_value(x, &x.q, i);
          p.dqtilde[i] = monomial_value(x, &x.qtilde, i);
        }
        break;
      case Kind::custom:
        finite_difference(x, p);
        break;
    }
    return p;
  }

 private:
  explicit Observable(Kind kind, double c = 0.0, std::size_t index = 0)
      : kind_(kind), constant_(c), index_(index) {}

  static unsigned power_at(const std::vector<unsigned>& powers, std::size_t i) {
    return i < powers.size() ? powers[i] : 0u;
  }

  // Monomial value, or its partial along coordinate i of `wrt` when wrt != nullptr.
  double monomial_value(const TangentPoint& x, const std::vector<double>* wrt, std::size_t i) const {
    double acc = 1.0;
    for (std::size_t k = 0; k < x.q.size(); ++k) {
      for (const auto* coords : {&x.q, &x.qtilde}) {
        const auto& powers = coords == &x.q ? q_powers_ : qtilde_powers_;
        unsigned n = power_at(powers, k);
        if (coords == wrt && k == i) {
          if (n == 0) return 0.0;
          acc *= static_cast<double>(n);
          --n;
        }
        acc *= std::pow((*coords)[k], static_cast<int>(n));
      }
    }
    return acc;
  }

  void finite_difference(const TangentPoint& x, Partials& p) const {
    TangentPoint probe = x;
    auto central = [&](std::vector<double>& coords, std::size_t i) {
      const double c = coords[i];
      const double h = 1e-5 * std::max(1.0, std::abs(c));
      coords[i] = c + h;
      const double up = fn_(probe);
      coords[i] = c - h;
      const double down = fn_(probe);
      coords[i] = c;
      return (up - down) / (2.0 * h);
    };
    for (std::size_t i = 0; i < x.q.size(); ++i) {
      p.dq[i] = central(probe.q, i);
      p.dqtilde[i] = central(probe.qtilde, i);
    }
  }

  Kind kind_;
  double constant_ = 0.0;
  std::size_t index_ = 0;
  std::vector<unsigned> q_powers_;
  std::vector<unsigned> qtilde_powers_;
  Callable fn_;
  std::string name_;
};

/// {A,B} = sum_i dA/dqtilde_i dB/dq_i - dA/dq_i dB/dqtilde_i.
inline double lagrange_bracket(const Observable& a, const Observable& b, const TangentPoint& x,
                               const SystemSpec& system) {
  detail::validate_point(system, x);
  const auto pa = a.partials(system, x);
  const auto pb = b.partials(system, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < system.dof; ++i) {
    acc += pa.dqtilde[i] * pb.dq[i] - pa.dq[i] * pb.dqtilde[i];
  }
  detail::require(std::isfinite(acc), ErrorCode::numerical, "non-finite bracket partials");
  return acc;
}

}  // namespace tangentstat

#endif  // TANGENTSTAT_MODEL_HPP
