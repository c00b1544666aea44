#ifndef TANGENTSTAT_POTENTIAL_HPP
#define TANGENTSTAT_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "tangentstat/errors.hpp"

namespace tangentstat {

struct Harmonic {
  double omega = 1.0;
};

/// V(q) = sum_k coeffs[k] q^k (ascending powers).
struct Polynomial {
  std::vector<double> coeffs;
};

/// V(q) = (q^2 - a^2)^2 / 4.
struct DoubleWell {
  double a = 1.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const noexcept { return hi - lo; }
};

/// One-dimensional potential applied independently to every coordinate.
class PotentialSpec {
 public:
  using Kind = std::variant<Harmonic, Polynomial, DoubleWell>;

  static PotentialSpec harmonic(double omega) {
    detail::require(std::isfinite(omega) && omega > 0.0, ErrorCode::domain,
                    "harmonic potential requires omega > 0");
    return PotentialSpec(Harmonic{omega});
  }

  static PotentialSpec polynomial(std::vector<double> coeffs) {
    detail::require(!coeffs.empty(), ErrorCode::domain, "polynomial potential needs coefficients");
    for (double c : coeffs) {
      detail::require(std::isfinite(c), ErrorCode::domain, "polynomial coefficient not finite");
    }
    return PotentialSpec(Polynomial{std::move(coeffs)});
  }

  static PotentialSpec double_well(double a) {
    detail::require(std::isfinite(a) && a > 0.0, ErrorCode::domain,
                    "double-well potential requires a > 0");
    return PotentialSpec(DoubleWell{a});
  }

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] bool is_harmonic() const noexcept { return std::holds_alternative<Harmonic>(kind_); }
  [[nodiscard]] double omega() const { return std::get<Harmonic>(kind_).omega; }

  [[nodiscard]] std::string name() const {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Harmonic>) return "harmonic";
          if constexpr (std::is_same_v<T, Polynomial>) return "polynomial";
          if constexpr (std::is_same_v<T, DoubleWell>) return "double_well";
        },
        kind_);
  }

  /// V(q) for a single coordinate.
  [[nodiscard]] double value(double q) const {
    return std::visit(
        [q](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Harmonic>) {
            return 0.5 * v.omega * v.omega * q * q;
          } else if constexpr (std::is_same_v<T, Polynomial>) {
            return horner(v.coeffs, q);
          } else {
            const double s = q * q - v.a * v.a;
            return 0.25 * s * s;
          }
        },
        kind_);
  }

  /// dV/dq for a single coordinate.
  [[nodiscard]] double derivative(double q) const {
    return std::visit(
        [q](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Harmonic>) {
            return v.omega * v.omega * q;
          } else if constexpr (std::is_same_v<T, Polynomial>) {
            double acc = 0.0;
            for (std::size_t k = v.coeffs.size(); k-- > 1;) {
              acc = acc * q + static_cast<double>(k) * v.coeffs[k];
            }
            return acc;
          } else {
            return q * (q * q - v.a * v.a);
          }
        },
        kind_);
  }

  /// d^2V/dq^2 for a single coordinate.
  [[nodiscard]] double second_derivative(double q) const {
    return std::visit(
        [q](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Harmonic>) {
            return v.omega * v.omega;
          } else if constexpr (std::is_same_v<T, Polynomial>) {
            double acc = 0.0;
            for (std::size_t k = v.coeffs.size(); k-- > 2;) {
              acc = acc * q + static_cast<double>(k * (k - 1)) * v.coeffs[k];
            }
            return acc;
          } else {
            return 3.0 * q * q - v.a * v.a;
          }
        },
        kind_);
  }

  /// True when V grows without bound in both directions, so every sublevel set is compact.
  [[nodiscard]] bool confining() const {
    return std::visit(
        [](const auto& v) -> bool {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Polynomial>) {
            const auto degree = effective_degree(v.coeffs);
            return degree >= 2 && degree % 2 == 0 && v.coeffs[degree] > 0.0;
          } else {
            return true;
          }
        },
        kind_);
  }

  /// Global minimum value of V and every coordinate attaining it.
  struct Minimum {
    double value = 0.0;
    std::vector<double> locations;
  };

  [[nodiscard]] Minimum minimum() const {
    detail::require(confining(), ErrorCode::unsupported, "potential is not confining");
    return std::visit(
        [this](const auto& v) -> Minimum {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Harmonic>) {
            return {0.0, {0.0}};
          } else if constexpr (std::is_same_v<T, DoubleWell>) {
            return {0.0, {-v.a, v.a}};
          } else {
            return polynomial_minimum(v.coeffs);
          }
        },
        kind_);
  }

  /// Maximal intervals on which V(q) <= level, in increasing order.
  [[nodiscard]] std::vector<Interval> sublevel_intervals(double level) const {
    detail::require(confining(), ErrorCode::unsupported, "potential is not confining");
    return std::visit(
        [this, level](const auto& v) -> std::vector<Interval> {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Harmonic>) {
            if (level < 0.0) return {};
            const double r = std::sqrt(2.0 * level) / v.omega;
            return {{-r, r}};
          } else if constexpr (std::is_same_v<T, DoubleWell>) {
            if (level < 0.0) return {};
            const double a2 = v.a * v.a;
            const double spread = 2.0 * std::sqrt(level);
            const double outer = std::sqrt(a2 + spread);
            if (a2 - spread > 0.0) {
              const double inner = std::sqrt(a2 - spread);
              return {{-outer, -inner}, {inner, outer}};
            }
            return {{-outer, outer}};
          } else {
            return polynomial_sublevel(v.coeffs, level);
          }
        },
        kind_);
  }

  /// Sum of V over every coordinate.
  [[nodiscard]] double total(std::span<const double> q) const {
    double acc = 0.0;
    for (double x : q) acc += value(x);
    return acc;
  }

 private:
  explicit PotentialSpec(Kind kind) : kind_(std::move(kind)) {}

  static double horner(const std::vector<double>& c, double q) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * q + c[k];
    return acc;
  }

  static std::size_t effective_degree(const std::vector<double>& c) {
    std::size_t degree = c.size() - 1;
    while (degree > 0 && c[degree] == 0.0) --degree;
    return degree;
  }

  // Every real root of the polynomial lies inside [-R, R].
  static double cauchy_bound(const std::vector<double>& c, std::size_t degree) {
    double m = 0.0;
    for (std::size_t k = 0; k < degree; ++k) m = std::max(m, std::abs(c[k] / c[degree]));
    return 1.0 + m;
  }

  template <class F>
  static std::vector<double> bracketed_roots(F&& f, double lo, double hi, std::size_t grid) {
    std::vector<double> roots;
    const double step = (hi - lo) / static_cast<double>(grid);
    double x0 = lo;
    double f0 = f(x0);
    for (std::size_t i = 1; i <= grid; ++i) {
      const double x1 = (i == grid) ? hi : lo + step * static_cast<double>(i);
      const double f1 = f(x1);
      if (f0 == 0.0) {
        roots.push_back(x0);
      } else if (f0 * f1 < 0.0) {
        std::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(52);
        const auto [a, b] = boost::math::tools::toms748_solve(f, x0, x1, f0, f1, tol, iters);
        roots.push_back(0.5 * (a + b));
      }
      x0 = x1;
      f0 = f1;
    }
    return roots;
  }

  Minimum polynomial_minimum(const std::vector<double>& c) const {
    const auto degree = effective_degree(c);
    std::vector<double> dc(degree);
    for (std::size_t k = 1; k <= degree; ++k) dc[k - 1] = static_cast<double>(k) * c[k];
    const double bound = cauchy_bound(dc, degree - 1);
    auto critical = bracketed_roots([this](double q) { return derivative(q); }, -bound, bound, 8192);
    if (critical.empty()) critical.push_back(0.0);

    double best = std::numeric_limits<double>::infinity();
    for (double q : critical) best = std::min(best, value(q));
    Minimum result{best, {}};
    const double slack = 1e-12 * (1.0 + std::abs(best));
    for (double q : critical) {
      if (value(q) <= best + slack) result.locations.push_back(q);
    }
    return result;
  }

  std::vector<Interval> polynomial_sublevel(const std::vector<double>& c, double level) const {
    const auto degree = effective_degree(c);
    std::vector<double> shifted(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(degree) + 1);
    shifted[0] -= level;
    const double bound = cauchy_bound(shifted, degree);
    auto excess = [this, level](double q) { return value(q) - level; };
    const auto roots = bracketed_roots(excess, -bound, bound, 8192);

    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
      const double mid = 0.5 * (roots[i] + roots[i + 1]);
      if (excess(mid) <= 0.0) {
        if (!out.empty() && out.back().hi == roots[i]) {
          out.back().hi = roots[i + 1];
        } else {
          out.push_back({roots[i], roots[i + 1]});
        }
      }
    }
    return out;
  }

  Kind kind_;
};

}  // namespace tangentstat

#endif  // TANGENTSTAT_POTENTIAL_HPP
