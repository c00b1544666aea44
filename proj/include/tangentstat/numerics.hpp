#ifndef TANGENTSTAT_NUMERICS_HPP
#define TANGENTSTAT_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "tangentstat/errors.hpp"

namespace tangentstat::numerics {

/// Nodes and weights of a fixed one-dimensional rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  template <class F>
  [[nodiscard]] double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;    // sum of accepted |S2 - S1| / 15 over leaves
  QuadratureRule rule;   // Boole weights on the accepted leaves
};

namespace detail {

template <class F>
struct AdaptiveSimpson {
  F& f;
  int max_depth;
  AdaptiveResult out;

  void leaf(double a, double b, const double (&fx)[5]) {
    const double h = (b - a) / 90.0;
    const double w[5] = {7.0 * h, 32.0 * h, 12.0 * h, 32.0 * h, 7.0 * h};
    const double step = 0.25 * (b - a);
    for (int k = 0; k < 5; ++k) {
      const double x = k == 4 ? b : a + step * k;
      if (k == 0 && !out.rule.nodes.empty() && out.rule.nodes.back() == a) {
        out.rule.weights.back() += w[0];
      } else {
        out.rule.nodes.push_back(x);
        out.rule.weights.push_back(w[k]);
      }
      out.value += w[k] * fx[k];
    }
  }

  // fa, fm, fb are f at a, (a+b)/2, b; whole is the Simpson estimate on [a, b].
  void recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
      tangentstat::detail::require(std::abs(delta) <= 15.0 * tol, ErrorCode::accuracy,
                                   "adaptive quadrature exceeded its refinement limit");
      const double fx[5] = {fa, flm, fm, frm, fb};
      leaf(a, b, fx);
      out.error += std::abs(delta) / 15.0;
      return;
    }
    recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
    recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace detail

/// Adaptive Simpson on [a, b] with Richardson-corrected (Boole) leaves.
/// The tolerance is relative to a coarse estimate of the integral; `abs_floor`
/// bounds it from below for integrals that are (near) zero.
template <class F>
AdaptiveResult adaptive_simpson(F&& f, double a, double b, double rel_tol,
                                std::size_t initial_panels = 16, int max_depth = 48,
                                double abs_floor = 1e-300) {
  tangentstat::detail::require(b > a, ErrorCode::precondition, "empty integration interval");
  const std::size_t n = initial_panels;
  const double width = (b - a) / static_cast<double>(n);
  std::vector<double> edge(n + 1), mid(n);
  for (std::size_t i = 0; i <= n; ++i) edge[i] = f(i == n ? b : a + width * static_cast<double>(i));
  double coarse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mid[i] = f(a + width * (static_cast<double>(i) + 0.5));
    coarse += width / 6.0 * (edge[i] + 4.0 * mid[i] + edge[i + 1]);
  }
  const double tol = std::max(rel_tol * std::abs(coarse), abs_floor) / static_cast<double>(n);
  detail::AdaptiveSimpson<F> engine{f, max_depth, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = i + 1 == n ? b : a + width * static_cast<double>(i + 1);
    const double whole = (hi - lo) / 6.0 * (edge[i] + 4.0 * mid[i] + edge[i + 1]);
    engine.recurse(lo, hi, edge[i], mid[i], edge[i + 1], whole, tol, 0);
  }
  return std::move(engine.out);
}

/// Integral over [a, b] of a function with square-root behaviour at both endpoints,
/// computed in the variable theta with q = (a+b)/2 - (b-a)/2 cos(theta).
template <class F>
double endpoint_regular_integral(F&& f, double a, double b, double rel_tol) {
  if (!(b > a)) return 0.0;
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  auto g = [&](double theta) { return f(c - r * std::cos(theta)) * r * std::sin(theta); };
  return adaptive_simpson(g, 0.0, std::numbers::pi, rel_tol, 16).value;
}

/// Gauss-Hermite rule for the weight exp(-x^2) (physicists' convention).
inline QuadratureRule gauss_hermite(std::size_t n) {
  tangentstat::detail::require(n >= 1, ErrorCode::precondition, "Gauss-Hermite order must be >= 1");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const std::size_t m = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    // Initial guesses for the largest roots first, then extrapolate from previous ones.
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Orthonormal Hermite recurrence.
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) rule.nodes[m - 1] = 0.0;
  return rule;
}

inline double mean(std::span<const double> x) {
  tangentstat::detail::require(!x.empty(), ErrorCode::precondition, "mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> x) {
  tangentstat::detail::require(x.size() >= 2, ErrorCode::precondition, "variance needs two samples");
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

/// Standard error of the mean of a correlated series by non-overlapping batch means.
inline double batch_means_stderr(std::span<const double> x, std::size_t n_batches = 32) {
  tangentstat::detail::require(x.size() >= 2, ErrorCode::precondition, "stderr needs two samples");
  n_batches = std::min(n_batches, x.size());
  n_batches = std::max<std::size_t>(n_batches, 2);
  const std::size_t size = x.size() / n_batches;
  std::vector<double> means(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    means[b] = mean(x.subspan(b * size, size));
  }
  return std::sqrt(variance(means) / static_cast<double>(n_batches));
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
template <class F>
double golden_section_maximize(F&& f, double a, double b, double tol = 1e-12, int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (b - a) > tol * (std::abs(a) + std::abs(b) + 1e-300); ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace tangentstat::numerics

#endif  // TANGENTSTAT_NUMERICS_HPP
