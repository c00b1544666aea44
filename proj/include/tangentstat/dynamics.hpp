#ifndef TANGENTSTAT_DYNAMICS_HPP
#define TANGENTSTAT_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tangentstat/errors.hpp"
#include "tangentstat/model.hpp"

namespace tangentstat {

struct TrajectorySample {
  double tau = 0.0;
  TangentPoint point;
};

/// Solution of dq/dtau = qtilde, dqtilde/dtau = -grad V on a uniform grid.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  double step = 0.0;
  bool partial_final_step = false;
};

namespace detail {

// One classical RK4 step of the first-order imaginary-time flow, in place.
inline void rk4_step(const PotentialSpec& v, std::vector<double>& q, std::vector<double>& qt,
                     double h) {
  const std::size_t d = q.size();
  thread_local std::vector<double> buf;
  buf.resize(10 * d);
  double* k1q = buf.data();
  double* k1v = k1q + d;
  double* k2q = k1v + d;
  double* k2v = k2q + d;
  double* k3q = k2v + d;
  double* k3v = k3q + d;
  double* k4q = k3v + d;
  double* k4v = k4q + d;
  double* yq = k4v + d;
  double* yv = yq + d;

  for (std::size_t i = 0; i < d; ++i) {
    k1q[i] = qt[i];
    k1v[i] = -v.derivative(q[i]);
    yq[i] = q[i] + 0.5 * h * k1q[i];
    yv[i] = qt[i] + 0.5 * h * k1v[i];
  }
  for (std::size_t i = 0; i < d; ++i) {
    k2q[i] = yv[i];
    k2v[i] = -v.derivative(yq[i]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    yq[i] = q[i] + 0.5 * h * k2q[i];
    yv[i] = qt[i] + 0.5 * h * k2v[i];
  }
  for (std::size_t i = 0; i < d; ++i) {
    k3q[i] = yv[i];
    k3v[i] = -v.derivative(yq[i]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    yq[i] = q[i] + h * k3q[i];
    yv[i] = qt[i] + h * k3v[i];
  }
  for (std::size_t i = 0; i < d; ++i) {
    k4q[i] = yv[i];
    k4v[i] = -v.derivative(yq[i]);
  }
  for (std::size_t i = 0; i < d; ++i) {
    q[i] += h / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
    qt[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
  }
}

inline void check_finite_state(const TangentPoint& x, double tau) {
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(x.q.begin(), x.q.end(), finite) ||
      !std::all_of(x.qtilde.begin(), x.qtilde.end(), finite)) {
    throw BlowUpError(tau, x.q, x.qtilde);
  }
}

inline void require_step(double dtau) {
  require(std::isfinite(dtau) && dtau > 0.0, ErrorCode::precondition, "dtau must be finite and > 0");
}

// Step sizes covering [0, duration] with steps of dtau and at most one shorter final step.
struct StepPlan {
  std::size_t full_steps = 0;
  double remainder = 0.0;

  [[nodiscard]] std::size_t count() const noexcept { return full_steps + (remainder > 0.0 ? 1 : 0); }
  [[nodiscard]] double size(std::size_t i, double dtau) const noexcept {
    return i < full_steps ? dtau : remainder;
  }
};

inline StepPlan plan_steps(double duration, double dtau) {
  const double ratio = duration / dtau;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
    return {static_cast<std::size_t>(nearest), 0.0};
  }
  const auto full = static_cast<std::size_t>(std::floor(ratio));
  return {full, duration - static_cast<double>(full) * dtau};
}

}  // namespace detail

/// One RK4 step of length dtau.
inline TangentPoint flow_step(const SystemSpec& system, const TangentPoint& x, double dtau) {
  detail::require_step(dtau);
  detail::validate_point(system, x);
  TangentPoint y = x;
  detail::rk4_step(system.potential, y.q, y.qtilde, dtau);
  detail::check_finite_state(y, dtau);
  return y;
}

inline Trajectory integrate(const SystemSpec& system, const TangentPoint& x0, double tau_end,
                            double dtau) {
  detail::require_step(dtau);
  detail::require(std::isfinite(tau_end) && tau_end > 0.0, ErrorCode::precondition,
                  "tau_end must be > 0");
  detail::validate_point(system, x0);
  const auto plan = detail::plan_steps(tau_end, dtau);
  Trajectory traj;
  traj.step = dtau;
  traj.partial_final_step = plan.remainder > 0.0;
  traj.samples.reserve(plan.count() + 1);
  traj.samples.push_back({0.0, x0});
  TangentPoint x = x0;
  for (std::size_t i = 0; i < plan.count(); ++i) {
    detail::rk4_step(system.potential, x.q, x.qtilde, plan.size(i, dtau));
    const double tau = i + 1 == plan.count() ? tau_end : static_cast<double>(i + 1) * dtau;
    detail::check_finite_state(x, tau);
    traj.samples.push_back({tau, x});
  }
  return traj;
}

/// Advance x by duration (no sample storage).
inline TangentPoint advance(const SystemSpec& system, TangentPoint x, double duration, double dtau) {
  detail::require_step(dtau);
  if (duration <= 0.0) return x;
  const auto plan = detail::plan_steps(duration, dtau);
  for (std::size_t i = 0; i < plan.count(); ++i) {
    detail::rk4_step(system.potential, x.q, x.qtilde, plan.size(i, dtau));
    detail::check_finite_state(x, static_cast<double>(i + 1) * dtau);
  }
  return x;
}

/// Max over samples of |E(tau) - E(0)|.
inline double energy_drift(const SystemSpec& system, const Trajectory& traj) {
  detail::require(!traj.samples.empty(), ErrorCode::precondition, "empty trajectory");
  const double e0 = lagrangian_eval(system, traj.samples.front().point).E;
  double drift = 0.0;
  for (const auto& s : traj.samples) {
    drift = std::max(drift, std::abs(lagrangian_eval(system, s.point).E - e0));
  }
  return drift;
}

/// det of the tangent map dx(tau)/dx(0), from the variational equations dM/dtau = J(x) M
/// integrated with the same RK4 step as the flow.
inline double jacobian_determinant(const SystemSpec& system, const TangentPoint& x0, double tau,
                                   double dtau) {
  detail::require_step(dtau);
  detail::require(std::isfinite(tau) && tau >= 0.0, ErrorCode::precondition, "tau must be >= 0");
  detail::validate_point(system, x0);
  if (tau == 0.0) return 1.0;

  const std::size_t d = system.dof;
  const auto& v = system.potential;
  using Mat = Eigen::MatrixXd;
  Mat m = Mat::Identity(2 * d, 2 * d);
  std::vector<double> q = x0.q;
  std::vector<double> qt = x0.qtilde;

  // Rows [0, d) are q, rows [d, 2d) are qtilde; J = [[0, I], [-diag V'', 0]].
  auto apply_jacobian = [d](const std::vector<double>& curvature, const Mat& a) {
    Mat out(a.rows(), a.cols());
    out.topRows(d) = a.bottomRows(d);
    for (std::size_t i = 0; i < d; ++i) out.row(d + i) = -curvature[i] * a.row(i);
    return out;
  };
  auto curvature_at = [&](const std::vector<double>& pos) {
    std::vector<double> c(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = v.second_derivative(pos[i]);
    return c;
  };

  const auto plan = detail::plan_steps(tau, dtau);
  std::vector<double> yq(d), yv(d), k1q(d), k1v(d), k2q(d), k2v(d), k3q(d), k3v(d);
  for (std::size_t s = 0; s < plan.count(); ++s) {
    const double h = plan.size(s, dtau);
    // Stage positions of the state RK4; the matrix stages share them.
    for (std::size_t i = 0; i < d; ++i) {
      k1q[i] = qt[i];
      k1v[i] = -v.derivative(q[i]);
    }
    const Mat l1 = apply_jacobian(curvature_at(q), m);
    for (std::size_t i = 0; i < d; ++i) yq[i] = q[i] + 0.5 * h * k1q[i], yv[i] = qt[i] + 0.5 * h * k1v[i];
    for (std::size_t i = 0; i < d; ++i) k2q[i] = yv[i], k2v[i] = -v.derivative(yq[i]);
    const Mat l2 = apply_jacobian(curvature_at(yq), m + 0.5 * h * l1);
    for (std::size_t i = 0; i < d; ++i) yq[i] = q[i] + 0.5 * h * k2q[i], yv[i] = qt[i] + 0.5 * h * k2v[i];
    for (std::size_t i = 0; i < d; ++i) k3q[i] = yv[i], k3v[i] = -v.derivative(yq[i]);
    const Mat l3 = apply_jacobian(curvature_at(yq), m + 0.5 * h * l2);
    for (std::size_t i = 0; i < d; ++i) yq[i] = q[i] + h * k3q[i], yv[i] = qt[i] + h * k3v[i];
    const Mat l4 = apply_jacobian(curvature_at(yq), m + h * l3);
    for (std::size_t i = 0; i < d; ++i) {
      const double k4q = yv[i];
      const double k4v = -v.derivative(yq[i]);
      q[i] += h / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q);
      qt[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v);
    }
    m += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    detail::check_finite_state(TangentPoint{q, qt}, static_cast<double>(s + 1) * dtau);
  }
  const double det = m.partialPivLu().determinant();
  detail::require(std::isfinite(det), ErrorCode::numerical, "non-finite tangent-map determinant");
  return det;
}

/// Polygon in the (q, qtilde) plane of a one-dimensional system, counterclockwise.
struct TangentPolygon {
  std::vector<TangentPoint> vertices;

  /// Axis-aligned square [q_min, q_min+side] x [qt_min, qt_min+side] with
  /// `per_edge` vertices along every edge.
  static TangentPolygon square(double q_min, double qtilde_min, double side, std::size_t per_edge = 1) {
    detail::require(side > 0.0 && per_edge >= 1, ErrorCode::precondition, "invalid square");
    TangentPolygon p;
    const double corners[4][2] = {{q_min, qtilde_min},
                                  {q_min + side, qtilde_min},
                                  {q_min + side, qtilde_min + side},
                                  {q_min, qtilde_min + side}};
    for (int e = 0; e < 4; ++e) {
      const auto& a = corners[e];
      const auto& b = corners[(e + 1) % 4];
      for (std::size_t k = 0; k < per_edge; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(per_edge);
        p.vertices.push_back({{a[0] + t * (b[0] - a[0])}, {a[1] + t * (b[1] - a[1])}});
      }
    }
    return p;
  }

  static TangentPolygon circle(double q_center, double qtilde_center, double radius, std::size_t n) {
    detail::require(radius > 0.0 && n >= 3, ErrorCode::precondition, "invalid circle");
    TangentPolygon p;
    for (std::size_t k = 0; k < n; ++k) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      p.vertices.push_back({{q_center + radius * std::cos(phi)}, {qtilde_center + radius * std::sin(phi)}});
    }
    return p;
  }
};

namespace detail {

struct Vec2 {
  double x;
  double y;
};

inline double signed_area(const std::vector<Vec2>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x); };
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

inline bool self_intersecting(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return true;
    }
  }
  return false;
}

}  // namespace detail

struct AreaSample {
  double tau = 0.0;
  double area = 0.0;
};

struct AreaEvolution {
  std::vector<AreaSample> series;
  std::size_t final_vertices = 0;
  std::vector<std::string> warnings;
};

struct AreaOptions {
  double refine_factor = 10.0;
  std::size_t max_vertices = 200000;
  std::size_t intersection_check_limit = 20000;  // vertex count above which the O(n^2) check is skipped
};

/// Advect every polygon vertex by the flow, reporting the shoelace area at
/// n_checkpoints equally spaced times (plus tau = 0). An edge whose advected length
/// exceeds refine_factor times the spacing it descends from at tau = 0 gets a new vertex
/// at the tau = 0 midpoint, advected over the already executed steps.
inline AreaEvolution area_evolution(const SystemSpec& system, const TangentPolygon& poly, double tau_end,
                                    double dtau, std::size_t n_checkpoints, AreaOptions options = {}) {
  detail::require(system.dof == 1, ErrorCode::precondition, "area tracking requires dof = 1");
  detail::require(poly.vertices.size() >= 3, ErrorCode::precondition, "polygon needs >= 3 vertices");
  detail::require_step(dtau);
  detail::require(std::isfinite(tau_end) && tau_end >= 0.0, ErrorCode::precondition, "tau_end must be >= 0");
  detail::require(n_checkpoints >= 1, ErrorCode::precondition, "need >= 1 checkpoint");
  for (const auto& v : poly.vertices) detail::validate_point(system, v);

  struct Vertex {
    detail::Vec2 origin;   // position at tau = 0
    detail::Vec2 now;
    double spacing;        // reference spacing to the next vertex at tau = 0
  };

  std::vector<Vertex> ring;
  const std::size_t n0 = poly.vertices.size();
  for (std::size_t i = 0; i < n0; ++i) {
    const auto& a = poly.vertices[i];
    const auto& b = poly.vertices[(i + 1) % n0];
    const detail::Vec2 pa{a.q[0], a.qtilde[0]};
    ring.push_back({pa, pa, std::hypot(b.q[0] - a.q[0], b.qtilde[0] - a.qtilde[0])});
  }
  auto positions = [&ring] {
    std::vector<detail::Vec2> out(ring.size());
    std::transform(ring.begin(), ring.end(), out.begin(), [](const Vertex& v) { return v.now; });
    return out;
  };
  {
    const auto initial = positions();
    detail::require(!detail::self_intersecting(initial), ErrorCode::precondition, "polygon is not simple");
    detail::require(detail::signed_area(initial) > 0.0, ErrorCode::precondition,
                    "polygon must be counterclockwise in (q, qtilde)");
  }

  AreaEvolution result;
  result.series.push_back({0.0, detail::signed_area(positions())});
  if (tau_end == 0.0) {
    result.final_vertices = ring.size();
    return result;
  }

  const auto& pot = system.potential;
  std::vector<double> history;  // executed step sizes
  std::vector<double> q(1), qt(1);
  auto step_vertex = [&](detail::Vec2& p, double h) {
    q[0] = p.x;
    qt[0] = p.y;
    detail::rk4_step(pot, q, qt, h);
    p = {q[0], qt[0]};
  };
  auto replay = [&](detail::Vec2 origin) {
    detail::Vec2 p = origin;
    for (double h : history) step_vertex(p, h);
    return p;
  };

  bool capped = false;
  const double segment = tau_end / static_cast<double>(n_checkpoints);
  double tau = 0.0;
  for (std::size_t c = 1; c <= n_checkpoints; ++c) {
    const auto plan = detail::plan_steps(segment, dtau);
    for (std::size_t s = 0; s < plan.count(); ++s) {
      const double h = plan.size(s, dtau);
      for (auto& v : ring) step_vertex(v.now, h);
      history.push_back(h);
      tau += h;
      for (const auto& v : ring) {
        if (!std::isfinite(v.now.x) || !std::isfinite(v.now.y)) {
          throw BlowUpError(tau, {v.now.x}, {v.now.y});
        }
      }
      // Refinement sweep; inserted vertices are checked against their own spacing.
      for (std::size_t i = 0; i < ring.size() && !capped;) {
        const std::size_t j = (i + 1) % ring.size();
        const double len = std::hypot(ring[j].now.x - ring[i].now.x, ring[j].now.y - ring[i].now.y);
        if (len > options.refine_factor * ring[i].spacing) {
          if (ring.size() >= options.max_vertices) {
            capped = true;
            break;
          }
          const detail::Vec2 mid{0.5 * (ring[i].origin.x + ring[j].origin.x),
                                 0.5 * (ring[i].origin.y + ring[j].origin.y)};
          Vertex fresh{mid, replay(mid), ring[i].spacing};
          ring.insert(ring.begin() + static_cast<std::ptrdiff_t>(i) + 1, fresh);
          continue;
        }
        ++i;
      }
    }
    const double t = c == n_checkpoints ? tau_end : segment * static_cast<double>(c);
    const auto pts = positions();
    result.series.push_back({t, detail::signed_area(pts)});
    if (pts.size() <= options.intersection_check_limit) {
      if (detail::self_intersecting(pts)) {
        result.warnings.push_back("self-intersection after advection at tau=" + std::to_string(t));
      }
    } else {
      result.warnings.push_back("self-intersection check skipped at tau=" + std::to_string(t) +
                                " (" + std::to_string(pts.size()) + " vertices)");
    }
  }
  if (capped) result.warnings.push_back("vertex refinement capped at " + std::to_string(options.max_vertices));
  result.final_vertices = ring.size();
  return result;
}

/// rho0 at x0 and at the point x0 is carried to after duration tau.
inline std::pair<double, double> density_along_flow(const SystemSpec& system, const Observable& rho0,
                                                    const TangentPoint& x0, double tau, double dtau) {
  detail::validate_point(system, x0);
  const TangentPoint end = tau > 0.0 ? advance(system, x0, tau, dtau) : x0;
  return {rho0.value(system, x0), rho0.value(system, end)};
}

}  // namespace tangentstat

#endif  // TANGENTSTAT_DYNAMICS_HPP
