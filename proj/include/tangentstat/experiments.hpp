#ifndef TANGENTSTAT_EXPERIMENTS_HPP
#define TANGENTSTAT_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "tangentstat/canonical.hpp"
#include "tangentstat/dynamics.hpp"
#include "tangentstat/errors.hpp"
#include "tangentstat/microcanonical.hpp"
#include "tangentstat/model.hpp"
#include "tangentstat/numerics.hpp"
#include "tangentstat/random.hpp"

namespace tangentstat {

using Json = nlohmann::ordered_json;

/// Named comparison |value - expected| <= tolerance. Checks with status "empty-shell"
/// are informational and do not count toward the report verdict.
struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string status = "ok";
};

/// Plot-ready numeric table; every row has one entry per column.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  std::string name;
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::vector<Check> checks;
  std::uint64_t seed = 0;
  std::vector<Table> tables;

  [[nodiscard]] bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.status == "empty-shell" || c.passed; });
  }

  [[nodiscard]] const Check& check(const std::string& n) const {
    for (const auto& c : checks) {
      if (c.name == n) return c;
    }
    throw Error(ErrorCode::precondition, "no check named " + n);
  }

  void add_check(std::string n, double value, double expected, double tolerance) {
    const bool ok = std::isfinite(value) && std::abs(value - expected) <= tolerance;
    checks.push_back({std::move(n), value, expected, tolerance, ok, ok ? "ok" : "failed"});
  }
};

inline Json system_json(const SystemSpec& s) {
  Json j;
  j["label"] = s.label;
  j["dof"] = s.dof;
  j["potential"] = s.potential.name();
  j["hbar"] = s.units.hbar();
  j["kB"] = s.units.kB();
  return j;
}

// ---------------------------------------------------------------------------
// Harmonic-oscillator reference table.

inline ExperimentReport ho_reference(double omega, InverseTemperature beta, double U, UnitsConfig units = {}) {
  detail::require(std::isfinite(omega) && omega > 0.0, ErrorCode::domain, "omega must be > 0");
  detail::require(std::isfinite(U) && U >= 0.0, ErrorCode::domain, "U must be >= 0");
  const auto sys = make_system(PotentialSpec::harmonic(omega), 1, units, "ho_reference");
  const double hw = units.hbar() * omega;
  const double b = beta.beta();
  const double T = beta.temperature(units);

  ExperimentReport r;
  r.name = "ho_reference";
  r.inputs = {{"omega", omega}, {"beta", b}, {"U", U}, {"hbar", units.hbar()}, {"kB", units.kB()}};

  if (U > 0.0) {
    const double dU = std::min(1e-4, 0.5 * U);
    const auto sigma = shell_density(sys, U, 1e-3, MicroMethod::quadrature);
    const auto omega_q = volume_below(sys, U, MicroMethod::quadrature);
    const auto entropy = entropy_micro(sys, U, MicroMethod::quadrature);
    const auto temp = temperature_micro(sys, U, dU, MicroMethod::quadrature);
    r.add_check("sigma", *sigma.sigma, 1.0 / hw, 1e-4 / hw);
    r.add_check("omega", omega_q.omega, U / hw, 1e-6 * std::max(1.0, U / hw));
    r.add_check("S", *entropy.S, units.kB() * std::log(U / hw), 1e-6 * units.kB());
    r.add_check("T_micro", *temp.T, U / units.kB(), 1e-4 * U / units.kB());
  } else {
    for (const char* n : {"sigma", "omega", "S", "T_micro"}) {
      r.checks.push_back({n, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                          0.0, false, "empty-shell"});
    }
  }

  const auto z = partition_function(sys, beta, CanonMethod::quadrature);
  const auto thermo = thermodynamics(sys, beta, 1e-3 * b, CanonMethod::quadrature);
  const double z_exact = units.kB() * T / hw;
  r.add_check("Z", z.Z, z_exact, 1e-6 * z_exact);
  r.add_check("U_canon", *thermo.U, units.kB() * T, 1e-4 * units.kB() * T);

  for (const auto& c : r.checks) {
    r.outputs[c.name] = {{"numeric", c.value}, {"closed_form", c.expected}, {"status", c.status}};
  }
  Table t{"reference", {"numeric", "closed_form", "tolerance", "passed"}, {}};
  for (const auto& c : r.checks) t.rows.push_back({c.value, c.expected, c.tolerance, c.passed ? 1.0 : 0.0});
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------------------
// Canonical distribution of a tagged oscillator inside a microcanonical harmonic bath.

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

namespace detail {

// Weighted least squares of y = intercept + slope x.
inline LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                                 const std::vector<double>& w) {
  require(x.size() >= 2, ErrorCode::fit, "fit needs at least two occupied bins");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::fit, "degenerate fit abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, x.size()};
}

}  // namespace detail

inline constexpr std::uint64_t kMinFitCount = 50;

inline ExperimentReport bath_emergence(std::size_t n_bath, double E_total, std::uint64_t n_samples,
                                       std::size_t n_bins, std::uint64_t seed) {
  detail::require(n_bath >= 10, ErrorCode::precondition, "n_bath must be >= 10");
  detail::require(std::isfinite(E_total) && E_total > 0.0, ErrorCode::domain, "E_total must be > 0");
  detail::require(n_samples >= 1, ErrorCode::precondition, "n_samples must be >= 1");
  detail::require(n_bins >= 2, ErrorCode::precondition, "n_bins must be >= 2");

  // Composite shell: sphere of radius sqrt(2 E_total) in 2 (n_bath + 1) dimensions.
  const std::size_t dims = 2 * (n_bath + 1);
  const double radius = std::sqrt(2.0 * E_total);
  std::vector<std::uint64_t> counts(n_bins, 0);
  double e1_sum = 0.0;
  for (std::uint64_t s = 0; s < kDefaultStreams; ++s) {
    auto engine = stream_engine(seed, s);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> g(dims);
    const std::uint64_t n = stream_share(n_samples, kDefaultStreams, s);
    double local = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      double norm2 = 0.0;
      for (auto& v : g) {
        v = normal(engine);
        norm2 += v * v;
      }
      const double scale2 = radius * radius / norm2;
      const double e1 = 0.5 * scale2 * (g[0] * g[0] + g[1] * g[1]);
      const auto bin = std::min<std::size_t>(n_bins - 1, static_cast<std::size_t>(e1 / E_total * n_bins));
      ++counts[bin];
      local += e1;
    }
    e1_sum += local;
  }

  const double width = E_total / static_cast<double>(n_bins);
  std::vector<double> x, y, w;
  std::uint64_t mass = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    mass += counts[b];
    if (counts[b] >= kMinFitCount) {
      x.push_back((static_cast<double>(b) + 0.5) * width);
      y.push_back(std::log(static_cast<double>(counts[b])));
      w.push_back(static_cast<double>(counts[b]));
    }
  }
  const auto fit = detail::weighted_line_fit(x, y, w);
  const double beta_hat = -fit.slope;
  const double beta_th = static_cast<double>(n_bath) / E_total;

  ExperimentReport r;
  r.name = "bath_emergence";
  r.seed = seed;
  r.inputs = {{"n_bath", n_bath}, {"E_total", E_total}, {"n_samples", n_samples}, {"n_bins", n_bins}, {"seed", seed}};
  r.outputs = {{"beta_hat", beta_hat},
               {"beta_th", beta_th},
               {"relative_error", beta_hat / beta_th - 1.0},
               {"bins_fitted", fit.points},
               {"mean_E1", e1_sum / static_cast<double>(n_samples)},
               {"histogram_mass", mass}};
  r.add_check("beta_hat", beta_hat / beta_th, 1.0, 0.05);
  r.add_check("histogram_mass", static_cast<double>(mass), static_cast<double>(n_samples), 0.0);

  Table t{"histogram", {"E1_lo", "E1_hi", "E1_center", "count", "ln_count", "fit"}, {}};
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double c = static_cast<double>(counts[b]);
    const double center = (static_cast<double>(b) + 0.5) * width;
    t.rows.push_back({static_cast<double>(b) * width, static_cast<double>(b + 1) * width, center, c,
                      c > 0.0 ? std::log(c) : -std::numeric_limits<double>::infinity(),
                      fit.intercept + fit.slope * center});
  }
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------------------
// Two harmonic collections exchanging energy.

inline ExperimentReport zeroth_law_contact(std::size_t n1, std::size_t n2, double U_total, std::size_t grid = 1000,
                                           UnitsConfig units = {}) {
  detail::require(n1 >= 1 && n2 >= 1, ErrorCode::precondition, "n1 and n2 must be >= 1");
  detail::require(std::isfinite(U_total) && U_total > 0.0, ErrorCode::domain, "U_total must be > 0");
  detail::require(grid >= 3, ErrorCode::precondition, "grid must have at least 3 points");
  const auto sys1 = make_system(PotentialSpec::harmonic(1.0), n1, units, "system1");
  const auto sys2 = make_system(PotentialSpec::harmonic(1.0), n2, units, "system2");
  auto s1 = [&](double u) { return *entropy_micro(sys1, u, MicroMethod::analytic).S; };
  auto s2 = [&](double u) { return *entropy_micro(sys2, u, MicroMethod::analytic).S; };
  auto total = [&](double u1) { return s1(u1) + s2(U_total - u1); };
  // dS_i/dU_i for Omega_i ~ U_i^n_i.
  const double kB = units.kB();
  auto residual = [&](double u1) {
    return kB * static_cast<double>(n1) / u1 - kB * static_cast<double>(n2) / (U_total - u1);
  };

  Table scan{"entropy_scan", {"U1", "S1", "S2", "S_total"}, {}};
  std::size_t best = 1;
  double best_s = -std::numeric_limits<double>::infinity();
  const double du = U_total / static_cast<double>(grid);
  for (std::size_t k = 1; k < grid; ++k) {
    const double u1 = du * static_cast<double>(k);
    const double a = s1(u1);
    const double b = s2(U_total - u1);
    scan.rows.push_back({u1, a, b, a + b});
    if (a + b > best_s) {
      best_s = a + b;
      best = k;
    }
  }
  double lo = du * static_cast<double>(best - 1);
  double hi = du * static_cast<double>(best + 1);
  lo = std::max(lo, 1e-12 * U_total);
  hi = std::min(hi, U_total * (1.0 - 1e-12));
  double u_star = numerics::golden_section_maximize(total, lo, hi);
  // Bisect the stationarity residual, which the flat maximum resolves only to sqrt(eps).
  if (residual(lo) > 0.0 && residual(hi) < 0.0) {
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    u_star = std::abs(residual(lo)) < std::abs(residual(hi)) ? lo : hi;
  }
  const double u2_star = U_total - u_star;
  const double T1 = *temperature_micro(sys1, u_star, 1e-4 * u_star, MicroMethod::analytic).T;
  const double T2 = *temperature_micro(sys2, u2_star, 1e-4 * u2_star, MicroMethod::analytic).T;
  const double expected = U_total * static_cast<double>(n1) / static_cast<double>(n1 + n2);

  ExperimentReport r;
  r.name = "zeroth_law";
  r.inputs = {{"n1", n1}, {"n2", n2}, {"U_total", U_total}, {"grid", grid}, {"hbar", units.hbar()}, {"kB", kB}};
  r.outputs = {{"U1_star", u_star}, {"U2_star", u2_star}, {"T1", T1}, {"T2", T2},
               {"stationarity_residual", residual(u_star)}};
  r.add_check("temperature_equality", std::abs(T1 - T2) / T1, 0.0, 1e-6);
  r.add_check("U1_star", u_star, expected, 1e-8 * U_total);
  r.add_check("stationarity_residual", residual(u_star), 0.0, 1e-8);
  r.tables.push_back(std::move(scan));
  return r;
}

// ---------------------------------------------------------------------------
// Evolution of <Q> under the flow against the bracket average.

struct InitialCloud {
  enum class Kind { canonical, shifted_gaussian };
  Kind kind = Kind::canonical;
  double beta = 1.0;
  TangentPoint mean;
  double scale = 0.1;

  static InitialCloud canonical(double b) {
    InitialCloud c;
    c.kind = Kind::canonical;
    c.beta = b;
    return c;
  }
  static InitialCloud shifted_gaussian(TangentPoint m, double s) {
    InitialCloud c;
    c.kind = Kind::shifted_gaussian;
    c.mean = std::move(m);
    c.scale = s;
    return c;
  }
};

struct EvolutionOptions {
  double tau_end = 3.0;
  double dtau = 1e-3;
  std::uint64_t n_samples = 4000;
  std::uint64_t seed = 0;
  double checkpoint_interval = 0.05;
  std::uint64_t burn_in = 1000;
  std::uint64_t thinning = 10;
};

namespace detail {

inline std::vector<TangentPoint> draw_cloud(const SystemSpec& system, const InitialCloud& cloud,
                                            const EvolutionOptions& opt) {
  if (cloud.kind == InitialCloud::Kind::canonical) {
    ChainConfig cfg;
    cfg.burn_in = opt.burn_in;
    cfg.thinning = opt.thinning;
    cfg.n_samples = opt.burn_in + opt.n_samples * opt.thinning;
    cfg.seed = opt.seed;
    auto s = sample_canonical(system, InverseTemperature(cloud.beta), cfg);
    s.points.resize(opt.n_samples);
    return s.points;
  }
  validate_point(system, cloud.mean);
  require(std::isfinite(cloud.scale) && cloud.scale > 0.0, ErrorCode::precondition, "cloud scale must be > 0");
  auto engine = stream_engine(opt.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TangentPoint> pts(opt.n_samples, cloud.mean);
  for (auto& x : pts) {
    for (std::size_t i = 0; i < system.dof; ++i) {
      x.q[i] += cloud.scale * normal(engine);
      x.qtilde[i] += cloud.scale * normal(engine);
    }
  }
  return pts;
}

}  // namespace detail

inline ExperimentReport ensemble_average_evolution(const SystemSpec& system, const Observable& Q,
                                                   const InitialCloud& cloud, const EvolutionOptions& opt = {}) {
  detail::require_step(opt.dtau);
  detail::require(std::isfinite(opt.tau_end) && opt.tau_end > 0.0, ErrorCode::precondition, "tau_end must be > 0");
  detail::require(opt.n_samples >= 64, ErrorCode::precondition, "n_samples must be >= 64");
  const auto steps_per = static_cast<std::uint64_t>(std::max(1.0, std::round(opt.checkpoint_interval / opt.dtau)));
  const double delta = static_cast<double>(steps_per) * opt.dtau;
  const auto n_check = static_cast<std::size_t>(std::floor(opt.tau_end / delta * (1.0 + 1e-12)));
  detail::require(n_check >= 2, ErrorCode::precondition, "tau_end must span at least two checkpoint intervals");

  auto pts = detail::draw_cloud(system, cloud, opt);
  const std::size_t n = pts.size();
  const std::size_t K = n_check + 1;
  const auto L = Observable::lagrangian();
  // A second pass at a coarser step gives a Richardson estimate of the RK4 error.
  const std::uint64_t coarse_per = std::max<std::uint64_t>(1, steps_per / 2);
  const double coarse_dtau = delta / static_cast<double>(coarse_per);
  const double richardson = std::pow(coarse_dtau / opt.dtau, 4) - 1.0;
  // values[k][s], coarse[k][s], brackets[k][s]
  std::vector<std::vector<double>> values(K, std::vector<double>(n)), coarse(K, std::vector<double>(n)),
      brackets(K, std::vector<double>(n));
  for (std::size_t s = 0; s < n; ++s) {
    TangentPoint x = pts[s];
    TangentPoint xc = pts[s];
    for (std::size_t k = 0; k < K; ++k) {
      if (k > 0) {
        for (std::uint64_t j = 0; j < steps_per; ++j) x = flow_step(system, x, opt.dtau);
        for (std::uint64_t j = 0; j < coarse_per; ++j) xc = flow_step(system, xc, coarse_dtau);
      }
      values[k][s] = Q.value(system, x);
      coarse[k][s] = Q.value(system, xc);
      brackets[k][s] = lagrange_bracket(Q, L, x, system);
    }
  }

  ExperimentReport r;
  r.name = "ensemble_evolution";
  r.seed = opt.seed;
  r.inputs = {{"system", system_json(system)},
              {"observable", Q.name()},
              {"cloud", cloud.kind == InitialCloud::Kind::canonical ? "canonical" : "shifted_gaussian"},
              {"tau_end", opt.tau_end},
              {"dtau", opt.dtau},
              {"n_samples", opt.n_samples},
              {"checkpoint_interval", delta},
              {"seed", opt.seed}};
  if (cloud.kind == InitialCloud::Kind::canonical) {
    r.inputs["beta"] = cloud.beta;
    r.inputs["burn_in"] = opt.burn_in;
    r.inputs["thinning"] = opt.thinning;
  } else {
    r.inputs["mean_q"] = cloud.mean.q;
    r.inputs["mean_qtilde"] = cloud.mean.qtilde;
    r.inputs["scale"] = cloud.scale;
  }

  Table t{"evolution",
          {"tau", "mean_Q", "dQ_dtau", "bracket", "stderr_derivative", "stderr_bracket", "integration_error",
           "combined"},
          {}};
  std::vector<double> deriv(n), deriv_coarse(n);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < K; ++k) {
    for (std::size_t s = 0; s < n; ++s) {
      deriv[s] = (values[k + 1][s] - values[k - 1][s]) / (2.0 * delta);
      deriv_coarse[s] = (coarse[k + 1][s] - coarse[k - 1][s]) / (2.0 * delta);
    }
    const double md = numerics::mean(deriv);
    const double mb = numerics::mean(brackets[k]);
    const double sd = numerics::batch_means_stderr(deriv);
    const double sb = numerics::batch_means_stderr(brackets[k]);
    const double integration = richardson > 0.0 ? std::abs(numerics::mean(deriv_coarse) - md) / richardson : 0.0;
    const double combined = std::sqrt(sd * sd + sb * sb + integration * integration);
    const double tau = static_cast<double>(k) * delta;
    t.rows.push_back({tau, numerics::mean(values[k]), md, mb, sd, sb, integration, combined});
    r.add_check("checkpoint_" + std::to_string(k), md - mb, 0.0, 3.0 * combined);
    if (combined > 0.0) worst = std::max(worst, std::abs(md - mb) / combined);
  }
  r.outputs = {{"checkpoints", K - 2}, {"max_z_score", worst}, {"passed", r.passed()}};
  r.tables.push_back(std::move(t));
  return r;
}

}  // namespace tangentstat

#endif  // TANGENTSTAT_EXPERIMENTS_HPP
