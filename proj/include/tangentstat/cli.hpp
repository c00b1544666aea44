#ifndef TANGENTSTAT_CLI_HPP
#define TANGENTSTAT_CLI_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "tangentstat/canonical.hpp"
#include "tangentstat/config.hpp"
#include "tangentstat/dynamics.hpp"
#include "tangentstat/experiments.hpp"
#include "tangentstat/io.hpp"
#include "tangentstat/microcanonical.hpp"

#ifndef TANGENTSTAT_VERSION
#define TANGENTSTAT_VERSION "0.0.0"
#endif

namespace tangentstat::cli {

using io::Cell;
using io::Json;
using io::Records;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// The serialized result of one command: the primary output plus named side tables
/// (experiments only) and any non-fatal warnings.
struct Artifact {
  std::string body;
  std::vector<std::pair<std::string, std::string>> side_tables;
  std::vector<std::string> warnings;
};

namespace detail {

inline Cell num(double v) { return Cell{std::optional<double>(v)}; }
inline Cell num(std::optional<double> v) { return Cell{v}; }
inline Cell text(std::string s) { return Cell{std::move(s)}; }

inline std::uint64_t seed_of(const config::RunConfig& cfg) { return cfg.has("seed") ? cfg.integer("seed") : 0; }

inline Json envelope(const config::RunConfig& cfg) {
  Json j;
  j["tool"] = "tangentstat";
  j["version"] = TANGENTSTAT_VERSION;
  j["command"] = cfg.command();
  j["config"] = io::config_json(cfg);
  return j;
}

inline Artifact finish(const config::RunConfig& cfg, const Records& rec, std::vector<std::string> warnings) {
  Artifact a;
  if (cfg.text("format") == "csv") {
    a.body = rec.csv();
  } else {
    Json j = envelope(cfg);
    j["columns"] = rec.columns;
    j["records"] = rec.json();
    j["warnings"] = warnings;
    a.body = j.dump(2) + "\n";
  }
  a.warnings = std::move(warnings);
  return a;
}

inline void append(std::vector<std::string>& out, const std::vector<std::string>& in) {
  out.insert(out.end(), in.begin(), in.end());
}

inline Artifact run_simulate(const config::RunConfig& cfg) {
  const auto sys = config::build_system(cfg);
  const TangentPoint x0{cfg.list("q0"), cfg.list("qtilde0")};
  const auto traj = integrate(sys, x0, cfg.real("tau_end"), cfg.real("dtau"));
  Records rec;
  rec.columns.push_back("tau");
  for (std::size_t i = 0; i < sys.dof; ++i) rec.columns.push_back("q_" + std::to_string(i));
  for (std::size_t i = 0; i < sys.dof; ++i) rec.columns.push_back("qtilde_" + std::to_string(i));
  rec.columns.push_back("energy");
  const std::uint64_t every = cfg.integer("record_every");
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    if (k % every != 0 && k + 1 != traj.samples.size()) continue;
    const auto& s = traj.samples[k];
    std::vector<Cell> row{num(s.tau)};
    for (double v : s.point.q) row.push_back(num(v));
    for (double v : s.point.qtilde) row.push_back(num(v));
    row.push_back(num(lagrangian_eval(sys, s.point).E));
    rec.add(std::move(row));
  }
  return finish(cfg, rec, {});
}

inline Artifact run_liouville(const config::RunConfig& cfg) {
  const auto sys = config::build_system(cfg);
  const double q0 = cfg.real("square_q_min");
  const double v0 = cfg.real("square_qtilde_min");
  const double side = cfg.real("square_side");
  const double dtau = cfg.real("dtau");
  const auto poly = TangentPolygon::square(q0, v0, side, cfg.integer("subdivisions"));
  AreaOptions opt;
  opt.refine_factor = cfg.real("refine_factor");
  const auto evo = area_evolution(sys, poly, cfg.real("tau_end"), dtau, cfg.integer("checkpoints"), opt);
  const TangentPoint centre{{q0 + 0.5 * side}, {v0 + 0.5 * side}};
  Records rec{{"tau", "area", "det_jacobian"}, {}};
  for (const auto& s : evo.series) {
    rec.add({num(s.tau), num(s.area), num(jacobian_determinant(sys, centre, s.tau, dtau))});
  }
  return finish(cfg, rec, evo.warnings);
}

inline MicroMethod micro_method(const std::string& m) {
  if (m == "analytic") return MicroMethod::analytic;
  if (m == "hit-or-miss") return MicroMethod::hit_or_miss;
  return MicroMethod::quadrature;
}

inline CanonMethod canon_method(const std::string& m) {
  if (m == "analytic") return CanonMethod::analytic;
  if (m == "importance-mc") return CanonMethod::importance_mc;
  return CanonMethod::quadrature;
}

inline Artifact run_micro(const config::RunConfig& cfg) {
  const auto sys = config::build_system(cfg);
  const auto method = micro_method(cfg.text("method"));
  const std::uint64_t budget = cfg.integer("budget");
  const std::uint64_t seed = seed_of(cfg);
  const double eps = cfg.real("epsilon");
  const double dU = cfg.real("dU");
  const double emin = tangentstat::detail::minimum_energy(sys);
  Records rec{{"U", "omega", "sigma", "S", "T", "stderr"}, {}};
  std::vector<std::string> warnings;
  for (double U : cfg.list("U")) {
    const auto vol = volume_below(sys, U, method, budget, seed);
    std::optional<double> sigma, S, T;
    if (U > emin) {
      const auto sh = shell_density(sys, U, eps, method, budget, seed);
      sigma = sh.sigma;
      append(warnings, sh.warnings);
    }
    if (vol.omega > 0.0) S = sys.units.kB() * std::log(vol.omega);
    if (U - dU > emin) T = temperature_micro(sys, U, dU, method, budget, seed).T;
    rec.add({num(U), num(vol.omega), num(sigma), num(S), num(T), num(vol.stderr)});
  }
  return finish(cfg, rec, warnings);
}

inline Artifact run_canon(const config::RunConfig& cfg) {
  const auto sys = config::build_system(cfg);
  const auto method = canon_method(cfg.text("method"));
  Records rec{{"beta", "Z", "U", "F", "S", "stderr"}, {}};
  std::vector<std::string> warnings;
  for (double b : cfg.list("beta")) {
    const auto r = thermodynamics(sys, InverseTemperature(b), cfg.real("dbeta"), method, cfg.integer("budget"),
                                  seed_of(cfg));
    append(warnings, r.warnings);
    rec.add({num(b), num(r.Z), num(r.U), num(r.F), num(r.S), num(r.stderr)});
  }
  return finish(cfg, rec, warnings);
}

inline Artifact run_compare(const config::RunConfig& cfg) {
  const auto sys = config::build_system(cfg);
  const double b = cfg.real("beta");
  const auto r = hamiltonian_equivalence(sys, InverseTemperature(b), canon_method(cfg.text("method")),
                                         cfg.integer("budget"), seed_of(cfg));
  Records rec{{"beta", "Z_lagrangian", "Z_hamiltonian", "ratio"}, {}};
  rec.add({num(b), num(r.Z_lagrangian), num(r.Z_hamiltonian), num(r.ratio)});
  return finish(cfg, rec, {});
}

inline Observable evolution_observable(const config::RunConfig& cfg, std::size_t dof) {
  const auto& kind = cfg.text("observable");
  const auto i = static_cast<std::size_t>(cfg.integer("observable_index"));
  if (kind == "constant") return Observable::constant(1.0);
  if (kind == "energy") return Observable::energy();
  if (kind == "lagrangian") return Observable::lagrangian();
  if (kind == "kinetic") return Observable::kinetic();
  if (kind == "potential") return Observable::potential();
  if (kind == "velocity") return Observable::velocity(i);
  if (kind == "q_squared") {
    std::vector<unsigned> qp(dof, 0), vp(dof, 0);
    qp[i] = 2;
    return Observable::monomial(qp, vp);
  }
  return Observable::coordinate(i);
}

inline ExperimentReport run_report(const config::RunConfig& cfg) {
  const auto& name = cfg.text("name");
  if (name == "ho_reference") {
    return ho_reference(cfg.real("omega"), InverseTemperature(cfg.real("beta")), cfg.real("U"),
                        UnitsConfig(cfg.real("hbar"), cfg.real("kB")));
  }
  if (name == "bath_emergence") {
    return bath_emergence(cfg.integer("n_bath"), cfg.real("E_total"), cfg.integer("n_samples"), cfg.integer("n_bins"),
                          seed_of(cfg));
  }
  if (name == "zeroth_law") {
    return zeroth_law_contact(cfg.integer("n1"), cfg.integer("n2"), cfg.real("U_total"), cfg.integer("grid"),
                              UnitsConfig(cfg.real("hbar"), cfg.real("kB")));
  }
  const auto sys = config::build_system(cfg);
  EvolutionOptions opt;
  opt.tau_end = cfg.real("tau_end");
  opt.dtau = cfg.real("dtau");
  opt.n_samples = cfg.integer("n_samples");
  opt.seed = seed_of(cfg);
  opt.checkpoint_interval = cfg.real("checkpoint_interval");
  InitialCloud cloud;
  if (cfg.text("cloud") == "canonical") {
    cloud = InitialCloud::canonical(cfg.real("beta"));
    opt.burn_in = cfg.integer("burn_in");
    opt.thinning = cfg.integer("thinning");
  } else {
    cloud = InitialCloud::shifted_gaussian(TangentPoint{cfg.list("mean_q"), cfg.list("mean_qtilde")},
                                           cfg.real("scale"));
  }
  return ensemble_average_evolution(sys, evolution_observable(cfg, sys.dof), cloud, opt);
}

inline Records checks_records(const ExperimentReport& r) {
  Records rec{{"check", "value", "expected", "tolerance", "passed", "status"}, {}};
  for (const auto& c : r.checks) {
    rec.add({text(c.name), num(c.value), num(c.expected), num(c.tolerance), text(c.passed ? "true" : "false"),
             text(c.status)});
  }
  return rec;
}

inline Records table_records(const Table& t) {
  Records rec{t.columns, {}};
  for (const auto& row : t.rows) {
    std::vector<Cell> cells;
    for (double v : row) cells.push_back(num(v));
    rec.add(std::move(cells));
  }
  return rec;
}

inline Artifact run_experiment(const config::RunConfig& cfg) {
  const auto report = run_report(cfg);
  Artifact a;
  if (cfg.text("format") == "csv") {
    a.body = checks_records(report).csv();
    for (const auto& t : report.tables) a.side_tables.emplace_back(t.name, table_records(t).csv());
    return a;
  }
  Json j = envelope(cfg);
  j["name"] = report.name;
  j["seed"] = report.seed;
  j["passed"] = report.passed();
  j["inputs"] = report.inputs;
  j["outputs"] = report.outputs;
  j["checks"] = checks_records(report).json();
  Json tables = Json::object();
  for (const auto& t : report.tables) tables[t.name] = {{"columns", t.columns}, {"rows", t.rows}};
  j["tables"] = tables;
  a.body = j.dump(2) + "\n";
  return a;
}

}  // namespace detail

/// Runs a validated configuration and returns its serialized output.
inline Artifact execute(const config::RunConfig& cfg) {
  const auto& c = cfg.command();
  if (c == "simulate") return detail::run_simulate(cfg);
  if (c == "liouville") return detail::run_liouville(cfg);
  if (c == "micro") return detail::run_micro(cfg);
  if (c == "canon") return detail::run_canon(cfg);
  if (c == "compare") return detail::run_compare(cfg);
  return detail::run_experiment(cfg);
}

inline Json error_record(const Error& e, const std::string& command) {
  Json err;
  err["kind"] = "domain";
  err["code"] = std::string(to_string(e.code()));
  err["message"] = e.what();
  err["command"] = command;
  if (const auto* b = dynamic_cast<const BlowUpError*>(&e)) err["tau"] = b->tau();
  return {{"error", err}};
}

inline Json diagnostics_record(const std::vector<config::Diagnostic>& diags) {
  Json list = Json::array();
  for (const auto& d : diags) {
    list.push_back({{"code", config::to_string(d.code)}, {"line", d.line}, {"key", d.key}, {"message", d.message}});
  }
  return {{"error", {{"kind", "config"}, {"diagnostics", list}}}};
}

inline Json usage_record(const std::string& message) { return {{"error", {{"kind", "usage"}, {"message", message}}}}; }

namespace detail {

inline bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << content;
  return static_cast<bool>(f);
}

inline std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  return std::filesystem::path(out.string() + suffix);
}

inline std::filesystem::path table_path(const std::filesystem::path& out, const std::string& table) {
  auto p = out;
  return p.replace_filename(out.stem().string() + "." + table + out.extension().string());
}

inline int report_error(const Json& record, const std::optional<std::filesystem::path>& out, std::ostream& err,
                        int code) {
  err << record.dump() << "\n";
  if (out) write_file(sibling(*out, ".error.json"), record.dump(2) + "\n");
  return code;
}

}  // namespace detail

/// Executes cfg and writes its output. With a path: the output file, side tables
/// beside it, and `<out>.manifest.json`. Without: the output goes to `out_stream`.
inline int run_command(const config::RunConfig& cfg, const std::optional<std::filesystem::path>& out,
                       std::ostream& out_stream, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Artifact artifact;
  try {
    artifact = execute(cfg);
  } catch (const Error& e) {
    return detail::report_error(error_record(e, cfg.command()), out, err, kExitDomain);
  }
  for (const auto& w : artifact.warnings) err << Json{{"warning", w}}.dump() << "\n";
  if (!out) {
    out_stream << artifact.body;
    return kExitOk;
  }
  std::vector<std::string> written{out->string()};
  bool ok = detail::write_file(*out, artifact.body);
  for (const auto& [name, body] : artifact.side_tables) {
    const auto p = detail::table_path(*out, name);
    ok = detail::write_file(p, body) && ok;
    written.push_back(p.string());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json manifest;
  manifest["tool"] = "tangentstat";
  manifest["version"] = TANGENTSTAT_VERSION;
  manifest["command"] = cfg.command();
  manifest["config"] = io::config_json(cfg);
  manifest["config_text"] = cfg.canonical_text();
  manifest["seed"] = cfg.has("seed") ? Json(cfg.integer("seed")) : Json(nullptr);
  manifest["outputs"] = written;
  manifest["warnings"] = artifact.warnings;
  manifest["wall_time_seconds"] = wall;
  ok = detail::write_file(detail::sibling(*out, ".manifest.json"), manifest.dump(2) + "\n") && ok;
  if (!ok) return detail::report_error(usage_record("cannot write output " + out->string()), std::nullopt, err, kExitUsage);
  return kExitOk;
}

/// Entry point: `tangentstat <command> --config <path> [--out <path>] [--seed <u64>]`.
inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"tangentstat: statistical mechanics on the imaginary-time tangent bundle"};
  app.set_version_flag("--version", TANGENTSTAT_VERSION);
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string seed;
  app.add_option("command", command, "simulate | liouville | micro | canon | compare | experiment")
      ->required()
      ->check(CLI::IsMember({"simulate", "liouville", "micro", "canon", "compare", "experiment"}));
  app.add_option("--config", config_path, "configuration file (key = value lines)")->required();
  app.add_option("--out", out_path, "output file; a manifest is written beside it");
  app.add_option("--seed", seed, "random seed (overrides the configuration)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    return detail::report_error(usage_record(e.what()), std::nullopt, err, kExitUsage);
  }
  const std::optional<std::filesystem::path> out_file =
      out_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_path);

  std::ifstream f(config_path, std::ios::binary);
  if (!f) return detail::report_error(usage_record("cannot read config " + config_path), out_file, err, kExitUsage);
  std::stringstream buf;
  buf << f.rdbuf();

  std::vector<std::pair<std::string, std::string>> overrides{{"command", command}};
  if (!seed.empty()) overrides.emplace_back("seed", seed);
  const auto parsed = config::parse_config(buf.str(), overrides);
  if (!parsed.ok()) return detail::report_error(diagnostics_record(parsed.diagnostics), out_file, err, kExitUsage);
  return run_command(*parsed.config, out_file, out, err);
}

}  // namespace tangentstat::cli

#endif  // TANGENTSTAT_CLI_HPP
