#ifndef TANGENTSTAT_CONFIG_HPP
#define TANGENTSTAT_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tangentstat/model.hpp"
#include "tangentstat/potential.hpp"

namespace tangentstat::config {

enum class DiagCode { syntax, unknown_key, out_of_range, missing_key, bad_value, duplicate_key };

inline std::string to_string(DiagCode c) {
  switch (c) {
    case DiagCode::syntax: return "syntax";
    case DiagCode::unknown_key: return "unknown-key";
    case DiagCode::out_of_range: return "out-of-range";
    case DiagCode::missing_key: return "missing-key";
    case DiagCode::bad_value: return "bad-value";
    case DiagCode::duplicate_key: return "duplicate-key";
  }
  return "unknown";
}

/// line = 0 marks values supplied outside the document (command line overrides).
struct Diagnostic {
  DiagCode code;
  std::size_t line = 0;
  std::string key;
  std::string message;
};

using Value = std::variant<double, std::uint64_t, std::string, std::vector<double>>;

enum class ValueType { real, integer, text, real_list, choice };

/// Keys that select which other keys apply.
struct Context {
  std::string command;
  std::string potential;
  std::string name;
  std::string cloud;
  std::string method;

  [[nodiscard]] bool experiment(std::string_view n) const { return command == "experiment" && name == n; }
  [[nodiscard]] bool uses_system() const { return command != "experiment" || name == "ensemble_evolution"; }
  [[nodiscard]] bool stochastic() const {
    if (command == "micro") return method == "hit-or-miss";
    if (command == "canon" || command == "compare") return method == "importance-mc";
    return experiment("bath_emergence") || experiment("ensemble_evolution");
  }
};

struct KeySpec {
  std::string key;
  ValueType type = ValueType::real;
  std::optional<std::string> default_text;  // nullopt: required when applicable
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  bool min_exclusive = false;
  std::vector<std::string> choices;
  std::function<bool(const Context&)> applies;
  std::string doc;
};

namespace detail {

inline KeySpec real(std::string key, std::optional<std::string> def, double min, bool exclusive,
                    std::function<bool(const Context&)> applies, std::string doc) {
  return {std::move(key), ValueType::real, std::move(def), min, std::numeric_limits<double>::infinity(), exclusive,
          {}, std::move(applies), std::move(doc)};
}
inline KeySpec integer(std::string key, std::optional<std::string> def, double min,
                       std::function<bool(const Context&)> applies, std::string doc) {
  return {std::move(key), ValueType::integer, std::move(def), min, std::numeric_limits<double>::infinity(), false,
          {}, std::move(applies), std::move(doc)};
}
inline KeySpec list(std::string key, std::optional<std::string> def, double min, bool exclusive,
                    std::function<bool(const Context&)> applies, std::string doc) {
  return {std::move(key), ValueType::real_list, std::move(def), min, std::numeric_limits<double>::infinity(), exclusive,
          {}, std::move(applies), std::move(doc)};
}
inline KeySpec choice(std::string key, std::optional<std::string> def, std::vector<std::string> choices,
                      std::function<bool(const Context&)> applies, std::string doc) {
  return {std::move(key), ValueType::choice, std::move(def), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), false, std::move(choices), std::move(applies), std::move(doc)};
}
inline KeySpec text(std::string key, std::optional<std::string> def, std::function<bool(const Context&)> applies,
                    std::string doc) {
  return {std::move(key), ValueType::text, std::move(def), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), false, {}, std::move(applies), std::move(doc)};
}

inline auto always() {
  return [](const Context&) { return true; };
}
inline auto command_is(std::string c) {
  return [c](const Context& x) { return x.command == c; };
}
inline auto experiment_is(std::string n) {
  return [n](const Context& x) { return x.experiment(n); };
}

}  // namespace detail

/// Every accepted key, in canonical order. A key may appear more than once with
/// disjoint applicability (e.g. U is a list for micro and a scalar for ho_reference).
inline const std::vector<KeySpec>& schema() {
  using namespace detail;
  static const std::vector<KeySpec> keys = [] {
    auto units = [](const Context& c) { return c.uses_system() || c.experiment("ho_reference") || c.experiment("zeroth_law"); };
    auto system = [](const Context& c) { return c.uses_system(); };
    auto potential_is = [](std::string p) {
      return [p](const Context& c) { return c.uses_system() && c.potential == p; };
    };
    auto evolution_cloud = [](std::string k) {
      return [k](const Context& c) { return c.experiment("ensemble_evolution") && c.cloud == k; };
    };
    std::vector<KeySpec> k{
        choice("command", std::nullopt, {"simulate", "liouville", "micro", "canon", "compare", "experiment"}, always(),
               "subcommand to run"),
        choice("name", std::nullopt, {"ho_reference", "bath_emergence", "zeroth_law", "ensemble_evolution"},
               command_is("experiment"), "experiment to run"),
        text("label", "", system, "free-form system label"),
        integer("dof", "1", 1, system, "number of independent coordinates"),
        choice("kind", "harmonic", {"harmonic", "polynomial", "double_well"}, system, "potential family"),
        real("omega", "1", 0.0, true,
             [](const Context& c) { return (c.uses_system() && c.potential == "harmonic") || c.experiment("ho_reference"); },
             "harmonic frequency"),
        list("coeffs", std::nullopt, -std::numeric_limits<double>::infinity(), false, potential_is("polynomial"),
             "polynomial coefficients c0, c1, ... of V(q) = sum c_k q^k"),
        real("a", "1", 0.0, true, potential_is("double_well"), "double-well minimum position"),
        real("hbar", "1", 0.0, true, units, "reduced Planck constant"),
        real("kB", "1", 0.0, true, units, "Boltzmann constant"),
        real("volume", "1", 0.0, true, system, "inert volume metadata"),
        integer("particles", "1", 1, system, "inert particle-number metadata"),
        choice("format", "csv", {"csv", "json"}, always(), "output format"),

        // simulate
        list("q0", "0", -std::numeric_limits<double>::infinity(), false, command_is("simulate"),
             "initial coordinates (one value broadcasts)"),
        list("qtilde0", "0", -std::numeric_limits<double>::infinity(), false, command_is("simulate"),
             "initial velocities (one value broadcasts)"),
        real("tau_end", "10", 0.0, true, command_is("simulate"), "integration length"),
        real("dtau", "1e-3", 0.0, true, command_is("simulate"), "RK4 step"),
        integer("record_every", "1", 1, command_is("simulate"), "emit every n-th step (final state always)"),

        // liouville
        real("square_q_min", "0", -std::numeric_limits<double>::infinity(), false, command_is("liouville"),
             "square corner, q"),
        real("square_qtilde_min", "0", -std::numeric_limits<double>::infinity(), false, command_is("liouville"),
             "square corner, qtilde"),
        real("square_side", "1", 0.0, true, command_is("liouville"), "square side length"),
        integer("subdivisions", "1", 1, command_is("liouville"), "initial vertices per edge"),
        real("tau_end", "1", 0.0, true, command_is("liouville"), "integration length"),
        real("dtau", "1e-3", 0.0, true, command_is("liouville"), "RK4 step"),
        integer("checkpoints", "10", 1, command_is("liouville"), "area checkpoints after tau = 0"),
        real("refine_factor", "10", 1.0, true, command_is("liouville"), "edge stretch that triggers refinement"),

        // micro
        list("U", std::nullopt, -std::numeric_limits<double>::infinity(), false, command_is("micro"), "energies"),
        choice("method", "quadrature", {"analytic", "quadrature", "hit-or-miss"}, command_is("micro"),
               "volume estimator"),
        integer("budget", "1000000", 1, command_is("micro"), "hit-or-miss sample count"),
        real("epsilon", "1e-3", 0.0, true, command_is("micro"), "shell window width"),
        real("dU", "1e-4", 0.0, true, command_is("micro"), "temperature difference step"),

        // canon
        list("beta", std::nullopt, 0.0, true, command_is("canon"), "inverse temperatures"),
        choice("method", "quadrature", {"analytic", "quadrature", "importance-mc"}, command_is("canon"),
               "partition-function estimator"),
        integer("budget", "1000000", 2, command_is("canon"), "importance sample count"),
        real("dbeta", "1e-3", 0.0, true, command_is("canon"), "beta difference step"),

        // compare
        real("beta", std::nullopt, 0.0, true, command_is("compare"), "inverse temperature"),
        choice("method", "quadrature", {"analytic", "quadrature", "importance-mc"}, command_is("compare"),
               "partition-function estimator"),
        integer("budget", "1000000", 2, command_is("compare"), "importance sample count"),

        // experiment ho_reference
        real("beta", "1", 0.0, true, experiment_is("ho_reference"), "inverse temperature"),
        real("U", "1", 0.0, false, experiment_is("ho_reference"), "energy"),

        // experiment bath_emergence
        integer("n_bath", "50", 10, experiment_is("bath_emergence"), "bath oscillators"),
        real("E_total", "50", 0.0, true, experiment_is("bath_emergence"), "composite energy"),
        integer("n_samples", "200000", 1, experiment_is("bath_emergence"), "shell samples"),
        integer("n_bins", "100", 2, experiment_is("bath_emergence"), "histogram bins"),

        // experiment zeroth_law
        integer("n1", "1", 1, experiment_is("zeroth_law"), "oscillators in system 1"),
        integer("n2", "2", 1, experiment_is("zeroth_law"), "oscillators in system 2"),
        real("U_total", "3", 0.0, true, experiment_is("zeroth_law"), "shared energy"),
        integer("grid", "1000", 3, experiment_is("zeroth_law"), "scan points"),

        // experiment ensemble_evolution
        choice("observable", "coordinate",
               {"constant", "energy", "lagrangian", "kinetic", "potential", "coordinate", "velocity", "q_squared"},
               experiment_is("ensemble_evolution"), "observable Q"),
        integer("observable_index", "0", 0, experiment_is("ensemble_evolution"), "coordinate index for Q"),
        choice("cloud", "canonical", {"canonical", "shifted_gaussian"}, experiment_is("ensemble_evolution"),
               "initial cloud"),
        real("beta", "1", 0.0, true, evolution_cloud("canonical"), "cloud inverse temperature"),
        list("mean_q", "0", -std::numeric_limits<double>::infinity(), false, evolution_cloud("shifted_gaussian"),
             "cloud mean coordinates"),
        list("mean_qtilde", "0", -std::numeric_limits<double>::infinity(), false, evolution_cloud("shifted_gaussian"),
             "cloud mean velocities"),
        real("scale", "0.1", 0.0, true, evolution_cloud("shifted_gaussian"), "cloud standard deviation"),
        real("tau_end", "3", 0.0, true, experiment_is("ensemble_evolution"), "integration length"),
        real("dtau", "1e-3", 0.0, true, experiment_is("ensemble_evolution"), "RK4 step"),
        integer("n_samples", "4000", 64, experiment_is("ensemble_evolution"), "cloud size"),
        real("checkpoint_interval", "0.05", 0.0, true, experiment_is("ensemble_evolution"), "checkpoint spacing"),
        integer("burn_in", "1000", 0, evolution_cloud("canonical"), "Metropolis burn-in"),
        integer("thinning", "10", 1, evolution_cloud("canonical"), "Metropolis thinning"),

        integer("seed", std::nullopt, 0, [](const Context& c) { return c.stochastic(); }, "random seed"),
    };
    return k;
  }();
  return keys;
}

inline const KeySpec* find_spec(const std::string& key, const Context& ctx) {
  for (const auto& s : schema()) {
    if (s.key == key && s.applies(ctx)) return &s;
  }
  return nullptr;
}

inline bool known_key(const std::string& key) {
  return std::any_of(schema().begin(), schema().end(), [&](const KeySpec& s) { return s.key == key; });
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& x) const { return x; }
    std::string operator()(const std::vector<double>& x) const {
      std::string out;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out += ", ";
        out += format_number(x[i]);
      }
      return out;
    }
  };
  return std::visit(Visitor{}, v);
}

/// A fully validated configuration with every applicable default materialized.
class RunConfig {
 public:
  [[nodiscard]] const std::string& command() const { return text("command"); }
  [[nodiscard]] bool has(const std::string& key) const { return find(key) != nullptr; }

  [[nodiscard]] double real(const std::string& key) const { return std::get<double>(at(key)); }
  [[nodiscard]] std::uint64_t integer(const std::string& key) const { return std::get<std::uint64_t>(at(key)); }
  [[nodiscard]] const std::string& text(const std::string& key) const { return std::get<std::string>(at(key)); }
  [[nodiscard]] const std::vector<double>& list(const std::string& key) const {
    return std::get<std::vector<double>>(at(key));
  }

  [[nodiscard]] const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

  /// `key = value` lines in schema order; parse_config(canonical_text()) reproduces *this.
  [[nodiscard]] std::string canonical_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + format_value(v) + "\n";
    return out;
  }

  void set(std::string key, Value v) {
    for (auto& e : entries_) {
      if (e.first == key) {
        e.second = std::move(v);
        return;
      }
    }
    entries_.emplace_back(std::move(key), std::move(v));
  }

  bool operator==(const RunConfig&) const = default;

 private:
  [[nodiscard]] const Value* find(const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.first == key) return &e.second;
    }
    return nullptr;
  }
  [[nodiscard]] const Value& at(const std::string& key) const {
    const Value* v = find(key);
    if (!v) throw Error(ErrorCode::precondition, "configuration has no key " + key);
    return *v;
  }

  std::vector<std::pair<std::string, Value>> entries_;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<Diagnostic> diagnostics;

  [[nodiscard]] bool ok() const { return config.has_value(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool valid_key(std::string_view k) {
  if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  return std::all_of(k.begin(), k.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Raw {
  std::string value;
  std::size_t line;
};

inline std::string range_text(const KeySpec& s) {
  std::string r = s.min_exclusive ? "> " : ">= ";
  return r + format_number(s.min);
}

inline bool in_range(const KeySpec& s, double v) {
  return (s.min_exclusive ? v > s.min : v >= s.min) && v <= s.max;
}

inline std::optional<Value> convert(const KeySpec& spec, const std::string& text, std::size_t line,
                                    std::vector<Diagnostic>& diags) {
  auto bad = [&](DiagCode code, std::string msg) {
    diags.push_back({code, line, spec.key, std::move(msg)});
    return std::optional<Value>{};
  };
  switch (spec.type) {
    case ValueType::real: {
      const auto v = parse_double(text);
      if (!v) return bad(DiagCode::bad_value, "expected a finite real number, got '" + text + "'");
      if (!in_range(spec, *v)) return bad(DiagCode::out_of_range, spec.key + " must be " + range_text(spec));
      return Value{*v};
    }
    case ValueType::integer: {
      // Exact digits first: seeds near 2^64 round when read as a double.
      std::uint64_t exact = 0;
      const auto t = trim(text);
      const auto res = std::from_chars(t.data(), t.data() + t.size(), exact);
      if (res.ec == std::errc() && res.ptr == t.data() + t.size()) {
        if (!in_range(spec, static_cast<double>(exact))) {
          return bad(DiagCode::out_of_range, spec.key + " must be " + range_text(spec));
        }
        return Value{exact};
      }
      const auto v = parse_double(text);
      if (!v || *v != std::floor(*v)) return bad(DiagCode::bad_value, "expected an integer, got '" + text + "'");
      if (!in_range(spec, *v)) return bad(DiagCode::out_of_range, spec.key + " must be " + range_text(spec));
      if (*v >= 18446744073709551616.0) return bad(DiagCode::out_of_range, spec.key + " exceeds 2^64 - 1");
      return Value{static_cast<std::uint64_t>(*v)};
    }
    case ValueType::real_list: {
      std::vector<double> out;
      std::string_view rest = text;
      while (true) {
        const auto comma = rest.find(',');
        const auto item = parse_double(rest.substr(0, comma));
        if (!item) return bad(DiagCode::bad_value, "expected a comma-separated list of real numbers");
        if (!in_range(spec, *item)) {
          return bad(DiagCode::out_of_range, "every " + spec.key + " entry must be " + range_text(spec));
        }
        out.push_back(*item);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      return Value{std::move(out)};
    }
    case ValueType::choice: {
      if (std::find(spec.choices.begin(), spec.choices.end(), text) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
        return bad(DiagCode::bad_value, spec.key + " must be one of " + allowed);
      }
      return Value{text};
    }
    case ValueType::text:
      return Value{text};
  }
  return std::nullopt;
}

}  // namespace detail

/// Strict parse of a flat `key = value` document; '#' starts a comment. Overrides
/// (for example --seed) replace or add keys after the document is read and are
/// dropped silently where they do not apply.
inline ParseResult parse_config(std::string_view text,
                                const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  ParseResult result;
  auto& diags = result.diagnostics;
  std::map<std::string, detail::Raw> raw;
  std::vector<std::string> order;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      diags.push_back({DiagCode::syntax, line_no, "", "expected 'key = value'"});
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (!detail::valid_key(key)) {
      diags.push_back({DiagCode::syntax, line_no, key, "invalid key"});
      continue;
    }
    const bool text_key = std::any_of(schema().begin(), schema().end(),
                                      [&](const KeySpec& s) { return s.key == key && s.type == ValueType::text; });
    if (value.empty() && !text_key) {
      diags.push_back({DiagCode::syntax, line_no, key, "missing value"});
      continue;
    }
    if (raw.contains(key)) {
      diags.push_back({DiagCode::duplicate_key, line_no, key,
                       "key already set on line " + std::to_string(raw[key].line)});
      continue;
    }
    raw[key] = {value, line_no};
    order.push_back(key);
  }
  for (const auto& [k, v] : overrides) {
    if (k == "command" && raw.contains(k) && raw[k].value != v) {
      diags.push_back({DiagCode::bad_value, raw[k].line, k,
                       "document command '" + raw[k].value + "' disagrees with requested '" + v + "'"});
    }
    if (!raw.contains(k)) order.push_back(k);
    raw[k] = {v, 0};
  }

  // Selector keys first: they decide which other keys apply.
  Context ctx;
  RunConfig cfg;
  std::set<std::string> consumed;
  auto selector = [&](const std::string& key, std::string& slot) {
    const KeySpec* spec = find_spec(key, ctx);
    if (!spec) return;
    const auto it = raw.find(key);
    if (it == raw.end()) {
      if (spec->default_text) slot = *spec->default_text;
      return;
    }
    consumed.insert(key);
    if (auto v = detail::convert(*spec, it->second.value, it->second.line, diags)) slot = std::get<std::string>(*v);
  };
  selector("command", ctx.command);
  if (ctx.command.empty()) {
    if (!raw.contains("command")) diags.push_back({DiagCode::missing_key, 0, "command", "command is required"});
    return result;
  }
  selector("name", ctx.name);
  if (ctx.command == "experiment" && ctx.name.empty()) {
    if (!raw.contains("name")) diags.push_back({DiagCode::missing_key, 0, "name", "experiment name is required"});
    return result;
  }
  selector("kind", ctx.potential);
  selector("cloud", ctx.cloud);
  selector("method", ctx.method);

  for (const auto& key : order) {
    const auto& r = raw[key];
    const bool override_only = r.line == 0;
    if (!known_key(key)) {
      diags.push_back({DiagCode::unknown_key, r.line, key, "unknown key"});
    } else if (!find_spec(key, ctx) && !override_only) {
      diags.push_back({DiagCode::unknown_key, r.line, key, "key does not apply to this command"});
    }
  }

  for (const auto& spec : schema()) {
    if (!spec.applies(ctx)) continue;
    const auto it = raw.find(spec.key);
    std::optional<Value> v;
    if (it != raw.end()) {
      v = detail::convert(spec, it->second.value, it->second.line, diags);
    } else if (spec.default_text) {
      v = detail::convert(spec, *spec.default_text, 0, diags);
    } else {
      diags.push_back({DiagCode::missing_key, 0, spec.key, spec.key + " is required (" + spec.doc + ")"});
    }
    if (v) cfg.set(spec.key, std::move(*v));
  }
  if (!diags.empty()) return result;

  // Cross-key constraints.
  auto line_of = [&](const std::string& k) { return raw.contains(k) ? raw[k].line : std::size_t{0}; };
  const std::size_t dof = cfg.has("dof") ? cfg.integer("dof") : 1;
  for (const char* k : {"q0", "qtilde0", "mean_q", "mean_qtilde"}) {
    if (!cfg.has(k)) continue;
    auto v = cfg.list(k);
    if (v.size() == 1 && dof > 1) {
      cfg.set(k, std::vector<double>(dof, v.front()));
    } else if (v.size() != dof) {
      diags.push_back({DiagCode::bad_value, line_of(k), k,
                       std::string(k) + " needs 1 or " + std::to_string(dof) + " entries"});
    }
  }
  if (ctx.command == "liouville" && dof != 1) {
    diags.push_back({DiagCode::out_of_range, line_of("dof"), "dof", "liouville requires dof = 1"});
  }
  if (cfg.has("observable_index") && cfg.integer("observable_index") >= dof) {
    diags.push_back({DiagCode::out_of_range, line_of("observable_index"), "observable_index",
                     "observable_index must be < dof"});
  }
  if (cfg.has("coeffs")) {
    try {
      (void)PotentialSpec::polynomial(cfg.list("coeffs"));
    } catch (const Error& e) {
      diags.push_back({DiagCode::bad_value, line_of("coeffs"), "coeffs", e.what()});
    }
  }
  if (diags.empty()) result.config = std::move(cfg);
  return result;
}

inline PotentialSpec build_potential(const RunConfig& cfg) {
  const auto& kind = cfg.text("kind");
  if (kind == "harmonic") return PotentialSpec::harmonic(cfg.real("omega"));
  if (kind == "double_well") return PotentialSpec::double_well(cfg.real("a"));
  return PotentialSpec::polynomial(cfg.list("coeffs"));
}

inline SystemSpec build_system(const RunConfig& cfg) {
  SystemSpec s = make_system(build_potential(cfg), cfg.integer("dof"), UnitsConfig(cfg.real("hbar"), cfg.real("kB")),
                             cfg.text("label"));
  s.metadata.volume = cfg.real("volume");
  s.metadata.particles = cfg.integer("particles");
  return s;
}

}  // namespace tangentstat::config

#endif  // TANGENTSTAT_CONFIG_HPP
