#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tangentstat/config.hpp"

using namespace tangentstat;
using namespace tangentstat::config;

namespace {

ParseResult parse(const std::string& text) { return parse_config(text); }

bool has_diag(const ParseResult& r, DiagCode code, const std::string& key) {
  for (const auto& d : r.diagnostics) {
    if (d.code == code && d.key == key) return true;
  }
  return false;
}

}  // namespace

TEST(ParseConfig, MinimalHarmonicEchoesDefaults) {
  const auto r = parse("kind = harmonic\nomega = 1\ndof = 1\ncommand = canon\nbeta = 1\n");
  ASSERT_TRUE(r.ok());
  const auto& c = *r.config;
  EXPECT_EQ(c.command(), "canon");
  EXPECT_EQ(c.real("hbar"), 1.0);
  EXPECT_EQ(c.real("kB"), 1.0);
  EXPECT_EQ(c.text("method"), "quadrature");
  EXPECT_EQ(c.text("format"), "csv");
  EXPECT_EQ(c.list("beta"), std::vector<double>{1.0});
  EXPECT_FALSE(c.has("seed"));
  const auto text = c.canonical_text();
  EXPECT_NE(text.find("hbar = 1\n"), std::string::npos);
  EXPECT_NE(text.find("dbeta = 0.001\n"), std::string::npos);
}

TEST(ParseConfig, UnknownKey) {
  const auto r = parse("command = canon\nbeta = 1\nmass = 2\n");
  ASSERT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, DiagCode::unknown_key);
  EXPECT_EQ(r.diagnostics[0].key, "mass");
  EXPECT_EQ(r.diagnostics[0].line, 3u);
}

TEST(ParseConfig, KeyThatDoesNotApplyIsRejected) {
  const auto r = parse("command = canon\nbeta = 1\ncoeffs = 0, 1\n");
  EXPECT_TRUE(has_diag(r, DiagCode::unknown_key, "coeffs"));
}

TEST(ParseConfig, NegativeBetaNamesKey) {
  const auto r = parse("command = canon\nbeta = -1\n");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(has_diag(r, DiagCode::out_of_range, "beta"));
  EXPECT_EQ(r.diagnostics[0].line, 2u);
}

TEST(ParseConfig, DistinctCodes) {
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta 1\n"), DiagCode::syntax, ""));
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta = 1\nbeta = 2\n"), DiagCode::duplicate_key, "beta"));
  EXPECT_TRUE(has_diag(parse("command = canon\n"), DiagCode::missing_key, "beta"));
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta = abc\n"), DiagCode::bad_value, "beta"));
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta = 1\ndof = 1.5\n"), DiagCode::bad_value, "dof"));
  EXPECT_TRUE(has_diag(parse("command = integrate\n"), DiagCode::bad_value, "command"));
  EXPECT_TRUE(has_diag(parse("beta = 1\n"), DiagCode::missing_key, "command"));
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const auto r = parse("# header\n\n  command=canon   # trailing\n\tbeta =0.5,1 , 2\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->list("beta"), (std::vector<double>{0.5, 1.0, 2.0}));
}

TEST(ParseConfig, SeedRequiredForStochasticMethods) {
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta = 1\nmethod = importance-mc\n"), DiagCode::missing_key, "seed"));
  EXPECT_TRUE(parse("command = canon\nbeta = 1\nmethod = importance-mc\nseed = 4\n").ok());
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta = 1\nseed = 4\n"), DiagCode::unknown_key, "seed"));
  // A command-line seed for a deterministic method is ignored, not an error.
  EXPECT_TRUE(parse_config("command = canon\nbeta = 1\n", {{"seed", "4"}}).ok());
}

TEST(ParseConfig, OverridesReplaceDocumentValues) {
  const auto r = parse_config("command = micro\nU = 1\nmethod = hit-or-miss\nseed = 1\n", {{"seed", "99"}});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->integer("seed"), 99u);
  const auto clash = parse_config("command = micro\nU = 1\n", {{"command", "canon"}});
  EXPECT_FALSE(clash.ok());
}

TEST(ParseConfig, CrossKeyChecks) {
  EXPECT_TRUE(has_diag(parse("command = liouville\ndof = 2\n"), DiagCode::out_of_range, "dof"));
  EXPECT_TRUE(has_diag(parse("command = simulate\ndof = 2\nq0 = 1, 2, 3\n"), DiagCode::bad_value, "q0"));
  const auto broadcast = parse("command = simulate\ndof = 3\nq0 = 0.5\n");
  ASSERT_TRUE(broadcast.ok());
  EXPECT_EQ(broadcast.config->list("q0"), (std::vector<double>{0.5, 0.5, 0.5}));
  // Unbounded polynomials parse; confinement is a numerical precondition checked at run time.
  EXPECT_TRUE(parse("command = canon\nbeta = 1\nkind = polynomial\ncoeffs = 0, 0, -1\n").ok());
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta = 1\nkind = polynomial\n"), DiagCode::missing_key, "coeffs"));
  EXPECT_TRUE(parse("command = canon\nbeta = 1\nlabel =\n").ok());
  EXPECT_TRUE(has_diag(parse("command = canon\nbeta =\n"), DiagCode::syntax, "beta"));
  EXPECT_FALSE(parse("command = experiment\nname = ensemble_evolution\nseed = 1\nobservable_index = 1\n").ok());
}

TEST(ParseConfig, ExperimentKeys) {
  const auto r = parse("command = experiment\nname = bath_emergence\nseed = 3\n");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.config->integer("n_bath"), 50u);
  EXPECT_EQ(r.config->real("E_total"), 50.0);
  EXPECT_EQ(r.config->integer("n_samples"), 200000u);
  EXPECT_FALSE(r.config->has("dof"));
  EXPECT_TRUE(has_diag(parse("command = experiment\nname = zeroth_law\nn_bath = 5\n"), DiagCode::unknown_key, "n_bath"));
}

TEST(ParseConfig, BuildsSystem) {
  const auto r = parse("command = canon\nbeta = 1\nkind = double_well\na = 2\ndof = 2\nlabel = two wells\n");
  ASSERT_TRUE(r.ok());
  const auto s = build_system(*r.config);
  EXPECT_EQ(s.dof, 2u);
  EXPECT_EQ(s.label, "two wells");
  EXPECT_EQ(s.potential.name(), PotentialSpec::double_well(2.0).name());
  EXPECT_DOUBLE_EQ(s.potential.value(2.0), 0.0);
}

// Round trip: canonical_text of any accepted config re-parses to an equal config.
TEST(ParseConfig, CanonicalTextRoundTripRandom) {
  std::mt19937_64 rng(2024);
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto number = [&](const KeySpec& s) {
    const double base = std::isfinite(s.min) ? s.min : -3.0;
    return base + 1e-3 + 5.0 * unit(rng);
  };
  const std::vector<std::string> commands{"simulate", "liouville", "micro", "canon", "compare", "experiment"};
  const std::vector<std::string> names{"ho_reference", "bath_emergence", "zeroth_law", "ensemble_evolution"};

  int accepted = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Context ctx;
    ctx.command = pick(commands);
    ctx.name = ctx.command == "experiment" ? pick(names) : "";
    ctx.potential = pick({"harmonic", "polynomial", "double_well"});
    ctx.cloud = pick({"canonical", "shifted_gaussian"});
    const KeySpec* method = find_spec("method", ctx);
    ctx.method = method ? pick(method->choices) : "";

    std::ostringstream doc;
    doc << "command = " << ctx.command << "\n";
    if (!ctx.name.empty()) doc << "name = " << ctx.name << "\n";
    if (find_spec("kind", ctx)) doc << "kind = " << ctx.potential << "\n";
    if (find_spec("cloud", ctx)) doc << "cloud = " << ctx.cloud << "\n";
    if (method) doc << "method = " << ctx.method << "\n";
    const bool one_dof = ctx.command == "liouville" || unit(rng) < 0.5;
    for (const auto& s : schema()) {
      if (!s.applies(ctx) || s.type == ValueType::choice) continue;
      if (s.key == "dof") {
        doc << "dof = " << (one_dof ? 1 : 2) << "\n";
        continue;
      }
      const bool required = !s.default_text.has_value();
      if (!required && unit(rng) < 0.4) continue;
      doc << s.key << " = ";
      if (s.key == "coeffs") {
        doc << "0, " << number(s) << ", 1";
      } else if (s.key == "observable_index") {
        doc << 0;
      } else if (s.type == ValueType::integer) {
        doc << static_cast<std::uint64_t>(s.min) + std::uniform_int_distribution<std::uint64_t>(0, 20)(rng);
      } else if (s.type == ValueType::text) {
        doc << pick({"", "run a", "x_1"});
      } else if (s.type == ValueType::real) {
        doc << format_number(number(s));
      } else {
        const bool per_dof = s.key == "q0" || s.key == "qtilde0" || s.key == "mean_q" || s.key == "mean_qtilde";
        const int n = per_dof ? 1 : 1 + static_cast<int>(3 * unit(rng));
        for (int i = 0; i < n; ++i) doc << (i ? ", " : "") << format_number(number(s));
      }
      doc << "\n";
    }
    const auto first = parse(doc.str());
    ASSERT_TRUE(first.ok()) << doc.str() << to_string(first.diagnostics.front().code) << " "
                            << first.diagnostics.front().key;
    const auto second = parse(first.config->canonical_text());
    ASSERT_TRUE(second.ok()) << first.config->canonical_text();
    EXPECT_EQ(*first.config, *second.config) << doc.str();
    EXPECT_EQ(first.config->canonical_text(), second.config->canonical_text());
    ++accepted;
  }
  EXPECT_EQ(accepted, 400);
}
