#include <cmath>

#include "doctest.h"
#include "halfwave/checks.hpp"
#include "halfwave/run_config.hpp"

using namespace halfwave;

TEST_CASE("config parsing, typed getters and echo") {
  RunConfig c = RunConfig::parse("# comment\nL = 32\nN=256  # trailing\n\nP0_over_p1 = 0.05, 0\nflag=yes\n");
  CHECK(c.get_double("L", 1.0) == 32.0);
  CHECK(c.get_int("N", 1) == 256);
  CHECK(c.get_pair("P0_over_p1", {0, 0})[0] == 0.05);
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_double("tol", 1e-10) == 1e-10);
  CHECK(c.get_list("widths", {5, 10}).size() == 2);
  CHECK(c.echo()["tol"] == 1e-10);
  CHECK(c.echo()["N"] == 256);
  CHECK(c.unused().empty());
  CHECK_NOTHROW(c.require_all_used());
  c.assign("L=16");
  CHECK(c.get_double("L", 1.0) == 16.0);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(RunConfig::parse("novalue\n"), ConfigError);
  RunConfig c = RunConfig::parse("N=12x\nflag=maybe\nextra=1\npair=1\n");
  CHECK_THROWS_AS(c.get_int("N", 1), ConfigError);
  CHECK_THROWS_AS(c.get_bool("flag", false), ConfigError);
  CHECK_THROWS_AS(c.get_pair("pair", {0, 0}), ConfigError);
  CHECK(c.unused() == std::vector<std::string>{"extra"});
  CHECK_THROWS_AS(c.require_all_used(), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/cfg"), ConfigError);
  CHECK_THROWS_AS(parse_double("", "x"), ConfigError);
  CHECK(parse_long("-3", "x") == -3);
}

TEST_CASE("check table verdicts") {
  CheckTable t("demo");
  CHECK_FALSE(t.passed());
  t.at_most("small", 1e-9, 1e-8);
  t.at_least("big", 3.0, 2.7);
  t.within("range", -1.0, -1.15, -0.85);
  t.holds("flag", true);
  CHECK(t.passed());
  t.at_most("nan", std::nan(""), 1.0);
  CHECK_FALSE(t.passed());
  const auto j = t.to_json();
  CHECK(j["checks"].size() == 5);
  CHECK(j["checks"][4]["value"].is_null());
  CHECK(j["pass"] == false);
  CheckTable u;
  u.merge(t);
  CHECK(u.checks().size() == 5);
}

TEST_CASE("log-log slope of a power law") {
  const std::vector<double> x{1e-2, 5e-3, 2.5e-3};
  std::vector<double> y;
  for (double v : x) y.push_back(7.0 * std::pow(v, 3.0));
  CHECK(loglog_slope(x, y) == doctest::Approx(3.0));
  CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), PreconditionError);
}
