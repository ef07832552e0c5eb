#include <doctest.h>

#include <string>

#include "degen/config.hpp"
#include "degen/error.hpp"
#include "degen/experiments.hpp"

using namespace degen;

namespace {

// Message of the Config error thrown by f, empty if none.
template <class F>
std::string config_error(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) return e.what();
    return std::string("wrong kind: ") + e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config: values and nested arrays") {
  const Config c = Config::parse(R"(
# comment
[mesh]
n = 6   # trailing comment
conducting_boxes = [
  [2, 4, 2, 4, 2, 4],
  [1, 2, 1, 2, 1, 2],
]
[source.J]
spatial = "random_h0"
amplitude = -2.5e-1
[output]
fields = false
)",
                                 "t.cfg");
  CHECK(c.has_section("mesh"));
  CHECK(c.has_section("source.J"));
  CHECK_FALSE(c.has_section("time"));
  CHECK(c.integer("mesh", "n", 0) == 6);
  const auto rows = c.integer_rows("mesh", "conducting_boxes");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<int>{1, 2, 1, 2, 1, 2});
  CHECK(c.string("source.J", "spatial", "") == "random_h0");
  CHECK(c.number("source.J", "amplitude", 0.0) == -0.25);
  CHECK_FALSE(c.boolean("output", "fields", true));
  CHECK(c.number("time", "horizon", 3.0) == 3.0);
  CHECK(c.find("mesh", "n")->line == 4);
}

TEST_CASE("config: syntax errors carry origin and line") {
  CHECK(config_error([] { Config::parse("[a]\nx = [1, 2\n", "f.cfg"); }).rfind("f.cfg:", 0) == 0);
  CHECK(config_error([] { Config::parse("[a]\nx = 1\nx = 2\n", "f.cfg"); }) == "f.cfg:3: duplicate key 'x'");
  CHECK(config_error([] { Config::parse("[a]\n[a]\n", "f.cfg"); }) == "f.cfg:2: duplicate section [a]");
  CHECK(config_error([] { Config::parse("[a]\nx 1\n", "f.cfg"); }) == "f.cfg:2: expected '=' after key 'x'");
  CHECK(config_error([] { Config::parse("[a]\nx = \"abc\n", "f.cfg"); }) == "f.cfg:2: unterminated string");
  CHECK(config_error([] { Config::parse("[a]\nx = 1 2\n", "f.cfg"); }) == "f.cfg:2: unexpected '2' after value");
  CHECK(config_error([] { Config::parse("[a]\nx = 1.2.3\n", "f.cfg"); }) == "f.cfg:2: invalid value '1.2.3'");
  CHECK(config_error([] { Config::parse("[a\n", "f.cfg"); }) == "f.cfg:1: expected ']' to close section header");
  CHECK(config_error([] { Config::load("/nonexistent/x.cfg"); }).find("cannot open") != std::string::npos);
}

TEST_CASE("config: typed getters report mismatches") {
  const Config c = Config::parse("[a]\nx = \"s\"\ny = 1.5\nz = [1, 2.5]\nw = -1\n", "g.cfg");
  CHECK(config_error([&] { c.number("a", "x", 0.0); }) == "g.cfg:2: a.x must be a number, got string");
  CHECK(config_error([&] { c.integer("a", "y", 0); }) == "g.cfg:3: a.y must be an integer");
  CHECK(config_error([&] { c.integers("a", "z", {}); }).rfind("g.cfg:4:", 0) == 0);
  CHECK(config_error([&] { c.positive("a", "w", 1.0); }) == "g.cfg:5: a.w must be positive");
  CHECK(c.numbers("a", "z", {}) == std::vector<double>{1.0, 2.5});
}

TEST_CASE("config: schema rejects unknown sections and keys") {
  const std::map<std::string, std::vector<std::string>> schema = {{"a", {"x"}}};
  CHECK(config_error([&] { Config::parse("[a]\nx = 1\n", "s.cfg").check_schema(schema); }).empty());
  CHECK(config_error([&] { Config::parse("[a]\ny = 1\n", "s.cfg").check_schema(schema); }) ==
        "s.cfg:2: unknown key 'y' in [a]");
  CHECK(config_error([&] { Config::parse("[b]\n", "s.cfg").check_schema(schema); }) == "s.cfg:1: unknown section [b]");
  CHECK(config_error([&] { Config::parse("x = 1\n", "s.cfg").check_schema(schema); }) ==
        "s.cfg:1: key 'x' outside a section");
}

TEST_CASE("experiments: command list and setup validation") {
  CHECK(experiment_commands().size() == 6);
  const Config bad_seed = Config::parse("[run]\nseed = -3\n", "r.cfg");
  CHECK(config_error([&] { run_experiment("check", bad_seed); }) == "r.cfg:2: run.seed must be >= 0");
  const Config typo = Config::parse("[mesh]\nm = 4\n", "r.cfg");
  CHECK(config_error([&] { run_experiment("check", typo); }) == "r.cfg:2: unknown key 'm' in [mesh]");
  const Config ok = Config::parse("[mesh]\nn = 4\n", "r.cfg");
  CHECK_THROWS_AS(run_experiment("frobnicate", ok), Error);
}

TEST_CASE("experiments: check on a small mesh") {
  const Config c = Config::parse("[mesh]\nn = 4\nconducting_boxes = [[1, 3, 1, 3, 1, 3]]\n[check]\nsamples = 10\n");
  const RunResult r = run_experiment("check", c);
  CHECK(r.pass);
  CHECK(r.report["pass"] == true);
  CHECK(r.files.empty());
}
