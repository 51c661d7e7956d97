#include <sstream>

#include "doctest.h"
#include "scclab/common.hpp"
#include "scclab/config.hpp"
#include "scclab/experiments.hpp"

using namespace scclab;

namespace {

Config parse(const std::string& text) {
  std::istringstream is(text);
  return Config::parse(is);
}

ResultRecord quick(const std::string& name, std::uint64_t seed = 5) {
  RunContext ctx;
  ctx.seed = seed;
  ctx.workers = 2;
  return run_experiment(name, Config{}, ctx);
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse("# comment\na = 1.5\n  b=2,3 4 # trailing\n\nflag = yes\n");
  CHECK(c.get_double("a", 0) == 1.5);
  CHECK(c.get_doubles("b", {}) == std::vector<double>{2, 3, 4});
  CHECK(c.get_bool("flag", false));
  CHECK(c.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(parse("novalue\n"), ConfigError);
  CHECK_THROWS_AS(parse("a = x\n").get_double("a", 0), ConfigError);
  CHECK_THROWS_AS(parse("a = 1.5\n").get_int("a", 0), ConfigError);
  CHECK_THROWS_AS(parse("r = 1, 3, 2\n").get_radii("r", {}), ConfigError);
  CHECK_THROWS_AS(parse("e = -1\n").get_positive("e", 1), ConfigError);
}

TEST_CASE("config hash ignores key order and whitespace") {
  auto a = parse("x = 1\ny = 2\n"), b = parse("y=2\n   x =  1\n"), c = parse("x = 1\ny = 3\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("unknown experiment is a config error") {
  CHECK_FALSE(is_experiment("nope"));
  CHECK_THROWS_AS(run_experiment("nope", Config{}, RunContext{}), ConfigError);
  CHECK(experiment_names().size() == 10);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  auto a = quick("rafi-check"), b = quick("rafi-check");
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.metrics == b.metrics);
  CHECK(a.series == b.series);
  REQUIRE(a.criteria.size() == b.criteria.size());
  for (std::size_t i = 0; i < a.criteria.size(); ++i) CHECK(a.criteria[i].detail == b.criteria[i].detail);
  CHECK(quick("rafi-check", 6).config_hash != a.config_hash);
}

TEST_CASE("result records round trip through json") {
  auto r = quick("witness-count");
  auto back = ResultRecord::from_json_line(r.to_json_line());
  CHECK(back.experiment == r.experiment);
  CHECK(back.config_hash == r.config_hash);
  CHECK(back.metrics == r.metrics);
  CHECK(back.series == r.series);
  CHECK(back.pass() == r.pass());
  REQUIRE(back.criteria.size() == r.criteria.size());
  CHECK(back.criteria[0].id == r.criteria[0].id);
}

TEST_CASE("report status handling") {
  auto empty = make_report({});
  REQUIRE(empty.criteria.size() == 12);
  for (const auto& l : empty.criteria) CHECK(l.status == "NOT RUN");
  CHECK_FALSE(empty.gaps.empty());

  auto r = quick("rafi-check");
  auto rep = make_report({r});
  CHECK(rep.criteria[11].status == "PASS");
  CHECK(rep.criteria[0].status == "NOT RUN");
  CHECK(rep.inconsistent.empty());

  auto tampered = r;
  tampered.config_hash = "0000000000000000";
  auto bad = make_report({tampered});
  CHECK(bad.criteria[11].status == "INCONSISTENT");
  CHECK(bad.inconsistent.size() == 1);
  CHECK_FALSE(bad.all_pass());

  std::ostringstream md;
  rep.write_markdown(md);
  CHECK(md.str().find("NOT RUN") != std::string::npos);
  std::ostringstream csv;
  Report::write_series_csv(csv, {r});
  CHECK(csv.str().rfind("experiment,", 0) == 0);
}

TEST_CASE("read_results skips blank lines") {
  auto r = quick("rafi-check");
  std::istringstream is(r.to_json_line() + "\n\n" + r.to_json_line() + "\n");
  CHECK(read_results(is).size() == 2);
}
