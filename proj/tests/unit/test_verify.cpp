#include <catch_amalgamated.hpp>

#include <set>

#include "rsm/errors.hpp"
#include "rsm/verify.hpp"

using namespace rsm;

TEST_CASE("suite lists eleven distinct checks", "[verify]") {
  const auto& ids = verify::suite_ids();
  CHECK(ids.size() == 11);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 11);
}

TEST_CASE("options follow the configuration", "[verify]") {
  auto cfg = default_config("example1");
  cfg.seed = 5;
  cfg.study.realizations = 7;
  const auto o = verify::options_from(cfg);
  CHECK(o.seed == 5);
  CHECK(o.realizations == 7);
  CHECK_FALSE(o.h1_reference);
}

TEST_CASE("cheap checks pass and report their numbers", "[verify]") {
  verify::Suite suite(verify::SuiteOptions{});
  for (const char* id : {"critical_manifold_example1", "first_order_correction", "conjugacy"}) {
    const auto r = suite.run(id);
    CHECK(r.id == id);
    CHECK(r.passed);
    CHECK(r.value < r.threshold);
    CHECK_FALSE(r.detail.empty());
    CHECK(verify::to_json(r)["passed"] == true);
  }
}

TEST_CASE("a wrong reference value fails the first-order check", "[verify]") {
  verify::SuiteOptions o;
  o.h1_reference = -0.35;
  const auto r = verify::Suite(o).run("first_order_correction");
  CHECK_FALSE(r.passed);
  CHECK(r.value > 1e-3);
}

TEST_CASE("unknown checks and hypothesis failures", "[verify][errors]") {
  verify::Suite suite(verify::SuiteOptions{});
  CHECK_THROWS_AS(suite.run("no_such_check"), ConfigError);
  CHECK(verify::hypothesis_check(default_config("example2")).passed);
  auto bad = default_config("example1");
  bad.system.K = 2.0;
  const auto r = verify::hypothesis_check(bad);
  CHECK_FALSE(r.passed);
  CHECK_FALSE(r.detail.empty());
}
