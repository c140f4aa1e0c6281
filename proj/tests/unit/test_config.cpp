#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "rsm/config.hpp"
#include "rsm/errors.hpp"

using namespace rsm;
using nlohmann::json;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("example defaults", "[config]") {
  const auto c = default_config("example1");
  CHECK(c.system_name == "example1");
  CHECK(c.system.epsilon == 0.01);
  CHECK(c.system.sigma == 0.05);
  CHECK(c.system.noise.alpha == std::vector<double>{1.8});
  CHECK(c.initial_conditions.size() == 4);
  CHECK(c.x0_grid.size() == 32);
  CHECK(c.h0_oracle(Vec::Constant(1, 3.0))[0] == 1.5);
  const auto p = c.solver();
  CHECK(p.dt == c.solver_dt);
  CHECK(p.tol == 1e-8);
  CHECK(default_config("example3").system.noise.alpha == std::vector<double>{1.9, 1.7});
  CHECK_THROWS_AS(default_config("example9"), ConfigError);
}

TEST_CASE("overrides are applied and validated", "[config]") {
  const auto c = parse_config(json::parse(R"({
    "system": "example2", "epsilon": 0.02, "sigma": 0.05, "alpha": 1.5, "seed": 9,
    "dt": 2e-4, "t_span": [0, 0.5], "x0_grid": {"from": [0, 0], "to": [1, 2], "points": 3},
    "initial_conditions": [{"x": [1, 1], "y": [0.2]}],
    "tolerances": {"solver": 1e-9, "max_iter": 50}, "gamma": 0.3, "clamp": true,
    "study": {"x0": [1, 2], "epsilons": [0.1, 0.05], "realizations": 5}, "workers": 2})"));
  CHECK(c.system.epsilon == 0.02);
  CHECK(c.system.noise.alpha == std::vector<double>{1.5});
  CHECK(c.seed == 9);
  CHECK(c.span.t1 == 0.5);
  REQUIRE(c.x0_grid.size() == 3);
  CHECK(c.x0_grid[1][1] == 1.0);
  CHECK(c.tol == 1e-9);
  CHECK(c.max_iter == 50);
  CHECK(*c.gamma == 0.3);
  CHECK(c.clamp);
  CHECK(c.study.realizations == 5);
  CHECK(c.workers == 2);
  CHECK(c.snapshot["seed"] == 9);
}

TEST_CASE("inline systems compile their nonlinearities", "[config]") {
  const auto c = parse_config(json::parse(R"({
    "system": {"name": "toy", "S": [[1]], "F": [[-2]], "g1": "sin(y)/4", "g2": ["x^2/8"], "K": 0.5},
    "epsilon": 0.05, "sigma": 0.1})"));
  CHECK(c.system_name == "toy");
  CHECK(c.system.F(0, 0) == -2.0);
  CHECK(c.system.g2(Vec::Constant(1, 2.0), Vec::Zero(1))[0] == 0.5);
  CHECK_FALSE(c.h0_oracle);
  CHECK(c.x0_grid.size() == 11);
  CHECK(c.initial_conditions.size() == 1);
}

TEST_CASE("configuration errors name the field", "[config][errors]") {
  auto fails_with = [](const char* text, const char* needle) {
    try {
      parse_config(json::parse(text));
      FAIL("expected ConfigError for " << text);
    } catch (const ConfigError& e) {
      CHECK_THAT(e.what(), ContainsSubstring(needle));
    }
  };
  fails_with(R"({"system": "example1", "sigmaa": 1})", "sigmaa");
  fails_with(R"({"epsilon": 0.1})", "system");
  fails_with(R"({"system": "example1", "epsilon": -1})", "epsilon");
  fails_with(R"({"system": "example1", "alpha": 0.9})", "alpha");
  fails_with(R"({"system": "example3", "alpha": [1.5, 1.6, 1.7]})", "alpha");
  fails_with(R"({"system": "example1", "dt": 0})", "dt");
  fails_with(R"({"system": "example1", "seed": -3})", "seed");
  fails_with(R"({"system": "example1", "t_span": [1, 0]})", "t_span");
  fails_with(R"({"system": "example1", "tolerances": {"solver": 2}})", "tolerances.solver");
  fails_with(R"({"system": "example1", "tolerances": {"foo": 2}})", "tolerances.foo");
  fails_with(R"({"system": "example1", "initial_conditions": [{"x": [1, 2], "y": 0}]})", "initial_conditions[0]");
  fails_with(R"({"system": "example1", "x0_grid": {"from": 0, "to": 1, "points": 1}})", "x0_grid.points");
  fails_with(R"({"system": "example1", "study": {"ks_samples": 10}})", "study.ks_samples");
  fails_with(R"({"system": {"S": [[1]], "F": [[-1]], "g1": "y", "g2": "x +", "K": 0.3}})", "position");
  fails_with(R"({"system": {"S": [[1]], "F": [[-1]], "g1": "y", "K": 0.3}})", "system.g2");
  fails_with(R"({"system": {"S": [[1, 2]], "F": [[-1]], "g1": "y", "g2": "x", "K": 0.3}})", "system.S");
  fails_with(R"({"system": {"S": [[1]], "F": [[-1]], "g1": "1 + y", "g2": "x", "K": 0.3}})", "vanish");
  fails_with(R"([1, 2])", "object");
}

TEST_CASE("config files", "[config][errors]") {
  const auto dir = std::filesystem::temp_directory_path() / "rsm_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "ok.json") << R"({"system": "example3", "seed": 4})";
    std::ofstream(dir / "broken.json") << R"({"system": )";
  }
  CHECK(load_config(dir / "ok.json").seed == 4);
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}
