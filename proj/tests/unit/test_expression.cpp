#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "rsm/errors.hpp"
#include "rsm/expression.hpp"

using namespace rsm;
using Catch::Matchers::WithinAbs;

namespace {

double eval(const std::string& s, double x = 0.0, double y = 0.0) {
  return Expression::parse(s, 1, 1)(Vec::Constant(1, x), Vec::Constant(1, y));
}

}  // namespace

TEST_CASE("arithmetic precedence and associativity", "[expression]") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("2 ^ 3 ^ 2") == 512.0);
  CHECK(eval("-2 ^ 2") == -4.0);
  CHECK(eval("2 * -3") == -6.0);
  CHECK(eval("1e-2 * 300") == Catch::Approx(3.0));
  CHECK(eval("10 - 4 - 3") == 3.0);
}

TEST_CASE("variables, constants and functions", "[expression]") {
  CHECK_THAT(eval("sin(y) / 3", 0.0, 0.7), WithinAbs(std::sin(0.7) / 3, 1e-15));
  CHECK_THAT(eval("x^2/6", 1.5), WithinAbs(0.375, 1e-15));
  CHECK_THAT(eval("x1 * y1 + pi", 2.0, 3.0), WithinAbs(6.0 + std::numbers::pi, 1e-15));
  CHECK_THAT(eval("exp(log(2)) + sqrt(16) + abs(-1) + tanh(0) + cos(0) + tan(0)"), WithinAbs(8.0, 1e-14));
  const auto e = Expression::parse("x2 - y3", 2, 3);
  Vec x(2), y(3);
  x << 1.0, 5.0;
  y << 0.0, 0.0, 2.0;
  CHECK(e(x, y) == 3.0);
  CHECK(e.text() == "x2 - y3");
}

TEST_CASE("deeply nested expressions evaluate", "[expression]") {
  std::string s = "x";
  for (int i = 0; i < 80; ++i) s = "(1 + " + s + ")";
  CHECK(eval(s, 1.0) == 81.0);
  std::string r = "1";
  for (int i = 0; i < 100; ++i) r = "1 + (" + r + ")";
  CHECK(eval(r) == 101.0);
}

TEST_CASE("parse errors name the position", "[expression][errors]") {
  CHECK_THROWS_AS(eval("1 +"), ConfigError);
  CHECK_THROWS_AS(eval("(1 + 2"), ConfigError);
  CHECK_THROWS_AS(eval("1 + 2)"), ConfigError);
  CHECK_THROWS_AS(eval("foo(1)"), ConfigError);
  CHECK_THROWS_AS(eval("x2"), ConfigError);
  CHECK_THROWS_AS(eval("y0"), ConfigError);
  CHECK_THROWS_AS(eval("1 $ 2"), ConfigError);
  CHECK_THROWS_AS(eval(""), ConfigError);
  try {
    eval("1 + * 2");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("compiled fields stack components", "[expression]") {
  const auto f = compile_field({"sin(x) / 5", "-x^2 / 16"}, 1, 2);
  const Vec v = f(Vec::Constant(1, 2.0), Vec::Zero(2));
  REQUIRE(v.size() == 2);
  CHECK_THAT(v[0], WithinAbs(std::sin(2.0) / 5, 1e-15));
  CHECK_THAT(v[1], WithinAbs(-0.25, 1e-15));
}
