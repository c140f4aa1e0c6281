#include "rsm/examples.hpp"

#include <cmath>
#include <numbers>

namespace rsm::examples {

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Mat mat1(double a) { return Mat::Constant(1, 1, a); }

std::vector<Vec> line_grid(double a, double b, double step) {
  std::vector<Vec> g;
  const int n = static_cast<int>(std::lround((b - a) / step));
  for (int i = 0; i <= n; ++i) g.push_back(vec({a + step * i}));
  return g;
}

}  // namespace

SlowFastSystem example1(double epsilon, double sigma, double alpha) {
  SlowFastSystem s;
  s.name = "example1";
  s.S = mat1(1.0);
  s.F = mat1(-1.0);
  s.g1 = [](const Vec&, const Vec& y) { return vec({std::sin(y[0]) / 3.0}); };
  s.g2 = [](const Vec& x, const Vec&) { return vec({x[0] * x[0] / 6.0}); };
  s.g2_x = [](const Vec& x, const Vec&) { return mat1(x[0] / 3.0); };
  s.g2_y = [](const Vec&, const Vec&) { return mat1(0.0); };
  s.K = 1.0 / 3.0;
  s.epsilon = epsilon;
  s.sigma = sigma;
  s.noise = StableSpec::uniform(alpha, 1);
  s.g1_bound = 1.0 / 3.0;
  return s;
}

SlowFastSystem example2(double epsilon, double sigma, double alpha) {
  SlowFastSystem s;
  s.name = "example2";
  s.S = Mat::Zero(2, 2);
  s.S(0, 0) = 0.5;
  s.S(1, 1) = 1.0 / 3.0;
  s.F = mat1(-1.0);
  s.g1 = [](const Vec& x, const Vec& y) {
    return vec({-(x[0] * x[0] * x[0] + x[0] * x[1]) / 20.0 + y[0] / 3.0,
                0.5 * std::sin(x[0]) * std::cos(x[1]) + y[0] * y[0] / 8.0});
  };
  s.g2 = [](const Vec& x, const Vec&) { return vec({-x[0] * x[1] / 10.0}); };
  s.g2_x = [](const Vec& x, const Vec&) {
    Mat j(1, 2);
    j << -x[1] / 10.0, -x[0] / 10.0;
    return j;
  };
  s.g2_y = [](const Vec&, const Vec&) { return mat1(0.0); };
  s.K = 1.0 / 3.0;
  s.epsilon = epsilon;
  s.sigma = sigma;
  s.noise = StableSpec::uniform(alpha, 1);
  return s;
}

SlowFastSystem example3(double epsilon, double sigma, std::vector<double> alpha) {
  SlowFastSystem s;
  s.name = "example3";
  s.S = mat1(1.0 / 3.0);
  s.F = -Mat::Identity(2, 2);
  s.g1 = [](const Vec& x, const Vec& y) {
    const double v = x[0];
    return vec({(v - v * v * v + std::sin(y[0]) * std::cos(y[1])) / 50.0});
  };
  s.g2 = [](const Vec& x, const Vec&) {
    return vec({std::sin(x[0]) / 5.0, -x[0] * x[0] / 16.0});
  };
  s.g2_x = [](const Vec& x, const Vec&) {
    Mat j(2, 1);
    j << std::cos(x[0]) / 5.0, -x[0] / 8.0;
    return j;
  };
  s.g2_y = [](const Vec&, const Vec&) { return Mat::Zero(2, 2).eval(); };
  s.K = 1.0 / 3.0;
  s.epsilon = epsilon;
  s.sigma = sigma;
  s.noise = StableSpec{std::move(alpha), 1.0};
  s.g1_bound = std::nullopt;
  return s;
}

Vec example1_h0(const Vec& x0) { return vec({x0[0] * x0[0] / 6.0}); }

Vec example2_h0(const Vec& x0) { return vec({-x0[0] * x0[1] / 10.0}); }

Vec example3_h0(const Vec& x0) { return vec({std::sin(x0[0]) / 5.0, -x0[0] * x0[0] / 16.0}); }

Vec example1_h1_quiet(const Vec& x0) {
  const double x = x0[0];
  return vec({-x * x / 3.0 - x * std::sin(x * x / 6.0) / 9.0});
}

Vec example2_h1_quiet(const Vec& x0) {
  const double a = x0[0];
  const double b = x0[1];
  const double h = -a * b / 10.0;
  const double v1 = 0.5 * a - (a * a * a + a * b) / 20.0 + h / 3.0;
  const double v2 = b / 3.0 + 0.5 * std::sin(a) * std::cos(b) + h * h / 8.0;
  return vec({b / 10.0 * v1 + a / 10.0 * v2});
}

Vec example3_h1_quiet(const Vec& x0) {
  const double x = x0[0];
  const Vec h = example3_h0(x0);
  const double v = x / 3.0 + (x - x * x * x + std::sin(h[0]) * std::cos(h[1])) / 50.0;
  return vec({-std::cos(x) / 5.0 * v, x / 8.0 * v});
}

std::optional<NamedExample> lookup(const std::string& name) {
  if (name == "example1") {
    NamedExample e{name, example1(), example1_h0, example1_h1_quiet,
                   line_grid(0.0, std::numbers::pi, 0.1), {}, {0.0, 1.0}};
    e.x0_grid.back() = vec({std::numbers::pi});
    e.initial_conditions = {{vec({0.5}), vec({1.0})},
                            {vec({1.0}), vec({-0.5})},
                            {vec({1.5}), vec({0.0})},
                            {vec({2.0}), vec({1.5})}};
    return e;
  }
  if (name == "example2") {
    NamedExample e{name, example2(), example2_h0, example2_h1_quiet, {}, {}, {0.0, 1.0}};
    for (int i = 0; i <= 4; ++i) {
      for (int j = 0; j <= 4; ++j) e.x0_grid.push_back(vec({0.5 * i, 0.5 * j}));
    }
    e.initial_conditions = {{vec({1.0, 2.0}), vec({0.5})}, {vec({0.5, 1.0}), vec({-0.5})}};
    return e;
  }
  if (name == "example3") {
    NamedExample e{name, example3(), example3_h0, example3_h1_quiet,
                   line_grid(-1.5, 1.5, 0.1), {}, {0.0, 1.0}};
    e.initial_conditions = {{vec({1.0}), vec({0.5, -0.5})}, {vec({-0.5}), vec({-0.3, 0.4})}};
    return e;
  }
  return std::nullopt;
}

std::vector<std::string> names() { return {"example1", "example2", "example3"}; }

}  // namespace rsm::examples
