#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsm/integrators.hpp"
#include "rsm/system_model.hpp"

namespace rsm::examples {

// Two-dimensional FitzHugh-Nagumo model:
//   S = 1, F = -1, g1 = sin(y)/3, g2 = x^2/6, K = 1/3.
SlowFastSystem example1(double epsilon = 0.01, double sigma = 0.05, double alpha = 1.8);

// Three-dimensional model with two slow variables:
//   S = diag(1/2, 1/3), F = -1, g2 = -x1 x2 / 10.
SlowFastSystem example2(double epsilon = 0.01, double sigma = 0.1, double alpha = 1.8);

// Three-dimensional model with two fast variables and independent noises:
//   S = 1/3, F = -I, g2 = (sin(x)/5, -x^2/16).
SlowFastSystem example3(double epsilon = 0.01, double sigma = 0.1,
                        std::vector<double> alpha = {1.9, 1.7});

// Critical manifold; exact for every sigma since g2 does not depend on y.
Vec example1_h0(const Vec& x0);
Vec example2_h0(const Vec& x0);
Vec example3_h0(const Vec& x0);

// First-order correction for sigma = 0: h1 = -g2_x (S x0 + g1(x0, h0)).
Vec example1_h1_quiet(const Vec& x0);
Vec example2_h1_quiet(const Vec& x0);
Vec example3_h1_quiet(const Vec& x0);

struct NamedExample {
  std::string name;
  SlowFastSystem system;
  std::function<Vec(const Vec&)> h0;
  std::function<Vec(const Vec&)> h1_quiet;
  std::vector<Vec> x0_grid;
  std::vector<std::pair<Vec, Vec>> initial_conditions;
  TimeSpan span;
};

// example1 | example2 | example3 with their default parameters.
std::optional<NamedExample> lookup(const std::string& name);
std::vector<std::string> names();

}  // namespace rsm::examples
