#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsm/integrators.hpp"
#include "rsm/lyapunov_perron.hpp"
#include "rsm/system_model.hpp"

namespace rsm {

struct InitialCondition {
  Vec x;
  Vec y;
};

struct StudyConfig {
  std::optional<Vec> x0;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  int realizations = 50;
  int ks_samples = 10000;
  int contraction_configs = 50;
};

struct RunConfig {
  std::string system_name;
  SlowFastSystem system;  // carries epsilon, sigma and the noise spec
  std::function<Vec(const Vec&)> h0_oracle;        // empty for inline systems
  std::function<Vec(const Vec&)> h1_quiet_oracle;  // sigma = 0 only
  std::uint64_t seed = 1;
  double dt = 1e-4;          // original-time step
  TimeSpan span{0.0, 1.0};
  double reduced_dt = 1e-3;
  double solver_dt = 1e-2;   // rescaled-time step of the manifold solves
  std::vector<Vec> x0_grid;
  std::vector<InitialCondition> initial_conditions;
  double tol = 1e-8;
  double horizon_tol = 1e-8;
  double lookback_tol = 1e-8;
  int max_iter = 200;
  std::optional<double> gamma;
  bool clamp = false;
  StudyConfig study;
  int workers = 0;  // 0: OpenMP default
  nlohmann::json snapshot;

  SolverParams solver() const;
};

// Unknown keys and malformed values are ConfigErrors naming the field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& file);
RunConfig default_config(const std::string& example);

}  // namespace rsm
