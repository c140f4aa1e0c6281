#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsm/analysis.hpp"
#include "rsm/config.hpp"

namespace rsm::verify {

struct CheckResult {
  std::string id;
  std::string summary;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  double seconds = 0.0;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  int realizations = 50;
  int ks_samples = 10000;
  int contraction_configs = 50;
  // Reference value for the Example 1 first-order term at x0 = 1, sigma = 0;
  // defaults to the closed form -1/3 - sin(1/6)/9.
  std::optional<double> h1_reference;
};

SuiteOptions options_from(const RunConfig& cfg);

// Identifiers of the built-in suite, in report order.
const std::vector<std::string>& suite_ids();

class Suite {
 public:
  explicit Suite(SuiteOptions opts) : opts_(std::move(opts)) {}
  CheckResult run(const std::string& id);
  std::vector<CheckResult> run_all();

 private:
  const EpsilonStudy& study();

  SuiteOptions opts_;
  std::optional<EpsilonStudy> study_;
  double study_seconds_ = 0.0;
};

// Hypothesis certification of a configured system (fails closed).
CheckResult hypothesis_check(const RunConfig& cfg);

nlohmann::json to_json(const CheckResult& r);

// Largest distance between a full orbit and a reduced orbit at their shared
// sample times t >= t_from.
double orbit_distance(const Trajectory& full, const Trajectory& reduced, double t_from);

}  // namespace rsm::verify
