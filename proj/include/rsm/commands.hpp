#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rsm/config.hpp"
#include "rsm/integrators.hpp"
#include "rsm/lyapunov_perron.hpp"
#include "rsm/stochastic_convolution.hpp"

namespace rsm {

// One noise realization seen in both time frames. eta lives on the original
// grid; xi is the same realization after rescale_time(path, eps).
struct NoiseSetup {
  LevyPath path;
  LevyPath rescaled;
  StationaryProcess eta;
  StationaryProcess xi;
  double horizon = 0.0;  // rescaled-time backward horizon of the solves
};

NoiseSetup prepare_noise(const RunConfig& cfg, double t_end);

struct SimulationOutput {
  std::vector<Trajectory> full;
  std::vector<Trajectory> transformed;
  std::vector<Trajectory> reduced;
  ManifoldGraph expansion;
  std::vector<double> tracking_distance;  // after the transient
  double transient = 0.0;
  HypothesisReport report;
};

SimulationOutput run_simulation(const RunConfig& cfg);

struct ManifoldOutput {
  std::vector<ManifoldGraph> graphs;
  HypothesisReport report;
};

// Refuses (ContractionError) unless the hypotheses certify a contraction.
ManifoldOutput run_manifold(const RunConfig& cfg);

// Exit codes: 0 success, 1 suite failure, 2 configuration error,
// 3 numerical divergence.
enum ExitCode { kOk = 0, kSuiteFailure = 1, kConfigError = 2, kDivergence = 3 };

int exit_code_for(const std::exception& e);

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_manifold(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int cmd_study(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace rsm
