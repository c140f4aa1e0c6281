#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsm/integrators.hpp"
#include "rsm/lyapunov_perron.hpp"

namespace rsm {

struct TrackingBound {
  double gamma = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  double slack = 1.05;
};

struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  double r_squared = 0.0;
  bool degenerate = false;  // some |delta| hit the 1e-30 clip
  bool bound_ok = true;
  double worst_bound_ratio = 0.0;  // max |delta(t)| / bound(t) over [t0, t_b]
};

// Least squares of log|delta(t)| on [t_a, t_b]; without a window the first
// 5% of the span is skipped. The optional bound
//   |delta(t)| <= slack e^{-gamma t / eps} / (1 - rho) |delta(t0)|
// is checked at every sample up to t_b.
DecayFit tracking_decay(const Trajectory& a, const Trajectory& b,
                        std::optional<std::pair<double, double>> window = std::nullopt,
                        std::optional<TrackingBound> bound = std::nullopt);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  double p_value = 1.0;
  bool passed = true;
};

// Two-sample Kolmogorov-Smirnov at the given level; both samples need
// at least 50 values (SampleSizeError otherwise).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double level = 0.01);

// Per-coordinate tests at level / dim (Bonferroni); passes when all pass.
std::vector<KsResult> ks_per_coordinate(const std::vector<Vec>& a, const std::vector<Vec>& b,
                                        double level = 0.01);

// Asymptotic c(level) with P(sqrt(n_e) D > c) = level, e.g. 1.628 at 1%.
double ks_critical_coefficient(double level);

struct ConvergenceRow {
  double epsilon = 0.0;
  double distance = 0.0;
  int realizations = 0;
  int excluded = 0;
};

struct ConvergenceTable {
  std::string quantity;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  double slope_lo = 0.0;  // 95% interval
  double slope_hi = 0.0;
  bool valid = true;      // false when more than 10% of solves were excluded
};

struct StudyParams {
  Vec x0;
  std::vector<double> epsilons;  // strictly decreasing
  int realizations = 50;
  std::uint64_t seed = 1;
  SolverParams solver;
  double xi_tol = 1e-8;
};

struct EpsilonStudy {
  ConvergenceTable h0;  // mean |tilde_h - h0|
  ConvergenceTable h1;  // mean |tilde_h - h0 - eps h1|
};

// Coupled realizations: each seed drives one xi path in rescaled time that
// is shared by tilde_h^eps for every eps and by h0, h1.
EpsilonStudy epsilon_study(const SlowFastSystem& sys, const StudyParams& params);
ConvergenceTable convergence_study_h0(const SlowFastSystem& sys, const StudyParams& params);
ConvergenceTable residual_study_h1(const SlowFastSystem& sys, const StudyParams& params);

// Seed of realization k under a master seed (splitmix64 mixing).
std::uint64_t realization_seed(std::uint64_t master, std::uint64_t k);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

void write_csv(std::ostream& out, const ConvergenceTable& table);

}  // namespace rsm
