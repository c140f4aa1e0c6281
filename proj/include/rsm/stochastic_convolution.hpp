#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsm/stable_noise.hpp"
#include "rsm/system_model.hpp"

namespace rsm {

enum class ProcessKind { xi, eta };

enum class ConvolutionMethod { automatic, direct_serial, direct_parallel, recursive };

// Samples of a stationary Ornstein-Uhlenbeck type process on the grid
// t_lo, t_lo + dt, ..., t_lo + (samples - 1) dt (dt = driving path step).
struct StationaryProcess {
  ProcessKind kind = ProcessKind::xi;
  double epsilon = 1.0;  // 1 for xi
  double t_lo = 0.0;
  double dt = 0.0;
  std::size_t dim = 0;
  std::size_t samples = 0;
  std::vector<double> values;  // time-major
  double lookback = 0.0;       // truncation horizon T_b
  double tail_bound = 0.0;     // e^{gamma_f T_b} (e^{gamma_f T_b / eps} for eta)
  SeedRecord source;

  double t_hi() const noexcept { return t_lo + static_cast<double>(samples - 1) * dt; }
  double time(std::size_t i) const noexcept { return t_lo + static_cast<double>(i) * dt; }
  // Grid index of t; AlignmentError off-grid, SpanError outside.
  std::size_t index_of(double t) const;
  Vec at(std::size_t i) const;
  Vec value(double t) const { return at(index_of(t)); }
  bool covers(double t_a, double t_b) const;
};

// Lookback needed for a truncation tail of tol: ln(tol) / gamma_f, scaled
// by eps for eta. DomainError unless the logarithmic norm of F is negative.
double lookback_xi(const Mat& F, double tol);
double lookback_eta(const Mat& F, double epsilon, double tol);

// xi(t) = sum_k e^{F (t - s_k)} dL_k over cells [t - T_b, t).
StationaryProcess stationary_xi(const Mat& F, const LevyPath& path, double t_lo, double t_hi,
                                double tol = 1e-8,
                                ConvolutionMethod method = ConvolutionMethod::automatic);

// eta(t) = eps^{-1/alpha} sum_k e^{F (t - s_k) / eps} dL_k; the prefactor is
// per component when the indices differ.
StationaryProcess stationary_eta(const Mat& F, double epsilon, const LevyPath& path, double t_lo,
                                 double t_hi, double tol = 1e-8,
                                 ConvolutionMethod method = ConvolutionMethod::automatic);

struct SplitState {
  Vec x;
  Vec y;
};

// (x, y) -> (x, y - sigma eta) and back.
SplitState transform_forward(const SplitState& state, double sigma, const Vec& eta);
SplitState transform_inverse(const SplitState& state, double sigma, const Vec& eta);

}  // namespace rsm
