#include "rsm/stochastic_convolution.hpp"

#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "rsm/errors.hpp"
#include "rsm/kernels.hpp"

namespace rsm {

namespace {

constexpr double kDirectBudget = 2e7;

double stable_rate(const Mat& F) {
  if (F.rows() != F.cols() || F.rows() == 0) throw DomainError("fast matrix must be square");
  const double gf = logarithmic_norm(F);
  if (!(gf < 0.0)) {
    throw DomainError("logarithmic norm of F is " + std::to_string(gf) +
                      "; the stationary convolution needs it negative");
  }
  return gf;
}

void check_tol(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("lookback tolerance must lie in (0, 1)");
}

StationaryProcess convolve(ProcessKind kind, const Mat& generator, const Vec& prefactor,
                           double lookback, const LevyPath& path, double t_lo, double t_hi,
                           ConvolutionMethod method) {
  if (static_cast<Eigen::Index>(path.dim()) != generator.rows()) {
    throw ConfigError("noise dimension does not match the fast matrix");
  }
  if (!(t_hi >= t_lo)) throw ConfigError("process window is empty");
  const double dt = path.dt();
  const std::size_t taps = static_cast<std::size_t>(std::ceil(lookback / dt - 1e-9));
  if (t_lo - static_cast<double>(taps) * dt < path.t_min() - 1e-9 * dt || t_hi > path.t_max() + 1e-9 * dt) {
    throw SpanError("path window [" + std::to_string(path.t_min()) + ", " +
                    std::to_string(path.t_max()) + "] does not cover [" +
                    std::to_string(t_lo - lookback) + ", " + std::to_string(t_hi) + "]");
  }
  const std::size_t first = path.node_index(t_lo);
  const std::size_t last = path.node_index(t_hi);
  const std::size_t n = last - first + 1;
  const std::size_t d = path.dim();

  StationaryProcess out;
  out.kind = kind;
  out.t_lo = path.cell_start(first);
  out.dt = dt;
  out.dim = d;
  out.samples = n;
  out.values.assign(n * d, 0.0);
  out.lookback = static_cast<double>(taps) * dt;
  out.source = path.seed();

  if (method == ConvolutionMethod::automatic) {
    method = static_cast<double>(n) * static_cast<double>(taps) <= kDirectBudget
                 ? ConvolutionMethod::direct_parallel
                 : ConvolutionMethod::recursive;
  }
  if (taps == 0) return out;
  switch (method) {
    case ConvolutionMethod::direct_serial:
    case ConvolutionMethod::direct_parallel: {
      const auto table = kernels::ConvolutionTable::build(generator, prefactor, dt, taps);
      if (method == ConvolutionMethod::direct_serial) {
        kernels::convolve_serial(table, path.increments(), first, n, out.values);
      } else {
        kernels::convolve_omp(table, path.increments(), first, n, out.values);
      }
      break;
    }
    case ConvolutionMethod::recursive:
    case ConvolutionMethod::automatic: {
      const Mat step = (generator * dt).exp();
      kernels::convolve_recursive(step, prefactor, path.increments(), first - taps, first, n,
                                  out.values);
      break;
    }
  }
  return out;
}

}  // namespace

std::size_t StationaryProcess::index_of(double t) const {
  const std::int64_t k = aligned_steps(t - t_lo, dt);
  if (k < 0 || static_cast<std::size_t>(k) >= samples) {
    throw SpanError("time " + std::to_string(t) + " outside process window [" +
                    std::to_string(t_lo) + ", " + std::to_string(t_hi()) + "]");
  }
  return static_cast<std::size_t>(k);
}

Vec StationaryProcess::at(std::size_t i) const {
  return Eigen::Map<const Vec>(values.data() + i * dim, static_cast<Eigen::Index>(dim));
}

bool StationaryProcess::covers(double t_a, double t_b) const {
  const double slack = 1e-9 * dt;
  return samples > 0 && t_a >= t_lo - slack && t_b <= t_hi() + slack;
}

double lookback_xi(const Mat& F, double tol) {
  check_tol(tol);
  return std::log(tol) / stable_rate(F);
}

double lookback_eta(const Mat& F, double epsilon, double tol) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  return epsilon * lookback_xi(F, tol);
}

StationaryProcess stationary_xi(const Mat& F, const LevyPath& path, double t_lo, double t_hi,
                                double tol, ConvolutionMethod method) {
  const double lb = lookback_xi(F, tol);
  const Vec ones = Vec::Ones(F.rows());
  auto out = convolve(ProcessKind::xi, F, ones, lb, path, t_lo, t_hi, method);
  out.tail_bound = std::exp(logarithmic_norm(F) * out.lookback);
  return out;
}

StationaryProcess stationary_eta(const Mat& F, double epsilon, const LevyPath& path, double t_lo,
                                 double t_hi, double tol, ConvolutionMethod method) {
  const double lb = lookback_eta(F, epsilon, tol);
  Vec pre(F.rows());
  for (Eigen::Index c = 0; c < F.rows(); ++c) {
    pre[c] = std::pow(epsilon, -1.0 / path.spec().alpha[static_cast<std::size_t>(c)]);
  }
  auto out = convolve(ProcessKind::eta, F / epsilon, pre, lb, path, t_lo, t_hi, method);
  out.epsilon = epsilon;
  out.tail_bound = std::exp(logarithmic_norm(F) * out.lookback / epsilon);
  return out;
}

SplitState transform_forward(const SplitState& state, double sigma, const Vec& eta) {
  if (eta.size() != state.y.size()) throw ConfigError("eta dimension does not match y");
  return {state.x, state.y - sigma * eta};
}

SplitState transform_inverse(const SplitState& state, double sigma, const Vec& eta) {
  if (eta.size() != state.y.size()) throw ConfigError("eta dimension does not match y");
  return {state.x, state.y + sigma * eta};
}

}  // namespace rsm
