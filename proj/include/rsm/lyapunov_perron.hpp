#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsm/integrators.hpp"
#include "rsm/stochastic_convolution.hpp"
#include "rsm/system_model.hpp"

namespace rsm {

// hat: original time, driven by eta, weight beta = -gamma/eps.
// tilde: rescaled time, driven by xi, beta = -gamma.
// critical: tilde with eps = 0 (x frozen at x0).
enum class Variant { hat, tilde, critical };

std::string to_string(Variant v);

struct SolverParams {
  double dt = 1e-3;
  double tol = 1e-8;
  int max_iter = 200;
  // Backward horizon T = c ln(1/horizon_tol) / -(gamma + gamma_f), c = eps for hat.
  double horizon_tol = 1e-8;
  std::optional<double> gamma;
  std::optional<double> horizon;
};

// Backward horizon T (before rounding up to the solver grid).
double backward_horizon(const SlowFastSystem& sys, Variant variant, const SolverParams& params);

// Samples on the grid -T = t_0 < ... < t_N = 0; each row holds (x, y).
struct WeightedPath {
  std::vector<double> times;
  std::vector<double> values;
  Eigen::Index n_slow = 0;
  Eigen::Index n_fast = 0;
  double beta = 0.0;

  std::size_t size() const noexcept { return times.size(); }
  Vec x(std::size_t i) const;
  Vec y(std::size_t i) const;
  // sup e^{-beta t}|x(t)| + sup e^{-beta t}|y(t)|
  double weighted_norm() const;
};

double weighted_distance(const WeightedPath& a, const WeightedPath& b);

struct FixedPointResult {
  WeightedPath path;
  Variant variant = Variant::tilde;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  double horizon = 0.0;
  double rho = 0.0;
  // |y(0) - c_f int e^{-A_f s} G(s) ds| evaluated as a direct sum.
  double display_gap = 0.0;
};

// Picard iteration of the Lyapunov-Perron operator from (e^{A_s t} x0, 0).
// The variant follows the process kind (eta -> hat, xi -> tilde); the
// noise is read at at_time + t, i.e. the solve is for theta_{at_time} omega.
// Refuses (ContractionError) when the hypotheses do not certify rho < 1.
FixedPointResult solve_backward_fixed_point(const SlowFastSystem& sys,
                                            const StationaryProcess& noise, const Vec& x0,
                                            const SolverParams& params, double at_time = 0.0);

// Weighted distance between the operator applied to path and path itself.
double operator_defect(const SlowFastSystem& sys, const StationaryProcess& noise, const Vec& x0,
                       const WeightedPath& path, Variant variant, const SolverParams& params,
                       double at_time = 0.0);

// y(0) of the fixed point: hat_h or tilde_h depending on the process kind.
Vec manifold_point(const SlowFastSystem& sys, const StationaryProcess& noise, const Vec& x0,
                   const SolverParams& params, double at_time = 0.0);

FixedPointResult critical_y0(const SlowFastSystem& sys, const StationaryProcess& xi, const Vec& x0,
                             const SolverParams& params, double at_time = 0.0);

Vec critical_h0(const SlowFastSystem& sys, const StationaryProcess& xi, const Vec& x0,
                const SolverParams& params, double at_time = 0.0);

// x1(t) = S x0 t + int_0^t g1(x0, y0(s) + sigma xi(s)) ds along a critical
// solution; returns rows of size n_slow on the same grid.
std::vector<Vec> first_order_x1(const SlowFastSystem& sys, const StationaryProcess& xi,
                                const FixedPointResult& y0, double at_time = 0.0);

struct FirstOrder {
  std::vector<Vec> x1;
  std::vector<Vec> y1;
  Vec h1;
};

// y1(t) = int_{-inf}^t e^{F(t-s)} [g2_x x1 + g2_y y1] ds, h1 = y1(0).
FirstOrder first_order_y1_h1(const SlowFastSystem& sys, const StationaryProcess& xi,
                             const FixedPointResult& y0, double at_time = 0.0);

struct ExpansionResult {
  Vec h0;
  Vec h1;
  Vec composed;
  double epsilon = 0.0;
};

ExpansionResult expansion_h(const SlowFastSystem& sys, const StationaryProcess& xi, const Vec& x0,
                            double epsilon, const SolverParams& params, double at_time = 0.0);

enum class GraphKind { hat_h_eps, tilde_h_eps, h0, h0_plus_eps_h1 };

std::string to_string(GraphKind kind);

struct ManifoldGraph {
  GraphKind kind = GraphKind::tilde_h_eps;
  double epsilon = 0.0;
  std::vector<Vec> x0;
  std::vector<Vec> h;
  SeedRecord source;
  double tol = 0.0;
  double horizon = 0.0;
  int iterations = 0;  // worst point
  double empirical_lipschitz = 0.0;
  double lip_bound = 0.0;  // NaN when not certified
};

// Evaluates the requested object at every grid point (OpenMP over points).
// Failing points are collected into a PartialResultError.
ManifoldGraph manifold_graph(const SlowFastSystem& sys, const StationaryProcess& noise,
                             const std::vector<Vec>& x0_grid, GraphKind kind,
                             const SolverParams& params);

// Header x0_1..,h_1.. then one row per point, %.17g.
void write_csv(std::ostream& out, const ManifoldGraph& graph);

// Linear interpolation over a one-dimensional sorted x0 grid, constant in t.
// Outside the grid: clamp to the end values or throw ExtrapolationError.
ManifoldSection section_from_graph(const ManifoldGraph& graph, bool clamp);

// h(t, x) = hat_h(theta_t omega, x) + sigma eta(t) from an eta process.
ManifoldSection fixed_point_section(const SlowFastSystem& sys, const StationaryProcess& eta,
                                    const SolverParams& params);

// h(t, x) = h0 + eps h1 + sigma xi at rescaled time t / eps; xi must come
// from the time-rescaled path (rescale_time(path, eps)).
ManifoldSection expansion_section(const SlowFastSystem& sys, const StationaryProcess& xi,
                                  const SolverParams& params);

}  // namespace rsm
