#include "rsm/lyapunov_perron.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unsupported/Eigen/MatrixFunctions>

#include "rsm/errors.hpp"

namespace rsm {

namespace {

struct Engine {
  const SlowFastSystem& sys;
  Variant variant;
  double dt = 0.0;
  std::size_t n = 0;  // grid has n + 1 nodes
  double horizon = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double cs = 0.0;
  double cf = 0.0;
  Mat back;  // e^{-A_s dt}
  Mat fast;  // e^{A_f dt}
  std::vector<Vec> shift;  // sigma * noise at each node (empty when sigma = 0)
  std::vector<Vec> free_x;
  std::vector<double> weight;  // e^{-beta t_j}

  Engine(const SlowFastSystem& s, Variant v, const StationaryProcess& noise, const Vec& x0,
         const SolverParams& p, double at_time)
      : sys(s), variant(v) {
    if (x0.size() != sys.n_slow()) throw ConfigError("x0 has the wrong dimension");
    if (!(p.dt > 0.0)) throw ConfigError("solver step must be positive");
    if (!(p.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (p.max_iter < 1) throw ConfigError("max_iter must be at least 1");
    const double eps = variant == Variant::critical ? 0.0 : sys.epsilon;
    if (variant == Variant::hat && !(eps > 0.0)) throw DomainError("hat solve needs epsilon > 0");

    const HypothesisReport rep = validate_hypotheses(sys.with_epsilon(eps), p.gamma);
    if (!rep.contraction_ok) {
      std::string why = "hypotheses do not certify a contraction";
      for (const auto& note : rep.notes) why += "; " + note;
      throw ContractionError(why);
    }
    rho = rep.rho_eps;
    const double clock = variant == Variant::hat ? eps : 1.0;
    beta = -rep.gamma / clock;
    horizon = backward_horizon(sys, variant, p);
    dt = p.dt;
    n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    if (n < 1) throw ConfigError("solver step exceeds the backward horizon");
    horizon = static_cast<double>(n) * dt;

    const Eigen::Index n1 = sys.n_slow();
    switch (variant) {
      case Variant::hat:
        cs = 1.0;
        cf = 1.0 / eps;
        back = (-sys.S * dt).exp();
        fast = (sys.F * (dt / eps)).exp();
        break;
      case Variant::tilde:
        cs = eps;
        cf = 1.0;
        back = (-eps * sys.S * dt).exp();
        fast = (sys.F * dt).exp();
        break;
      case Variant::critical:
        cs = 0.0;
        cf = 1.0;
        back = Mat::Identity(n1, n1);
        fast = (sys.F * dt).exp();
        break;
    }

    free_x.resize(n + 1);
    weight.resize(n + 1);
    free_x[n] = x0;
    for (std::size_t j = n; j-- > 0;) free_x[j] = back * free_x[j + 1];
    for (std::size_t j = 0; j <= n; ++j) weight[j] = std::exp(-beta * time(j));

    if (sys.sigma != 0.0) {
      if (static_cast<Eigen::Index>(noise.dim) != sys.n_fast()) {
        throw ConfigError("noise process dimension does not match the fast variable");
      }
      if (!noise.covers(at_time - horizon, at_time)) {
        throw SpanError("noise process does not cover the backward horizon [" +
                        std::to_string(at_time - horizon) + ", " + std::to_string(at_time) + "]");
      }
      shift.resize(n + 1);
      for (std::size_t j = 0; j <= n; ++j) shift[j] = sys.sigma * noise.value(at_time + time(j));
    }
  }

  double time(std::size_t j) const { return -static_cast<double>(n - j) * dt; }

  Vec arg_y(const std::vector<Vec>& y, std::size_t j) const {
    return shift.empty() ? y[j] : Vec(y[j] + shift[j]);
  }

  void apply(const std::vector<Vec>& x, const std::vector<Vec>& y, std::vector<Vec>& xn,
             std::vector<Vec>& yn, std::vector<Vec>& g2s) const {
    const Eigen::Index n1 = sys.n_slow();
    const Eigen::Index n2 = sys.n_fast();
    g2s.resize(n + 1);
    std::vector<Vec> g1s(variant == Variant::critical ? 0 : n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const Vec ye = arg_y(y, j);
      g2s[j] = sys.g2(x[j], ye);
      if (!g1s.empty()) g1s[j] = sys.g1(x[j], ye);
    }
    xn.resize(n + 1);
    yn.resize(n + 1);
    if (variant == Variant::critical) {
      for (std::size_t j = 0; j <= n; ++j) xn[j] = free_x[j];
    } else {
      Vec acc = Vec::Zero(n1);
      xn[n] = free_x[n];
      for (std::size_t j = n; j-- > 0;) {
        acc = back * acc + 0.5 * dt * (g1s[j] + back * g1s[j + 1]);
        xn[j] = free_x[j] - cs * acc;
      }
    }
    Vec acc = Vec::Zero(n2);
    yn[0] = acc;
    for (std::size_t j = 0; j < n; ++j) {
      acc = fast * acc + 0.5 * dt * (fast * g2s[j] + g2s[j + 1]);
      yn[j + 1] = cf * acc;
    }
  }

  double distance(const std::vector<Vec>& xa, const std::vector<Vec>& ya,
                  const std::vector<Vec>& xb, const std::vector<Vec>& yb) const {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      sx = std::max(sx, weight[j] * (xa[j] - xb[j]).norm());
      sy = std::max(sy, weight[j] * (ya[j] - yb[j]).norm());
    }
    return sx + sy;
  }

  // c_f * trapezoid of e^{-A_f t_j} G_j over the grid.
  Vec display(const std::vector<Vec>& g2s) const {
    Vec sum = Vec::Zero(sys.n_fast());
    Mat power = Mat::Identity(sys.n_fast(), sys.n_fast());
    for (std::size_t j = n + 1; j-- > 0;) {
      const double w = (j == 0 || j == n) ? 0.5 * dt : dt;
      sum += w * (power * g2s[j]);
      power = fast * power;
    }
    return cf * sum;
  }

  WeightedPath pack(const std::vector<Vec>& x, const std::vector<Vec>& y) const {
    WeightedPath p;
    p.n_slow = sys.n_slow();
    p.n_fast = sys.n_fast();
    p.beta = beta;
    p.times.resize(n + 1);
    p.values.reserve((n + 1) * static_cast<std::size_t>(p.n_slow + p.n_fast));
    for (std::size_t j = 0; j <= n; ++j) {
      p.times[j] = time(j);
      p.values.insert(p.values.end(), x[j].data(), x[j].data() + x[j].size());
      p.values.insert(p.values.end(), y[j].data(), y[j].data() + y[j].size());
    }
    return p;
  }

  void unpack(const WeightedPath& p, std::vector<Vec>& x, std::vector<Vec>& y) const {
    if (p.size() != n + 1 || p.n_slow != sys.n_slow() || p.n_fast != sys.n_fast()) {
      throw ConfigError("weighted path does not match the solver grid");
    }
    x.resize(n + 1);
    y.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      x[j] = p.x(j);
      y[j] = p.y(j);
    }
  }
};

Variant variant_for(const StationaryProcess& noise) {
  return noise.kind == ProcessKind::eta ? Variant::hat : Variant::tilde;
}

FixedPointResult solve(const SlowFastSystem& sys, Variant variant, const StationaryProcess& noise,
                       const Vec& x0, const SolverParams& params, double at_time) {
  const Engine eng(sys, variant, noise, x0, params, at_time);
  std::vector<Vec> x = eng.free_x;
  std::vector<Vec> y(eng.n + 1, Vec::Zero(sys.n_fast()));
  std::vector<Vec> xn, yn, g2s;
  FixedPointResult out;
  out.variant = variant;
  out.horizon = eng.horizon;
  out.rho = eng.rho;
  double r = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= params.max_iter; ++it) {
    eng.apply(x, y, xn, yn, g2s);
    r = eng.distance(xn, yn, x, y);
    std::swap(x, xn);
    std::swap(y, yn);
    out.residual_history.push_back(r);
    if (!std::isfinite(r)) {
      throw NonConvergenceError("Lyapunov-Perron iteration produced non-finite values", r, it);
    }
    if (r < params.tol) {
      out.iterations = it;
      out.residual = r;
      out.display_gap = (eng.display(g2s) - y[eng.n]).norm();
      out.path = eng.pack(x, y);
      return out;
    }
  }
  throw NonConvergenceError("Lyapunov-Perron iteration did not reach tol = " +
                                std::to_string(params.tol) + " (last residual " +
                                std::to_string(r) + ")",
                            r, params.max_iter);
}

double trapezoid_step(double dt) { return 0.5 * dt; }

}  // namespace

double backward_horizon(const SlowFastSystem& sys, Variant variant, const SolverParams& params) {
  if (params.horizon) return *params.horizon;
  const double eps = variant == Variant::critical ? 0.0 : sys.epsilon;
  const auto rep = validate_hypotheses(sys.with_epsilon(eps), params.gamma);
  const double margin = -(rep.gamma + rep.gamma_f);
  if (!(margin > 0.0)) throw ContractionError("no admissible gamma margin for the backward horizon");
  if (!(params.horizon_tol > 0.0 && params.horizon_tol < 1.0)) {
    throw ConfigError("horizon tolerance must lie in (0, 1)");
  }
  const double clock = variant == Variant::hat ? eps : 1.0;
  return clock * std::log(1.0 / params.horizon_tol) / margin;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::hat: return "hat";
    case Variant::tilde: return "tilde";
    case Variant::critical: return "critical";
  }
  return "unknown";
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::hat_h_eps: return "hat_h_eps";
    case GraphKind::tilde_h_eps: return "tilde_h_eps";
    case GraphKind::h0: return "h0";
    case GraphKind::h0_plus_eps_h1: return "h0_plus_eps_h1";
  }
  return "unknown";
}

Vec WeightedPath::x(std::size_t i) const {
  const auto w = static_cast<std::size_t>(n_slow + n_fast);
  return Eigen::Map<const Vec>(values.data() + i * w, n_slow);
}

Vec WeightedPath::y(std::size_t i) const {
  const auto w = static_cast<std::size_t>(n_slow + n_fast);
  return Eigen::Map<const Vec>(values.data() + i * w + static_cast<std::size_t>(n_slow), n_fast);
}

double WeightedPath::weighted_norm() const {
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    const double w = std::exp(-beta * times[j]);
    sx = std::max(sx, w * x(j).norm());
    sy = std::max(sy, w * y(j).norm());
  }
  return sx + sy;
}

double weighted_distance(const WeightedPath& a, const WeightedPath& b) {
  if (a.size() != b.size() || a.n_slow != b.n_slow || a.n_fast != b.n_fast) {
    throw ConfigError("weighted paths live on different grids");
  }
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double w = std::exp(-a.beta * a.times[j]);
    sx = std::max(sx, w * (a.x(j) - b.x(j)).norm());
    sy = std::max(sy, w * (a.y(j) - b.y(j)).norm());
  }
  return sx + sy;
}

FixedPointResult solve_backward_fixed_point(const SlowFastSystem& sys,
                                            const StationaryProcess& noise, const Vec& x0,
                                            const SolverParams& params, double at_time) {
  return solve(sys, variant_for(noise), noise, x0, params, at_time);
}

double operator_defect(const SlowFastSystem& sys, const StationaryProcess& noise, const Vec& x0,
                       const WeightedPath& path, Variant variant, const SolverParams& params,
                       double at_time) {
  const Engine eng(sys, variant, noise, x0, params, at_time);
  std::vector<Vec> x, y, xn, yn, g2s;
  eng.unpack(path, x, y);
  eng.apply(x, y, xn, yn, g2s);
  return eng.distance(xn, yn, x, y);
}

Vec manifold_point(const SlowFastSystem& sys, const StationaryProcess& noise, const Vec& x0,
                   const SolverParams& params, double at_time) {
  const auto r = solve_backward_fixed_point(sys, noise, x0, params, at_time);
  const Vec h = r.path.y(r.path.size() - 1);
  if (r.display_gap > 1e-8 * std::max(1.0, h.norm())) {
    throw NonConvergenceError("fixed point and Lyapunov-Perron display disagree at t = 0",
                              r.display_gap, r.iterations);
  }
  return h;
}

FixedPointResult critical_y0(const SlowFastSystem& sys, const StationaryProcess& xi, const Vec& x0,
                             const SolverParams& params, double at_time) {
  if (sys.sigma != 0.0 && xi.kind != ProcessKind::xi) {
    throw ConfigError("critical objects are driven by xi");
  }
  return solve(sys, Variant::critical, xi, x0, params, at_time);
}

Vec critical_h0(const SlowFastSystem& sys, const StationaryProcess& xi, const Vec& x0,
                const SolverParams& params, double at_time) {
  const auto r = critical_y0(sys, xi, x0, params, at_time);
  return r.path.y(r.path.size() - 1);
}

namespace {

std::vector<Vec> noise_shift(const SlowFastSystem& sys, const StationaryProcess& xi,
                             const WeightedPath& p, double at_time) {
  std::vector<Vec> s(p.size(), Vec::Zero(sys.n_fast()));
  if (sys.sigma == 0.0) return s;
  for (std::size_t j = 0; j < p.size(); ++j) s[j] = sys.sigma * xi.value(at_time + p.times[j]);
  return s;
}

}  // namespace

std::vector<Vec> first_order_x1(const SlowFastSystem& sys, const StationaryProcess& xi,
                                const FixedPointResult& y0, double at_time) {
  if (y0.variant != Variant::critical) throw ConfigError("x1 needs a critical solution");
  const auto& p = y0.path;
  const std::size_t n = p.size() - 1;
  const double dt = p.times[1] - p.times[0];
  const Vec x0 = p.x(n);
  const auto shift = noise_shift(sys, xi, p, at_time);
  std::vector<Vec> g(n + 1);
  for (std::size_t j = 0; j <= n; ++j) g[j] = sys.g1(x0, Vec(p.y(j) + shift[j]));
  const Vec sx0 = sys.S * x0;
  std::vector<Vec> x1(n + 1);
  Vec acc = Vec::Zero(sys.n_slow());  // int_t^0 g1 ds
  x1[n] = acc;
  for (std::size_t j = n; j-- > 0;) {
    acc += trapezoid_step(dt) * (g[j] + g[j + 1]);
    x1[j] = sx0 * p.times[j] - acc;
  }
  return x1;
}

FirstOrder first_order_y1_h1(const SlowFastSystem& sys, const StationaryProcess& xi,
                             const FixedPointResult& y0, double at_time) {
  FirstOrder out;
  out.x1 = first_order_x1(sys, xi, y0, at_time);
  const auto& p = y0.path;
  const std::size_t n = p.size() - 1;
  const double dt = p.times[1] - p.times[0];
  const Vec x0 = p.x(n);
  const auto shift = noise_shift(sys, xi, p, at_time);
  const Eigen::Index n2 = sys.n_fast();
  const Mat P = (sys.F * dt).exp();
  const Mat I = Mat::Identity(n2, n2);
  // Implicit trapezoid for the linear Volterra equation, forward from -T.
  out.y1.assign(n + 1, Vec::Zero(n2));
  Vec gprev = Vec::Zero(n2);
  {
    const Vec ye = p.y(0) + shift[0];
    gprev = g2_jacobian_x(sys, x0, ye) * out.x1[0];
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Vec ye = p.y(j + 1) + shift[j + 1];
    const Mat bx = g2_jacobian_x(sys, x0, ye);
    const Mat by = g2_jacobian_y(sys, x0, ye);
    if (!bx.allFinite() || !by.allFinite()) throw DerivativeError("g2 partials are not finite");
    const Vec rhs = P * out.y1[j] + trapezoid_step(dt) * (P * gprev + bx * out.x1[j + 1]);
    out.y1[j + 1] = (I - trapezoid_step(dt) * by).partialPivLu().solve(rhs);
    gprev = bx * out.x1[j + 1] + by * out.y1[j + 1];
  }
  out.h1 = out.y1[n];
  return out;
}

ExpansionResult expansion_h(const SlowFastSystem& sys, const StationaryProcess& xi, const Vec& x0,
                            double epsilon, const SolverParams& params, double at_time) {
  if (epsilon < 0.0) throw DomainError("epsilon must be non-negative");
  const auto y0 = critical_y0(sys, xi, x0, params, at_time);
  const auto fo = first_order_y1_h1(sys, xi, y0, at_time);
  ExpansionResult r;
  r.h0 = y0.path.y(y0.path.size() - 1);
  r.h1 = fo.h1;
  r.epsilon = epsilon;
  r.composed = r.h0 + epsilon * r.h1;
  return r;
}

ManifoldGraph manifold_graph(const SlowFastSystem& sys, const StationaryProcess& noise,
                             const std::vector<Vec>& x0_grid, GraphKind kind,
                             const SolverParams& params) {
  if (x0_grid.empty()) throw ConfigError("manifold grid is empty");
  const bool wants_eta = kind == GraphKind::hat_h_eps;
  if (sys.sigma != 0.0 && (noise.kind == ProcessKind::eta) != wants_eta) {
    throw ConfigError("graph kind " + to_string(kind) + " needs " + (wants_eta ? "eta" : "xi"));
  }
  ManifoldGraph g;
  g.kind = kind;
  g.epsilon = sys.epsilon;
  g.x0 = x0_grid;
  g.h.assign(x0_grid.size(), Vec());
  g.source = noise.source;
  g.tol = params.tol;
  std::vector<int> iters(x0_grid.size(), 0);
  std::vector<double> horizons(x0_grid.size(), 0.0);
  std::vector<std::string> errors(x0_grid.size());

  StationaryProcess proc = noise;
  if (sys.sigma == 0.0) proc.kind = wants_eta ? ProcessKind::eta : ProcessKind::xi;

  const auto count = static_cast<std::ptrdiff_t>(x0_grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      switch (kind) {
        case GraphKind::hat_h_eps:
        case GraphKind::tilde_h_eps: {
          const auto r = solve_backward_fixed_point(sys, proc, x0_grid[k], params);
          g.h[k] = r.path.y(r.path.size() - 1);
          iters[k] = r.iterations;
          horizons[k] = r.horizon;
          break;
        }
        case GraphKind::h0: {
          const auto r = critical_y0(sys, proc, x0_grid[k], params);
          g.h[k] = r.path.y(r.path.size() - 1);
          iters[k] = r.iterations;
          horizons[k] = r.horizon;
          break;
        }
        case GraphKind::h0_plus_eps_h1: {
          const auto r = critical_y0(sys, proc, x0_grid[k], params);
          const auto fo = first_order_y1_h1(sys, proc, r);
          g.h[k] = r.path.y(r.path.size() - 1) + sys.epsilon * fo.h1;
          iters[k] = r.iterations;
          horizons[k] = r.horizon;
          break;
        }
      }
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }

  std::vector<std::string> failures;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!errors[k].empty()) failures.push_back("point " + std::to_string(k) + ": " + errors[k]);
  }
  if (!failures.empty()) {
    throw PartialResultError(std::to_string(failures.size()) + " of " +
                                 std::to_string(x0_grid.size()) + " manifold points failed",
                             failures);
  }
  g.iterations = *std::max_element(iters.begin(), iters.end());
  g.horizon = *std::max_element(horizons.begin(), horizons.end());
  for (std::size_t k = 1; k < g.x0.size(); ++k) {
    const double dx = (g.x0[k] - g.x0[k - 1]).norm();
    if (dx > 0.0) g.empirical_lipschitz = std::max(g.empirical_lipschitz, (g.h[k] - g.h[k - 1]).norm() / dx);
  }
  const double eps = (kind == GraphKind::h0) ? 0.0 : sys.epsilon;
  const auto rep = validate_hypotheses(sys.with_epsilon(eps), params.gamma);
  g.lip_bound = rep.contraction_ok && rep.certified ? rep.lip_h_bound
                                                    : std::numeric_limits<double>::quiet_NaN();
  return g;
}

void write_csv(std::ostream& out, const ManifoldGraph& graph) {
  if (graph.x0.empty()) return;
  const auto n1 = graph.x0.front().size();
  const auto n2 = graph.h.front().size();
  for (Eigen::Index i = 0; i < n1; ++i) out << (i ? "," : "") << "x0_" << i + 1;
  for (Eigen::Index i = 0; i < n2; ++i) out << ",h_" << i + 1;
  out << '\n';
  char buf[32];
  for (std::size_t k = 0; k < graph.x0.size(); ++k) {
    for (Eigen::Index i = 0; i < n1; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", graph.x0[k][i]);
      out << (i ? "," : "") << buf;
    }
    for (Eigen::Index i = 0; i < n2; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", graph.h[k][i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

ManifoldSection section_from_graph(const ManifoldGraph& graph, bool clamp) {
  if (graph.x0.size() < 2) throw ConfigError("interpolation needs at least two graph points");
  if (graph.x0.front().size() != 1) {
    throw ConfigError("graph interpolation supports a one-dimensional slow variable");
  }
  std::vector<double> xs;
  for (const auto& v : graph.x0) xs.push_back(v[0]);
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
    throw ConfigError("graph grid must be strictly increasing");
  }
  auto hs = graph.h;
  return [xs = std::move(xs), hs = std::move(hs), clamp](double, const Vec& x) -> Vec {
    const double q = x[0];
    if (q < xs.front() || q > xs.back()) {
      if (!clamp) {
        throw ExtrapolationError("x = " + std::to_string(q) + " left the graph grid [" +
                                 std::to_string(xs.front()) + ", " + std::to_string(xs.back()) + "]");
      }
      return q < xs.front() ? hs.front() : hs.back();
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), q);
    std::size_t k = static_cast<std::size_t>(it - xs.begin());
    if (k == xs.size()) k = xs.size() - 1;
    const double a = xs[k - 1];
    const double b = xs[k];
    const double w = (q - a) / (b - a);
    return (1.0 - w) * hs[k - 1] + w * hs[k];
  };
}

ManifoldSection fixed_point_section(const SlowFastSystem& sys, const StationaryProcess& eta,
                                    const SolverParams& params) {
  if (sys.sigma != 0.0 && eta.kind != ProcessKind::eta) {
    throw ConfigError("fixed-point section is driven by eta");
  }
  StationaryProcess proc = eta;
  proc.kind = ProcessKind::eta;
  return [sys, proc, params](double t, const Vec& x) -> Vec {
    Vec h = manifold_point(sys, proc, x, params, t);
    if (sys.sigma != 0.0) h += sys.sigma * proc.value(t);
    return h;
  };
}

ManifoldSection expansion_section(const SlowFastSystem& sys, const StationaryProcess& xi,
                                  const SolverParams& params) {
  if (sys.sigma != 0.0 && xi.kind != ProcessKind::xi) {
    throw ConfigError("expansion section is driven by xi on the rescaled path");
  }
  const double eps = sys.epsilon;
  return [sys, xi, params, eps](double t, const Vec& x) -> Vec {
    const double s = t / eps;
    const auto r = expansion_h(sys, xi, x, eps, params, s);
    Vec h = r.composed;
    if (sys.sigma != 0.0) h += sys.sigma * xi.value(s);
    return h;
  };
}

}  // namespace rsm
