#include "rsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rsm/errors.hpp"

namespace rsm {

namespace {

constexpr double kClip = 1e-30;

// Two-sided 97.5% Student t quantiles for df = 1..10.
double t_quantile(int df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571,
                                 2.447,  2.365, 2.306, 2.262, 2.228};
  if (df < 1) return std::numeric_limits<double>::infinity();
  if (df <= 10) return table[df - 1];
  return 1.96 + 2.5 / df;
}

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw ConfigError("line fit needs two or more paired values");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  f.slope_se = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}

DecayFit tracking_decay(const Trajectory& a, const Trajectory& b,
                        std::optional<std::pair<double, double>> window,
                        std::optional<TrackingBound> bound) {
  if (a.size() != b.size() || a.width() != b.width() || a.size() < 3) {
    throw ConfigError("tracking fit needs two trajectories on the same grid");
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k]))) {
      throw ConfigError("tracking fit needs two trajectories on the same grid");
    }
  }
  const double t0 = a.times.front();
  const double t1 = a.times.back();
  DecayFit fit;
  if (window) {
    fit.t_a = window->first;
    fit.t_b = window->second;
  } else {
    fit.t_a = t0 + 0.05 * (t1 - t0);
    fit.t_b = t1;
  }
  if (!(fit.t_a < fit.t_b) || fit.t_a < t0 - 1e-12 || fit.t_b > t1 + 1e-12) {
    throw ConfigError("fit window must lie inside the trajectory span");
  }
  std::vector<double> ts, logs;
  const double d0 = (a.state(0) - b.state(0)).norm();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a.times[k];
    double d = (a.state(k) - b.state(k)).norm();
    if (bound && t <= fit.t_b + 1e-12) {
      const double limit = bound->slack * std::exp(-bound->gamma * (t - t0) / bound->epsilon) /
                           (1.0 - bound->rho) * d0;
      const double ratio = limit > 0.0 ? d / limit : (d > 0.0 ? INFINITY : 0.0);
      fit.worst_bound_ratio = std::max(fit.worst_bound_ratio, ratio);
      if (ratio > 1.0) fit.bound_ok = false;
    }
    if (t < fit.t_a - 1e-12 || t > fit.t_b + 1e-12) continue;
    if (d < kClip) {
      d = kClip;
      fit.degenerate = true;
    }
    ts.push_back(t);
    logs.push_back(std::log(d));
  }
  if (ts.size() < 2) throw ConfigError("fit window holds fewer than two samples");
  const LineFit lf = fit_line(ts, logs);
  fit.rate = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

double ks_critical_coefficient(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("test level must lie in (0, 1)");
  return std::sqrt(-0.5 * std::log(level / 2.0));
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double level) {
  if (a.size() < 50 || b.size() < 50) {
    throw SampleSizeError("KS test needs at least 50 samples per side, got " +
                          std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double n = static_cast<double>(sa.size());
  const double m = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.statistic = d;
  const double ne = n * m / (n + m);
  r.critical = ks_critical_coefficient(level) / std::sqrt(ne);
  const double sq = std::sqrt(ne);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
  r.passed = d <= r.critical;
  return r;
}

std::vector<KsResult> ks_per_coordinate(const std::vector<Vec>& a, const std::vector<Vec>& b,
                                        double level) {
  if (a.empty() || b.empty()) throw SampleSizeError("KS test needs non-empty samples");
  const auto dim = a.front().size();
  std::vector<KsResult> out;
  for (Eigen::Index c = 0; c < dim; ++c) {
    std::vector<double> ca, cb;
    for (const auto& v : a) ca.push_back(v[c]);
    for (const auto& v : b) cb.push_back(v[c]);
    out.push_back(ks_two_sample(ca, cb, level / static_cast<double>(dim)));
  }
  return out;
}

std::uint64_t realization_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (k + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

EpsilonStudy epsilon_study(const SlowFastSystem& sys, const StudyParams& params) {
  const auto& eps = params.epsilons;
  if (eps.size() < 2) throw ConfigError("a convergence study needs at least two epsilons");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigError("study epsilons must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("study epsilons must be strictly decreasing");
  }
  if (params.realizations < 1) throw ConfigError("a study needs at least one realization");
  if (params.x0.size() != sys.n_slow()) throw ConfigError("study x0 has the wrong dimension");
  for (double e : eps) {
    const auto rep = validate_hypotheses(sys.with_epsilon(e), params.solver.gamma);
    if (!rep.contraction_ok) {
      throw ContractionError("study epsilon " + std::to_string(e) + " is not certified");
    }
  }
  const double dt = params.solver.dt;
  const double horizon = backward_horizon(sys, Variant::critical, params.solver);
  const double T = std::ceil(horizon / dt - 1e-9) * dt;
  const double lb = lookback_xi(sys.F, params.xi_tol);
  const double t_min = -std::ceil((T + lb) / dt + 1.0) * dt;

  const std::size_t R = static_cast<std::size_t>(params.realizations);
  const std::size_t E = eps.size();
  // dist[r * E + e], NaN marks an excluded solve.
  std::vector<double> d0(R * E, NAN), d1(R * E, NAN);

  const auto count = static_cast<std::ptrdiff_t>(R);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ri = 0; ri < count; ++ri) {
    const auto r = static_cast<std::size_t>(ri);
    StationaryProcess xi;
    xi.kind = ProcessKind::xi;
    xi.dim = static_cast<std::size_t>(sys.n_fast());
    if (sys.sigma != 0.0) {
      const auto path = generate_path(sys.noise, t_min, 0.0, dt, realization_seed(params.seed, r));
      xi = stationary_xi(sys.F, path, -T, 0.0, params.xi_tol);
    }
    ExpansionResult ex;
    try {
      ex = expansion_h(sys, xi, params.x0, 0.0, params.solver);
    } catch (const NonConvergenceError&) {
      continue;
    }
    for (std::size_t e = 0; e < E; ++e) {
      try {
        const Vec h = manifold_point(sys.with_epsilon(eps[e]), xi, params.x0, params.solver);
        d0[r * E + e] = (h - ex.h0).norm();
        d1[r * E + e] = (h - ex.h0 - eps[e] * ex.h1).norm();
      } catch (const NonConvergenceError&) {
      }
    }
  }

  auto build = [&](const std::vector<double>& d, const std::string& name) {
    ConvergenceTable t;
    t.quantity = name;
    std::vector<double> lx, ly;
    int excluded_total = 0;
    for (std::size_t e = 0; e < E; ++e) {
      ConvergenceRow row;
      row.epsilon = eps[e];
      double sum = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const double v = d[r * E + e];
        if (std::isnan(v)) {
          ++row.excluded;
        } else {
          sum += v;
          ++row.realizations;
        }
      }
      excluded_total += row.excluded;
      row.distance = row.realizations > 0 ? sum / row.realizations : NAN;
      t.rows.push_back(row);
      if (row.realizations > 0 && row.distance > 0.0) {
        lx.push_back(std::log(row.epsilon));
        ly.push_back(std::log(row.distance));
      }
    }
    t.valid = excluded_total * 10 <= static_cast<int>(R * E);
    if (lx.size() >= 2) {
      const LineFit f = fit_line(lx, ly);
      const double q = t_quantile(static_cast<int>(lx.size()) - 2);
      t.slope = f.slope;
      t.slope_lo = f.slope - q * f.slope_se;
      t.slope_hi = f.slope + q * f.slope_se;
    } else {
      t.slope = t.slope_lo = t.slope_hi = NAN;
    }
    return t;
  };
  return {build(d0, "distance_h0"), build(d1, "residual_h1")};
}

ConvergenceTable convergence_study_h0(const SlowFastSystem& sys, const StudyParams& params) {
  return epsilon_study(sys, params).h0;
}

ConvergenceTable residual_study_h1(const SlowFastSystem& sys, const StudyParams& params) {
  return epsilon_study(sys, params).h1;
}

void write_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "epsilon," << table.quantity << ",realizations,excluded\n";
  char a[32], b[32];
  for (const auto& r : table.rows) {
    std::snprintf(a, sizeof a, "%.17g", r.epsilon);
    std::snprintf(b, sizeof b, "%.17g", r.distance);
    out << a << ',' << b << ',' << r.realizations << ',' << r.excluded << '\n';
  }
}

}  // namespace rsm
