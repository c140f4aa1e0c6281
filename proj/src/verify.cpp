#include "rsm/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rsm/commands.hpp"
#include "rsm/errors.hpp"
#include "rsm/examples.hpp"
#include "rsm/stochastic_convolution.hpp"

namespace rsm::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec scalar(double v) { return Vec::Constant(1, v); }

// xi on a rescaled-time path covering the backward horizon of the solves.
StationaryProcess xi_for(const SlowFastSystem& sys, const SolverParams& p, std::uint64_t seed,
                         double lookback_tol = 1e-8) {
  const double dt = p.dt;
  const double T = std::ceil(backward_horizon(sys, Variant::critical, p) / dt - 1e-9) * dt;
  const double lb = lookback_xi(sys.F, lookback_tol);
  const double t_min = -std::ceil((T + lb) / dt + 1.0) * dt;
  const auto path = generate_path(sys.noise, t_min, 0.0, dt, seed);
  return stationary_xi(sys.F, path, -T, 0.0, lookback_tol);
}

StationaryProcess quiet_xi(const SlowFastSystem& sys) {
  StationaryProcess xi;
  xi.kind = ProcessKind::xi;
  xi.dim = static_cast<std::size_t>(sys.n_fast());
  return xi;
}

CheckResult named(std::string id, std::string summary) {
  CheckResult r;
  r.id = std::move(id);
  r.summary = std::move(summary);
  return r;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

CheckResult critical_example1(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r = named("critical_manifold_example1", "Example 1 h0(x0) = x0^2/6 for sigma in {0, 0.05}");
  SolverParams p;
  p.dt = 1e-3;
  double worst = 0.0;
  for (double sigma : {0.0, 0.05}) {
    const auto sys = examples::example1(0.01, sigma);
    const auto xi = sigma == 0.0 ? quiet_xi(sys) : xi_for(sys, p, seed);
    for (double x0 : {0.0, 0.5, 1.0, 2.0, std::numbers::pi}) {
      const Vec h = critical_h0(sys, xi, scalar(x0), p);
      worst = std::max(worst, std::abs(h[0] - x0 * x0 / 6.0));
    }
  }
  r.seconds = seconds_since(t0);
  r.value = worst;
  r.threshold = 1e-3;
  r.passed = worst < 1e-3 && r.seconds < 10.0;
  r.detail = "max abs error " + fmt(worst) + ", " + fmt(r.seconds) + " s";
  return r;
}

CheckResult critical_examples23(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r = named("critical_manifold_examples_2_3", "Example 2 h0(1,2) = -0.2; Example 3 h0 = (sin x0/5, -x0^2/16) at x0 in {0, 1}");
  SolverParams p;
  p.dt = 1e-3;
  const auto s2 = examples::example2();
  Vec x2(2);
  x2 << 1.0, 2.0;
  const Vec h2 = critical_h0(s2, xi_for(s2, p, seed), x2, p);
  double worst = std::abs(h2[0] + 0.2);
  const auto s3 = examples::example3(0.01, 0.0);
  for (double x0 : {0.0, 1.0}) {
    const Vec h3 = critical_h0(s3, quiet_xi(s3), scalar(x0), p);
    worst = std::max(worst, (h3 - examples::example3_h0(scalar(x0))).cwiseAbs().maxCoeff());
  }
  r.seconds = seconds_since(t0);
  r.value = worst;
  r.threshold = 1e-3;
  r.passed = worst < 1e-3;
  r.detail = "Example 2 h0(1,2) = " + fmt(h2[0]) + ", max abs error " + fmt(worst);
  return r;
}

CheckResult first_order(const SuiteOptions& o) {
  const auto t0 = Clock::now();
  CheckResult r = named("first_order_correction", "Example 1 h1 at x0 = 1, sigma = 0");
  const double ref = o.h1_reference.value_or(-1.0 / 3.0 - std::sin(1.0 / 6.0) / 9.0);
  SolverParams p;
  p.dt = 1e-3;
  const auto sys = examples::example1(0.01, 0.0);
  const auto ex = expansion_h(sys, quiet_xi(sys), scalar(1.0), 0.01, p);
  r.seconds = seconds_since(t0);
  r.value = std::abs(ex.h1[0] - ref);
  r.threshold = 1e-4;
  r.passed = r.value < 1e-4;
  r.detail = "h1 = " + fmt(ex.h1[0]) + " vs reference " + fmt(ref);
  return r;
}

CheckResult contraction(const SuiteOptions& o) {
  const auto t0 = Clock::now();
  CheckResult r = named("contraction_observability", "residual ratios <= rho(eps) + 0.1 and geometric iteration bound + 5");
  std::mt19937_64 gen(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto U = [&](double a, double b) { return a + (b - a) * u(gen); };
  double worst_excess = -1.0;  // max(ratio - rho)
  int worst_extra = -1000;     // max(iterations - bound)
  for (int i = 0; i < o.contraction_configs; ++i) {
    const double s = U(0.1, 1.0);
    const double f = U(-2.0, -0.5);
    const double K = U(1e-6, 0.8) * -f;
    const double a = U(-1, 1), b = U(-1, 1), c = U(-1, 1), d = U(-1, 1);
    const double sigma = U(0.0, 0.3);
    double eps = U(0.01, 0.3);
    const std::uint64_t seed = gen();
    SlowFastSystem sys;
    sys.name = "random";
    sys.S = Mat::Constant(1, 1, s);
    sys.F = Mat::Constant(1, 1, f);
    sys.g1 = [=](const Vec& x, const Vec& y) { return scalar(K * (a * std::sin(x[0]) + b * std::sin(y[0]))); };
    sys.g2 = [=](const Vec& x, const Vec& y) { return scalar(K * (c * std::sin(x[0]) + d * std::sin(y[0]))); };
    sys.K = K;
    sys.sigma = sigma;
    sys.noise = StableSpec::uniform(1.8, 1);
    while (!validate_hypotheses(sys.with_epsilon(eps)).contraction_ok) eps *= 0.5;
    sys.epsilon = eps;
    SolverParams p;
    p.dt = 1e-2;
    p.tol = 1e-9;
    const auto xi = xi_for(sys, p, seed);
    const auto res = solve_backward_fixed_point(sys, xi, scalar(U(-2.0, 2.0)), p);
    const auto& h = res.residual_history;
    for (std::size_t k = 1; k < h.size(); ++k) {
      if (h[k - 1] < 1e-13) break;
      worst_excess = std::max(worst_excess, h[k] / h[k - 1] - res.rho);
    }
    if (h.front() > p.tol) {
      const int bound = static_cast<int>(std::ceil(std::log(p.tol / h.front()) / std::log(res.rho)));
      worst_extra = std::max(worst_extra, res.iterations - bound);
    }
  }
  r.seconds = seconds_since(t0);
  r.value = worst_excess;
  r.threshold = 0.1;
  r.passed = worst_excess <= 0.1 && worst_extra <= 5;
  r.detail = std::to_string(o.contraction_configs) + " configurations; max(ratio - rho) = " +
             fmt(worst_excess) + ", max(iterations - bound) = " + std::to_string(worst_extra);
  return r;
}

CheckResult tracking(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r = named("exponential_tracking", "Example 1 decay rate over [0.005, 0.05] and tracking bound");
  const auto sys = examples::example1(0.01, 0.05, 1.8);
  const double dt = 1e-4;
  const auto path = generate_path(sys.noise, 0.0, 0.05, dt, seed);
  const Vec x0 = scalar(1.0);
  const auto a = integrate_sde(sys, path, x0, scalar(0.5), {0.0, 0.05}, dt);
  const auto b = integrate_sde(sys, path, x0, scalar(1.5), {0.0, 0.05}, dt);
  const auto rep = validate_hypotheses(sys);
  const auto fit = tracking_decay(a, b, std::pair{0.005, 0.05},
                                  TrackingBound{rep.gamma, sys.epsilon, rep.rho_eps, 1.05});
  const double limit = -rep.gamma / sys.epsilon * 0.8;
  r.seconds = seconds_since(t0);
  r.value = fit.rate;
  r.threshold = limit;
  r.passed = fit.rate <= limit && fit.bound_ok && r.seconds < 30.0;
  r.detail = "rate " + fmt(fit.rate) + " (limit " + fmt(limit) + "), worst bound ratio " +
             fmt(fit.worst_bound_ratio);
  return r;
}

CheckResult law_equality(const SuiteOptions& o) {
  const auto t0 = Clock::now();
  CheckResult r = named("eta_xi_law_equality", "KS: eta(theta_t w) vs xi(theta_{t/eps} w), eps = 0.01");
  const double eps = 0.01;
  const double dt = 1e-4;
  const double t = 0.05;
  const Mat F = Mat::Constant(1, 1, -1.0);
  const StableSpec spec = StableSpec::uniform(1.8, 1);
  const double lb_eta = lookback_eta(F, eps, 1e-8);
  const double lb_xi = lookback_xi(F, 1e-8);
  const double dxi = dt / eps;
  const std::size_t n = static_cast<std::size_t>(o.ks_samples);
  std::vector<double> va(n), vb(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    const auto pa = generate_path(spec, -std::ceil(lb_eta / dt + 1.0) * dt, t, dt,
                                  realization_seed(o.seed, 2 * k));
    va[k] = stationary_eta(F, eps, pa, t, t).values[0];
    const double s = t / eps;
    const auto pb = generate_path(spec, -std::ceil(lb_xi / dxi + 1.0) * dxi, s, dxi,
                                  realization_seed(o.seed, 2 * k + 1));
    vb[k] = stationary_xi(F, pb, s, s).values[0];
  }
  const auto ks = ks_two_sample(va, vb, 0.01);
  r.seconds = seconds_since(t0);
  r.value = ks.statistic;
  r.threshold = ks.critical;
  r.passed = ks.passed;
  r.detail = "D = " + fmt(ks.statistic) + ", critical " + fmt(ks.critical) + ", p = " + fmt(ks.p_value);
  return r;
}

CheckResult self_similarity(const SuiteOptions& o) {
  const auto t0 = Clock::now();
  CheckResult r = named("self_similarity", "KS: c^{1/alpha} L_t vs L_{ct}, c = 4, alpha in {1.5, 1.8}");
  const double c = 4.0;
  const double dt = 0.01;
  const std::size_t n = static_cast<std::size_t>(o.ks_samples);
  bool ok = true;
  double worst = 0.0;
  double crit = 0.0;
  for (double alpha : {1.5, 1.8}) {
    const StableSpec spec = StableSpec::uniform(alpha, 1);
    std::vector<double> va(n), vb(n);
    const std::uint64_t base = o.seed + static_cast<std::uint64_t>(alpha * 1000);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const auto k = static_cast<std::uint64_t>(i);
      const auto pa = generate_path(spec, 0.0, 1.0, dt, realization_seed(base, 2 * k));
      va[k] = std::pow(c, 1.0 / alpha) * pa.value(1.0, 0);
      const auto pb = generate_path(spec, 0.0, c, dt, realization_seed(base, 2 * k + 1));
      vb[k] = pb.value(c, 0);
    }
    const auto ks = ks_two_sample(va, vb, 0.01);
    ok = ok && ks.passed;
    if (ks.statistic >= worst) {
      worst = ks.statistic;
      crit = ks.critical;
    }
  }
  r.seconds = seconds_since(t0);
  r.value = worst;
  r.threshold = crit;
  r.passed = ok;
  r.detail = "largest D = " + fmt(worst) + ", critical " + fmt(crit);
  return r;
}

CheckResult conjugacy(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r = named("conjugacy", "SDE orbit vs transformed orbit + (0, sigma eta), dt = 1e-4, t in [0, 0.5]");
  const auto sys = examples::example1(0.01, 0.05, 1.8);
  const double dt = 1e-4;
  const double lb = lookback_eta(sys.F, sys.epsilon, 1e-8);
  const auto path = generate_path(sys.noise, -std::ceil(lb / dt + 1.0) * dt, 0.5, dt, seed);
  const auto eta = stationary_eta(sys.F, sys.epsilon, path, 0.0, 0.5);
  const Vec x0 = scalar(1.0);
  const Vec y0 = scalar(0.5);
  const auto full = integrate_sde(sys, path, x0, y0, {0.0, 0.5}, dt);
  const auto z = transform_forward({x0, y0}, sys.sigma, eta.at(0));
  const auto tr = integrate_transformed(sys, eta, z.x, z.y, {0.0, 0.5}, dt);
  double worst = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    const auto back = transform_inverse({tr.x(k), tr.y(k)}, sys.sigma, eta.value(tr.times[k]));
    worst = std::max(worst, (full.x(k) - back.x).cwiseAbs().maxCoeff());
    worst = std::max(worst, (full.y(k) - back.y).cwiseAbs().maxCoeff());
  }
  r.seconds = seconds_since(t0);
  r.value = worst;
  r.threshold = 1e-2;
  r.passed = worst < 1e-2;
  r.detail = "sup-norm gap " + fmt(worst);
  return r;
}

CheckResult figure(std::uint64_t seed) {
  const auto t0 = Clock::now();
  CheckResult r = named("figure_reproduction", "Example 1 full vs reduced orbits within 0.05 after the transient; Examples 2-3 run");
  auto c1 = default_config("example1");
  c1.seed = seed;
  const auto out1 = run_simulation(c1);
  double worst = 0.0;
  for (double d : out1.tracking_distance) worst = std::max(worst, d);
  std::string notes;
  bool others = true;
  std::vector<RunConfig> extra;
  for (double sigma : {0.1, 0.05}) {
    auto c = default_config("example2");
    c.system.sigma = sigma;
    extra.push_back(c);
  }
  extra.push_back(default_config("example3"));
  for (auto& c : extra) {
    c.seed = seed;
    try {
      const auto o = run_simulation(c);
      double w = 0.0;
      for (double d : o.tracking_distance) w = std::max(w, d);
      notes += "; " + c.system_name + " sigma " + fmt(c.system.sigma) + " distance " + fmt(w);
    } catch (const DivergenceError& e) {
      others = false;
      notes += "; " + c.system_name + " diverged: " + e.what();
    }
  }
  r.seconds = seconds_since(t0);
  r.value = worst;
  r.threshold = 0.05;
  r.passed = worst < 0.05 && others;
  r.detail = "Example 1 distance after t > " + fmt(out1.transient) + ": " + fmt(worst) + notes;
  return r;
}

}  // namespace

SuiteOptions options_from(const RunConfig& cfg) {
  SuiteOptions o;
  o.seed = cfg.seed;
  o.realizations = cfg.study.realizations;
  o.ks_samples = cfg.study.ks_samples;
  o.contraction_configs = cfg.study.contraction_configs;
  return o;
}

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = {
      "critical_manifold_example1", "critical_manifold_examples_2_3", "first_order_correction",
      "contraction_observability",  "exponential_tracking",           "eta_xi_law_equality",
      "self_similarity",            "critical_limit_rate",            "first_order_residual_rate",
      "conjugacy",                  "figure_reproduction"};
  return ids;
}

const EpsilonStudy& Suite::study() {
  if (!study_) {
    const auto t0 = Clock::now();
    StudyParams p;
    p.x0 = scalar(1.0);
    p.epsilons = {0.2, 0.1, 0.05, 0.025};
    p.realizations = opts_.realizations;
    p.seed = opts_.seed;
    p.solver.dt = 1e-3;
    study_ = epsilon_study(examples::example1(0.01, 0.05, 1.8), p);
    study_seconds_ = seconds_since(t0);
  }
  return *study_;
}

CheckResult Suite::run(const std::string& id) {
  try {
    if (id == "critical_manifold_example1") return critical_example1(opts_.seed);
    if (id == "critical_manifold_examples_2_3") return critical_examples23(opts_.seed);
    if (id == "first_order_correction") return first_order(opts_);
    if (id == "contraction_observability") return contraction(opts_);
    if (id == "exponential_tracking") return tracking(opts_.seed);
    if (id == "eta_xi_law_equality") return law_equality(opts_);
    if (id == "self_similarity") return self_similarity(opts_);
    if (id == "conjugacy") return conjugacy(opts_.seed);
    if (id == "figure_reproduction") return figure(opts_.seed);
    if (id == "critical_limit_rate" || id == "first_order_residual_rate") {
      const auto& s = study();
      CheckResult r;
      r.id = id;
      r.seconds = study_seconds_;
      std::string rows;
      for (std::size_t k = 0; k < s.h0.rows.size(); ++k) {
        rows += " eps=" + fmt(s.h0.rows[k].epsilon) + ":" + fmt(s.h0.rows[k].distance) + "/" +
                fmt(s.h1.rows[k].distance);
      }
      if (id == "critical_limit_rate") {
        r.summary = "slope of mean |h_eps - h0| in [0.7, 1.3]";
        r.value = s.h0.slope;
        r.threshold = 1.0;
        r.passed = s.h0.valid && s.h0.slope >= 0.7 && s.h0.slope <= 1.3 && r.seconds < 300.0;
        r.detail = "slope " + fmt(s.h0.slope) + " [" + fmt(s.h0.slope_lo) + ", " +
                   fmt(s.h0.slope_hi) + "];" + rows;
      } else {
        bool below = true;
        for (std::size_t k = 0; k < s.h0.rows.size(); ++k) {
          below = below && s.h1.rows[k].distance < s.h0.rows[k].distance;
        }
        r.summary = "slope of mean |h_eps - h0 - eps h1| in [1.6, 2.4], below the h0 distance";
        r.value = s.h1.slope;
        r.threshold = 2.0;
        r.passed = s.h1.valid && below && s.h1.slope >= 1.6 && s.h1.slope <= 2.4;
        r.detail = "slope " + fmt(s.h1.slope) + " [" + fmt(s.h1.slope_lo) + ", " +
                   fmt(s.h1.slope_hi) + "], residual below distance: " + (below ? "yes" : "no");
      }
      return r;
    }
  } catch (const std::exception& e) {
    CheckResult r;
    r.id = id;
    r.summary = "raised an error";
    r.detail = e.what();
    return r;
  }
  throw ConfigError("unknown check '" + id + "'");
}

std::vector<CheckResult> Suite::run_all() {
  std::vector<CheckResult> out;
  for (const auto& id : suite_ids()) out.push_back(run(id));
  return out;
}

CheckResult hypothesis_check(const RunConfig& cfg) {
  CheckResult r = named("hypotheses", "configured system passes the gap and Lipschitz checks with rho(eps) < 1");
  const auto rep = validate_hypotheses(cfg.system, cfg.gamma);
  r.value = rep.rho_eps;
  r.threshold = 1.0;
  r.passed = rep.lipschitz_gap_ok && rep.contraction_ok && rep.certified;
  for (const auto& n : rep.notes) r.detail += (r.detail.empty() ? "" : "; ") + n;
  if (r.detail.empty()) r.detail = "rho(eps) = " + fmt(rep.rho_eps);
  return r;
}

nlohmann::json to_json(const CheckResult& r) {
  return {{"id", r.id},
          {"summary", r.summary},
          {"passed", r.passed},
          {"value", std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json(nullptr)},
          {"threshold", r.threshold},
          {"seconds", r.seconds},
          {"detail", r.detail}};
}

double orbit_distance(const Trajectory& full, const Trajectory& reduced, double t_from) {
  if (full.width() != reduced.width()) throw ConfigError("orbits have different state widths");
  if (full.size() < 2) throw ConfigError("full orbit is too short");
  const double dt = full.times[1] - full.times[0];
  const double t0 = full.times.front();
  double worst = 0.0;
  for (std::size_t k = 0; k < reduced.size(); ++k) {
    const double t = reduced.times[k];
    if (t < t_from - 1e-12) continue;
    const double q = (t - t0) / dt;
    const auto j = static_cast<std::size_t>(std::llround(q));
    if (std::abs(q - static_cast<double>(j)) > 1e-6 || j >= full.size()) continue;
    worst = std::max(worst, (full.state(j) - reduced.state(k)).norm());
  }
  return worst;
}

}  // namespace rsm::verify
