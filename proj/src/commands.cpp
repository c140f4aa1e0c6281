#include "rsm/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "rsm/errors.hpp"
#include "rsm/run_record.hpp"
#include "rsm/verify.hpp"

namespace rsm {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// n such that n * unit == value up to rounding; ConfigError otherwise.
std::int64_t whole_multiple(double value, double unit, const std::string& what) {
  const double q = value / unit;
  const double r = std::nearbyint(q);
  if (r < 1.0 || std::abs(q - r) > 1e-9 * r) {
    throw ConfigError(what + " (" + std::to_string(value) + ") must be a whole multiple of " +
                      std::to_string(unit));
  }
  return static_cast<std::int64_t>(r);
}

double solve_horizon(const RunConfig& cfg) {
  const SolverParams p = cfg.solver();
  return std::max(backward_horizon(cfg.system, Variant::tilde, p),
                  backward_horizon(cfg.system, Variant::critical, p));
}

template <class T>
void write_file(const fs::path& dir, const std::string& name, const T& object, RunRecord& rec) {
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  write_csv(out, object);
  out.close();
  rec.add_output(dir, name);
}

void write_json(const fs::path& dir, const std::string& name, const nlohmann::json& doc,
                RunRecord& rec) {
  std::ofstream out(dir / name);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  out << doc.dump(2) << '\n';
  out.close();
  rec.add_output(dir, name);
}

RunRecord start_record(const std::string& command, const RunConfig& cfg) {
  RunRecord rec;
  rec.command = command;
  rec.config = cfg.snapshot;
  rec.config["seed"] = cfg.seed;
  rec.started_at = utc_timestamp();
  return rec;
}

void prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
}

}  // namespace

NoiseSetup prepare_noise(const RunConfig& cfg, double t_end) {
  const SlowFastSystem& sys = cfg.system;
  const double eps = sys.epsilon;
  if (!(eps > 0.0)) throw ConfigError("prepare_noise needs epsilon > 0");
  const double dt = cfg.dt;
  const double dt_r = dt / eps;
  const std::int64_t per_solver_step = whole_multiple(cfg.solver_dt, dt_r, "solver_dt");
  const double T = solve_horizon(cfg);
  const auto solver_steps = static_cast<std::int64_t>(std::ceil(T / cfg.solver_dt - 1e-9));
  const std::int64_t n_T = solver_steps * per_solver_step;
  const auto n_B =
      static_cast<std::int64_t>(std::ceil(lookback_xi(sys.F, cfg.lookback_tol) / dt_r - 1e-9));
  const std::int64_t n_end = aligned_steps(t_end, dt);
  const double t_min = -static_cast<double>(n_T + n_B + 1) * dt;
  LevyPath path = generate_path(sys.noise, t_min, static_cast<double>(n_end) * dt, dt, cfg.seed);
  LevyPath rescaled = rescale_time(path, eps);
  StationaryProcess eta = stationary_eta(sys.F, eps, path, -static_cast<double>(n_T) * dt,
                                         static_cast<double>(n_end) * dt, cfg.lookback_tol);
  StationaryProcess xi = stationary_xi(sys.F, rescaled, -static_cast<double>(n_T) * dt_r,
                                       static_cast<double>(n_end) * dt_r, cfg.lookback_tol);
  return NoiseSetup{std::move(path), std::move(rescaled), std::move(eta), std::move(xi),
                    static_cast<double>(solver_steps) * cfg.solver_dt};
}

SimulationOutput run_simulation(const RunConfig& cfg) {
  const SlowFastSystem& sys = cfg.system;
  if (!(sys.epsilon > 0.0)) throw ConfigError("simulate needs epsilon > 0");
  SimulationOutput out;
  out.report = validate_hypotheses(sys, cfg.gamma);
  if (!(out.report.contraction_ok && out.report.certified)) {
    throw ContractionError("hypotheses not certified for the configured system");
  }
  const auto noise = prepare_noise(cfg, cfg.span.t1);
  const SolverParams params = cfg.solver();
  out.transient = 5.0 * sys.epsilon / std::abs(out.report.gamma_f);
  out.expansion = manifold_graph(sys, noise.xi, cfg.x0_grid, GraphKind::h0_plus_eps_h1, params);
  const ManifoldSection section = expansion_section(sys, noise.xi, params);
  for (const auto& ic : cfg.initial_conditions) {
    out.full.push_back(integrate_sde(sys, noise.path, ic.x, ic.y, cfg.span, cfg.dt));
    const auto z = transform_forward({ic.x, ic.y}, sys.sigma, noise.eta.value(cfg.span.t0));
    out.transformed.push_back(integrate_transformed(sys, noise.eta, z.x, z.y, cfg.span, cfg.dt));
    out.reduced.push_back(integrate_reduced(sys, section, ic.x, cfg.span, cfg.reduced_dt));
    out.tracking_distance.push_back(
        verify::orbit_distance(out.full.back(), out.reduced.back(), cfg.span.t0 + out.transient));
  }
  return out;
}

ManifoldOutput run_manifold(const RunConfig& cfg) {
  const SlowFastSystem& sys = cfg.system;
  ManifoldOutput out;
  out.report = validate_hypotheses(sys, cfg.gamma);
  if (!(out.report.contraction_ok && out.report.certified)) {
    throw ContractionError("hypotheses not certified for the configured system; refusing to solve");
  }
  const SolverParams params = cfg.solver();
  if (sys.epsilon > 0.0) {
    const auto noise = prepare_noise(cfg, 0.0);
    out.graphs.push_back(manifold_graph(sys, noise.xi, cfg.x0_grid, GraphKind::tilde_h_eps, params));
    SolverParams hat = params;
    hat.dt = cfg.solver_dt * sys.epsilon;
    out.graphs.push_back(manifold_graph(sys, noise.eta, cfg.x0_grid, GraphKind::hat_h_eps, hat));
    out.graphs.push_back(manifold_graph(sys, noise.xi, cfg.x0_grid, GraphKind::h0, params));
    out.graphs.push_back(
        manifold_graph(sys, noise.xi, cfg.x0_grid, GraphKind::h0_plus_eps_h1, params));
  } else {
    // Only the critical objects exist; xi comes from a path drawn in rescaled time.
    const double T = backward_horizon(sys, Variant::critical, params);
    const double dt = cfg.solver_dt;
    const double n_T = std::ceil(T / dt - 1e-9);
    const double n_B = std::ceil(lookback_xi(sys.F, cfg.lookback_tol) / dt - 1e-9);
    const auto path = generate_path(sys.noise, -(n_T + n_B + 1.0) * dt, 0.0, dt, cfg.seed);
    const auto xi = stationary_xi(sys.F, path, -n_T * dt, 0.0, cfg.lookback_tol);
    out.graphs.push_back(manifold_graph(sys, xi, cfg.x0_grid, GraphKind::h0, params));
    out.graphs.push_back(manifold_graph(sys, xi, cfg.x0_grid, GraphKind::h0_plus_eps_h1, params));
  }
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const NonConvergenceError*>(&e) ||
      dynamic_cast<const PartialResultError*>(&e) || dynamic_cast<const DerivativeError*>(&e)) {
    return kDivergence;
  }
  if (dynamic_cast<const Error*>(&e)) return kConfigError;
  return kSuiteFailure;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const auto t0 = Clock::now();
  prepare_dir(out);
  auto rec = start_record("simulate", cfg);
  const auto sim = run_simulation(cfg);
  rec.hypotheses = sim.report;
  for (std::size_t k = 0; k < sim.full.size(); ++k) {
    const std::string tag = std::to_string(k);
    write_file(out, "full_" + tag + ".csv", sim.full[k], rec);
    write_file(out, "transformed_" + tag + ".csv", sim.transformed[k], rec);
    write_file(out, "reduced_" + tag + ".csv", sim.reduced[k], rec);
    log << "orbit " << k << ": full vs reduced distance after t = " << sim.transient << ": "
        << sim.tracking_distance[k] << '\n';
  }
  write_file(out, "manifold_expansion.csv", sim.expansion, rec);
  rec.results["transient"] = sim.transient;
  rec.results["tracking_distance"] = sim.tracking_distance;
  rec.results["expansion_graph"] = graph_metadata(sim.expansion);
  rec.elapsed_seconds = elapsed(t0);
  rec.write(out);
  log << "wrote " << rec.outputs.size() << " files to " << out.string() << '\n';
  return kOk;
}

int cmd_manifold(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const auto t0 = Clock::now();
  prepare_dir(out);
  auto rec = start_record("manifold", cfg);
  const auto res = run_manifold(cfg);
  rec.hypotheses = res.report;
  nlohmann::json graphs = nlohmann::json::array();
  for (const auto& g : res.graphs) {
    const std::string stem = "manifold_" + to_string(g.kind);
    write_file(out, stem + ".csv", g, rec);
    write_json(out, stem + ".json", graph_metadata(g), rec);
    graphs.push_back(stem);
    log << to_string(g.kind) << ": " << g.x0.size() << " points, worst iterations "
        << g.iterations << ", empirical Lipschitz " << g.empirical_lipschitz << '\n';
  }
  rec.results["graphs"] = graphs;
  rec.elapsed_seconds = elapsed(t0);
  rec.write(out);
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const auto t0 = Clock::now();
  prepare_dir(out);
  auto rec = start_record("verify", cfg);
  std::vector<verify::CheckResult> results;
  results.push_back(verify::hypothesis_check(cfg));
  verify::Suite suite(verify::options_from(cfg));
  for (const auto& id : verify::suite_ids()) {
    results.push_back(suite.run(id));
    const auto& r = results.back();
    log << (r.passed ? "PASS " : "FAIL ") << r.id << " (" << r.seconds << " s): " << r.detail
        << std::endl;
  }
  const auto& h = results.front();
  log << (h.passed ? "PASS " : "FAIL ") << h.id << ": " << h.detail << '\n';
  bool ok = true;
  nlohmann::json report = nlohmann::json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    report.push_back(verify::to_json(r));
  }
  write_json(out, "verify_report.json", {{"passed", ok}, {"checks", report}}, rec);
  rec.results["passed"] = ok;
  rec.elapsed_seconds = elapsed(t0);
  rec.write(out);
  return ok ? kOk : kSuiteFailure;
}

int cmd_study(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
  const auto t0 = Clock::now();
  prepare_dir(out);
  auto rec = start_record("study", cfg);
  StudyParams p;
  p.x0 = cfg.study.x0 ? *cfg.study.x0 : cfg.initial_conditions.front().x;
  p.epsilons = cfg.study.epsilons;
  p.realizations = cfg.study.realizations;
  p.seed = cfg.seed;
  p.solver = cfg.solver();
  p.xi_tol = cfg.lookback_tol;
  const auto st = epsilon_study(cfg.system, p);
  write_file(out, "study_h0.csv", st.h0, rec);
  write_file(out, "study_h1.csv", st.h1, rec);
  rec.results["h0"] = to_json(st.h0);
  rec.results["h1"] = to_json(st.h1);
  log << "slope |h_eps - h0|: " << st.h0.slope << " [" << st.h0.slope_lo << ", " << st.h0.slope_hi
      << "]\nslope |h_eps - h0 - eps h1|: " << st.h1.slope << " [" << st.h1.slope_lo << ", "
      << st.h1.slope_hi << "]\n";
  if (!st.h0.valid || !st.h1.valid) {
    rec.warnings.push_back("more than 10% of the solves were excluded");
    log << "warning: more than 10% of the solves were excluded\n";
  }
  rec.elapsed_seconds = elapsed(t0);
  rec.write(out);
  return kOk;
}

}  // namespace rsm
