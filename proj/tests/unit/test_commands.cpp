#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rsm/commands.hpp"
#include "rsm/errors.hpp"
#include "rsm/verify.hpp"

using namespace rsm;
using nlohmann::json;

namespace {

RunConfig small(const std::string& extra = "") {
  std::string text = R"({"system": "example1", "t_span": [0, 0.1],
    "x0_grid": {"from": 0, "to": 2, "points": 5},
    "initial_conditions": [{"x": 1, "y": 0.5}])";
  text += extra + "}";
  return parse_config(json::parse(text));
}

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("rsm_cmd_" + name);
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("exit codes follow the error class", "[commands]") {
  CHECK(exit_code_for(ConfigError("x")) == kConfigError);
  CHECK(exit_code_for(SpanError("x")) == kConfigError);
  CHECK(exit_code_for(ContractionError("x")) == kConfigError);
  CHECK(exit_code_for(DivergenceError("x", 1.0)) == kDivergence);
  CHECK(exit_code_for(NonConvergenceError("x", 1.0, 3)) == kDivergence);
  CHECK(exit_code_for(PartialResultError("x", {})) == kDivergence);
  CHECK(exit_code_for(std::runtime_error("x")) == kSuiteFailure);
}

TEST_CASE("noise setup shares one realization across time frames", "[commands]") {
  const auto cfg = small();
  const auto n = prepare_noise(cfg, 0.1);
  const double eps = cfg.system.epsilon;
  CHECK(n.path.dt() == cfg.dt);
  CHECK(n.rescaled.dt() == Catch::Approx(cfg.dt / eps));
  CHECK(n.eta.covers(-n.horizon * eps, 0.1));
  CHECK(n.xi.covers(-n.horizon, 0.1 / eps));
  for (double t : {-0.2, 0.0, 0.05, 0.1}) {
    CHECK(n.eta.value(t)[0] == Catch::Approx(n.xi.value(t / eps)[0]).margin(1e-9));
  }
  auto bad = cfg;
  bad.solver_dt = 0.015;
  CHECK_THROWS_AS(prepare_noise(bad, 0.1), ConfigError);
  bad = cfg;
  bad.system.epsilon = 0.0;
  CHECK_THROWS_AS(prepare_noise(bad, 0.1), ConfigError);
}

TEST_CASE("simulation produces all orbits and a close reduced orbit", "[commands]") {
  const auto cfg = small();
  const auto out = run_simulation(cfg);
  REQUIRE(out.full.size() == 1);
  CHECK(out.full[0].size() == 1001);
  CHECK(out.transformed[0].tag == SystemTag::transformed);
  CHECK(out.reduced[0].size() == 101);
  CHECK(out.expansion.kind == GraphKind::h0_plus_eps_h1);
  CHECK(out.transient == Catch::Approx(0.05));
  CHECK(out.tracking_distance[0] < 0.05);
}

TEST_CASE("orbit distance on shared sample times", "[commands]") {
  Trajectory a, b;
  a.n_slow = b.n_slow = 1;
  a.n_fast = b.n_fast = 1;
  for (int k = 0; k <= 10; ++k) {
    a.times.push_back(0.1 * k);
    a.states.insert(a.states.end(), {1.0 * k, 0.0});
  }
  for (int k = 0; k <= 5; ++k) {
    b.times.push_back(0.2 * k);
    b.states.insert(b.states.end(), {2.0 * k + (k == 1 ? 0.5 : 0.0), 0.0});
  }
  CHECK(verify::orbit_distance(a, b, 0.0) == Catch::Approx(0.5));
  CHECK(verify::orbit_distance(a, b, 0.3) == 0.0);
}

TEST_CASE("manifold command writes graphs and a record", "[commands]") {
  const auto dir = scratch("manifold");
  std::ostringstream log;
  CHECK(cmd_manifold(small(), dir, log) == kOk);
  for (const char* f : {"manifold_tilde_h_eps.csv", "manifold_hat_h_eps.csv", "manifold_h0.csv",
                        "manifold_h0_plus_eps_h1.csv", "manifold_h0.json", "run_record.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream in(dir / "run_record.json");
  const auto rec = json::parse(in);
  CHECK(rec["command"] == "manifold");
  CHECK(rec["outputs"].size() == 8);
  CHECK(rec["hypotheses"]["contraction_ok"] == true);
  std::filesystem::remove_all(dir);
}

TEST_CASE("critical-only manifold run at epsilon zero", "[commands]") {
  const auto res = run_manifold(small(R"(, "epsilon": 0)"));
  REQUIRE(res.graphs.size() == 2);
  CHECK(res.graphs[0].kind == GraphKind::h0);
  CHECK(res.graphs[0].h[4][0] == Catch::Approx(4.0 / 6).margin(1e-6));
}

TEST_CASE("uncertified systems are refused", "[commands][errors]") {
  auto cfg = parse_config(json::parse(R"j({
    "system": {"S": [[1]], "F": [[-1]], "g1": "sin(y)", "g2": "sin(x)", "K": 1.2}})j"));
  CHECK_THROWS_AS(run_manifold(cfg), ContractionError);
  CHECK_THROWS_AS(run_simulation(cfg), ContractionError);
  std::ostringstream log;
  try {
    cmd_manifold(cfg, scratch("refused"), log);
    FAIL("expected refusal");
  } catch (const std::exception& e) {
    CHECK(exit_code_for(e) == kConfigError);
  }
}

TEST_CASE("study command writes both tables", "[commands]") {
  const auto dir = scratch("study");
  std::ostringstream log;
  const auto cfg = small(R"(, "sigma": 0, "study": {"epsilons": [0.1, 0.05], "realizations": 1})");
  CHECK(cmd_study(cfg, dir, log) == kOk);
  CHECK(std::filesystem::exists(dir / "study_h0.csv"));
  CHECK(std::filesystem::exists(dir / "study_h1.csv"));
  CHECK(log.str().find("slope") != std::string::npos);
  std::filesystem::remove_all(dir);
}
