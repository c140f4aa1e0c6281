#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "rsm/errors.hpp"
#include "rsm/examples.hpp"
#include "rsm/lyapunov_perron.hpp"

using namespace rsm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

StationaryProcess quiet(std::size_t dim) {
  StationaryProcess p;
  p.dim = dim;
  return p;
}

// xi over [-T, 0] on a rescaled-time path, enough for every solve here.
StationaryProcess xi_process(const SlowFastSystem& sys, double dt, std::uint64_t seed) {
  SolverParams p;
  p.dt = dt;
  const double T = std::ceil(backward_horizon(sys, Variant::critical, p) / dt + 1) * dt;
  const double lb = std::ceil(lookback_xi(sys.F, 1e-8) / dt + 1) * dt;
  const auto path = generate_path(sys.noise, -(T + lb), 0.0, dt, seed);
  return stationary_xi(sys.F, path, -T, 0.0);
}

SlowFastSystem zero_nonlinearity() {
  auto sys = examples::example1(0.1, 0.3);
  sys.g1 = [](const Vec&, const Vec&) { return v1(0.0); };
  sys.g2 = [](const Vec&, const Vec&) { return v1(0.0); };
  sys.g2_x = nullptr;
  sys.g2_y = nullptr;
  return sys;
}

}  // namespace

TEST_CASE("backward horizon scales with the clock of the variant", "[lyapunov_perron]") {
  const auto sys = examples::example1(0.01, 0.0);
  SolverParams p;
  const double T = std::log(1e8) / (1.0 - 1.0 / 3.0);
  CHECK_THAT(backward_horizon(sys, Variant::tilde, p), WithinRel(T, 1e-12));
  CHECK_THAT(backward_horizon(sys, Variant::hat, p), WithinRel(0.01 * T, 1e-12));
  p.horizon = 5.0;
  CHECK(backward_horizon(sys, Variant::tilde, p) == 5.0);
}

TEST_CASE("zero nonlinearity gives the flat manifold after one sweep", "[lyapunov_perron]") {
  const auto sys = zero_nonlinearity();
  SolverParams p;
  p.dt = 0.01;
  const auto xi = xi_process(sys, 0.01, 3);
  const auto r = solve_backward_fixed_point(sys, xi, v1(1.5), p);
  CHECK(r.iterations == 1);
  CHECK(r.path.y(r.path.size() - 1)[0] == 0.0);
  CHECK(r.path.x(r.path.size() - 1)[0] == 1.5);
  // x(t) = e^{eps S t} x0 backwards in rescaled time.
  CHECK_THAT(r.path.x(0)[0], WithinRel(1.5 * std::exp(-0.1 * r.horizon), 1e-9));
}

TEST_CASE("Example 1 critical manifold and first-order term, quiet case", "[lyapunov_perron]") {
  const auto sys = examples::example1(0.01, 0.0);
  SolverParams p;
  p.dt = 1e-3;
  for (double x0 : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const auto ex = expansion_h(sys, quiet(1), v1(x0), 0.01, p);
    CHECK_THAT(ex.h0[0], WithinAbs(x0 * x0 / 6.0, 1e-6));
    CHECK_THAT(ex.h1[0], WithinAbs(examples::example1_h1_quiet(v1(x0))[0], 1e-5));
    CHECK_THAT(ex.composed[0], WithinAbs(ex.h0[0] + 0.01 * ex.h1[0], 1e-15));
  }
}

TEST_CASE("critical manifolds of Examples 2 and 3 match their closed forms", "[lyapunov_perron]") {
  SolverParams p;
  p.dt = 1e-3;
  const auto s2 = examples::example2();
  const auto xi2 = xi_process(s2, 1e-3, 5);
  Vec x(2);
  x << 1.0, 2.0;
  CHECK_THAT(critical_h0(s2, xi2, x, p)[0], WithinAbs(-0.2, 1e-6));
  const auto s3 = examples::example3(0.01, 0.1);
  const auto xi3 = xi_process(s3, 1e-2, 6);
  p.dt = 1e-2;
  for (double x0 : {-1.0, 0.3, 1.2}) {
    const Vec h = critical_h0(s3, xi3, v1(x0), p);
    CHECK((h - examples::example3_h0(v1(x0))).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("noisy h0 of Example 1 ignores the noise because g2 is y-free", "[lyapunov_perron]") {
  const auto sys = examples::example1(0.01, 0.2);
  SolverParams p;
  p.dt = 1e-2;
  const auto xi = xi_process(sys, 1e-2, 11);
  CHECK_THAT(critical_h0(sys, xi, v1(1.2), p)[0], WithinAbs(1.44 / 6.0, 1e-5));
}

TEST_CASE("hat and tilde solves agree pathwise", "[lyapunov_perron]") {
  const auto sys = examples::example1(0.02, 0.1);
  const double dt_r = 1e-2;
  const double dt = dt_r * sys.epsilon;
  SolverParams p;
  p.dt = dt_r;
  const double T = std::ceil(backward_horizon(sys, Variant::tilde, p) / dt_r + 1) * dt_r;
  const double lb = std::ceil(lookback_xi(sys.F, 1e-8) / dt_r + 1) * dt_r;
  const auto path = generate_path(sys.noise, -(T + lb) * sys.epsilon, 0.0, dt, 2);
  const auto eta = stationary_eta(sys.F, sys.epsilon, path, -T * sys.epsilon, 0.0);
  const auto xi = stationary_xi(sys.F, rescale_time(path, sys.epsilon), -T, 0.0);
  SolverParams hat = p;
  hat.dt = dt;
  for (double x0 : {0.5, 2.0}) {
    const Vec a = manifold_point(sys, eta, v1(x0), hat);
    const Vec b = manifold_point(sys, xi, v1(x0), p);
    CHECK_THAT(a[0], WithinAbs(b[0], 1e-10));
  }
}

TEST_CASE("Picard residuals contract at the certified rate", "[lyapunov_perron]") {
  const auto sys = examples::example1(0.05, 0.1);
  SolverParams p;
  p.dt = 1e-2;
  p.tol = 1e-10;
  const auto xi = xi_process(sys, 1e-2, 8);
  const auto r = solve_backward_fixed_point(sys, xi, v1(1.0), p);
  CHECK(r.variant == Variant::tilde);
  CHECK(r.residual < p.tol);
  CHECK(r.rho < 1.0);
  for (std::size_t k = 1; k < r.residual_history.size(); ++k) {
    if (r.residual_history[k - 1] < 1e-13) break;
    CHECK(r.residual_history[k] <= (r.rho + 1e-9) * r.residual_history[k - 1]);
  }
  CHECK(r.display_gap < 1e-8);
  CHECK(operator_defect(sys, xi, v1(1.0), r.path, Variant::tilde, p) < 1e-9);
}

TEST_CASE("weighted norms", "[lyapunov_perron]") {
  WeightedPath w;
  w.times = {-2.0, -1.0, 0.0};
  w.values = {1.0, 0.0, 2.0, -1.0, 0.5, 3.0};
  w.n_slow = 1;
  w.n_fast = 1;
  w.beta = -1.0;
  // sup e^{t}|x| = max(e^-2, 2 e^-1, 0.5); sup e^{t}|y| = max(0, e^-1, 3)
  CHECK_THAT(w.weighted_norm(), WithinAbs(std::max(2 * std::exp(-1.0), 0.5) + 3.0, 1e-15));
  auto u = w;
  u.values[5] = 2.0;
  CHECK_THAT(weighted_distance(w, u), WithinAbs(1.0, 1e-15));
}

TEST_CASE("manifold graphs, sections and CSV", "[lyapunov_perron]") {
  const auto sys = examples::example1(0.01, 0.0);
  SolverParams p;
  p.dt = 1e-2;
  std::vector<Vec> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(v1(0.2 * i));
  const auto g = manifold_graph(sys, quiet(1), grid, GraphKind::h0, p);
  REQUIRE(g.h.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK_THAT(g.h[k][0], WithinAbs(grid[k][0] * grid[k][0] / 6, 1e-5));
  CHECK(std::isfinite(g.lip_bound));
  // Steepest chord of x^2/6 on the grid is the last one.
  CHECK_THAT(g.empirical_lipschitz, WithinAbs((4.0 - 3.24) / 6 / 0.2, 1e-5));

  const auto h = section_from_graph(g, false);
  CHECK_THAT(h(0.0, v1(0.3))[0], WithinAbs((g.h[1][0] + g.h[2][0]) / 2, 1e-15));
  CHECK_THROWS_AS(h(0.0, v1(2.5)), ExtrapolationError);
  const auto clamped = section_from_graph(g, true);
  CHECK_THAT(clamped(0.0, v1(2.5))[0], WithinAbs(4.0 / 6, 1e-5));

  std::ostringstream out;
  write_csv(out, g);
  CHECK(out.str().rfind("x0_1,h_1\n", 0) == 0);
  CHECK(to_string(GraphKind::h0_plus_eps_h1) == "h0_plus_eps_h1");
  CHECK(to_string(Variant::hat) == "hat");
}

TEST_CASE("manifold solver refusals and failures", "[lyapunov_perron][errors]") {
  auto sys = examples::example1(0.01, 0.0);
  SolverParams p;
  p.dt = 1e-2;
  auto strong = sys;
  strong.K = 1.5;  // beyond the spectral gap
  CHECK_THROWS_AS(solve_backward_fixed_point(strong, quiet(1), v1(1.0), p), ContractionError);
  p.max_iter = 1;
  CHECK_THROWS_AS(solve_backward_fixed_point(sys, quiet(1), v1(1.0), p), NonConvergenceError);
  p.max_iter = 200;
  CHECK_THROWS_AS(solve_backward_fixed_point(sys, quiet(1), Vec::Zero(2), p), ConfigError);
  const auto noisy = examples::example1(0.01, 0.1);
  const auto short_path = generate_path(noisy.noise, -25.0, 0.0, 0.01, 1);
  const auto xi = stationary_xi(noisy.F, short_path, -2.0, 0.0);
  CHECK_THROWS_AS(solve_backward_fixed_point(noisy, xi, v1(1.0), p), SpanError);
  CHECK_THROWS_AS(manifold_graph(noisy, xi, {v1(1.0)}, GraphKind::hat_h_eps, p), ConfigError);
  CHECK_THROWS_AS(manifold_graph(sys, quiet(1), {}, GraphKind::h0, p), ConfigError);

  auto fragile = sys;
  fragile.g2 = [](const Vec& x, const Vec&) {
    if (x[0] > 1.0) throw DomainError("outside the model domain");
    return Vec::Constant(1, x[0] * x[0] / 6);
  };
  try {
    manifold_graph(fragile, quiet(1), {v1(0.5), v1(2.0)}, GraphKind::h0, p);
    FAIL("expected a partial result");
  } catch (const PartialResultError& e) {
    REQUIRE(e.failures().size() == 1);
    CHECK(e.failures()[0].rfind("point 1", 0) == 0);
  }
}
