#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "rsm/analysis.hpp"
#include "rsm/errors.hpp"
#include "rsm/examples.hpp"

using namespace rsm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Trajectory exponential(double rate, double scale, std::size_t n = 101) {
  Trajectory t;
  t.n_slow = 1;
  t.n_fast = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = 0.01 * static_cast<double>(k);
    t.times.push_back(s);
    t.states.push_back(scale * std::exp(rate * s));
    t.states.push_back(0.0);
  }
  return t;
}

}  // namespace

TEST_CASE("line fit recovers an exact line", "[analysis]") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1.5, 3.5, 5.5, 7.5};
  const auto f = fit_line(x, y);
  CHECK_THAT(f.slope, WithinAbs(2.0, 1e-14));
  CHECK_THAT(f.intercept, WithinAbs(-0.5, 1e-14));
  CHECK_THAT(f.r_squared, WithinAbs(1.0, 1e-14));
  CHECK_THAT(f.slope_se, WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0}, std::vector<double>{2.0}), ConfigError);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1, 1}, std::vector<double>{2, 3}), ConfigError);
}

TEST_CASE("decay fit of an exact exponential", "[analysis]") {
  const auto a = exponential(-7.0, 2.0);
  const auto b = exponential(-7.0, 0.0);
  const auto fit = tracking_decay(a, b);
  CHECK_THAT(fit.rate, WithinAbs(-7.0, 1e-10));
  CHECK_THAT(fit.t_a, WithinAbs(0.05, 1e-12));
  CHECK_FALSE(fit.degenerate);
  const auto windowed = tracking_decay(a, b, std::pair{0.2, 0.8});
  CHECK_THAT(windowed.rate, WithinAbs(-7.0, 1e-10));
}

TEST_CASE("tracking bound is checked up to the window end", "[analysis]") {
  const auto a = exponential(-7.0, 1.0);
  const auto b = exponential(-7.0, 0.0);
  // gamma / eps = 5 < 7: the bound holds with room.
  const auto ok = tracking_decay(a, b, std::pair{0.1, 1.0}, TrackingBound{0.05, 0.01, 0.5, 1.05});
  CHECK(ok.bound_ok);
  CHECK(ok.worst_bound_ratio <= 1.0);
  // gamma / eps = 10 > 7: the bound fails.
  const auto bad = tracking_decay(a, b, std::pair{0.1, 1.0}, TrackingBound{0.1, 0.01, 0.5, 1.05});
  CHECK_FALSE(bad.bound_ok);
}

TEST_CASE("coincident orbits are flagged degenerate", "[analysis]") {
  const auto a = exponential(-1.0, 1.0);
  const auto fit = tracking_decay(a, a);
  CHECK(fit.degenerate);
  CHECK_THAT(fit.rate, WithinAbs(0.0, 1e-12));
}

TEST_CASE("decay fit input errors", "[analysis][errors]") {
  const auto a = exponential(-1.0, 1.0);
  CHECK_THROWS_AS(tracking_decay(a, exponential(-1.0, 1.0, 50)), ConfigError);
  CHECK_THROWS_AS(tracking_decay(a, a, std::pair{0.5, 0.2}), ConfigError);
  CHECK_THROWS_AS(tracking_decay(a, a, std::pair{0.5, 2.0}), ConfigError);
}

TEST_CASE("KS critical coefficients", "[analysis]") {
  CHECK_THAT(ks_critical_coefficient(0.01), WithinAbs(1.6276, 1e-4));
  CHECK_THAT(ks_critical_coefficient(0.05), WithinAbs(1.3581, 1e-4));
  CHECK_THROWS_AS(ks_critical_coefficient(0.0), ConfigError);
}

TEST_CASE("KS statistic on hand-checkable samples", "[analysis]") {
  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[static_cast<std::size_t>(i)] = i;
    b[static_cast<std::size_t>(i)] = i + 30;
  }
  const auto r = ks_two_sample(a, b);
  CHECK_THAT(r.statistic, WithinAbs(0.3, 1e-12));
  CHECK_THAT(r.critical, WithinAbs(1.6276 / std::sqrt(50.0), 1e-4));
  CHECK_FALSE(r.passed);
  CHECK(r.p_value < 0.01);
  const auto same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.passed);
  CHECK(same.p_value == 1.0);
}

TEST_CASE("KS size and false rejection rate on equal laws", "[analysis]") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n01;
  int rejections = 0;
  int small_p = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(200), b(300);
    for (auto& v : a) v = n01(gen);
    for (auto& v : b) v = n01(gen);
    const auto r = ks_two_sample(a, b, 0.05);
    if (!r.passed) ++rejections;
    if (r.p_value < 0.05) ++small_p;
  }
  CHECK(small_p < 0.1 * trials);
  // Nominal 5%, the asymptotic test is slightly conservative.
  CHECK(rejections < 0.1 * trials);
}

TEST_CASE("KS detects a scale change and rejects small samples", "[analysis][errors]") {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n01;
  std::vector<double> a(2000), b(2000);
  for (auto& v : a) v = n01(gen);
  for (auto& v : b) v = 1.3 * n01(gen);
  CHECK_FALSE(ks_two_sample(a, b).passed);
  CHECK_THROWS_AS(ks_two_sample(std::vector<double>(49, 0.0), a), SampleSizeError);
  std::vector<Vec> va, vb;
  for (std::size_t i = 0; i < 500; ++i) {
    va.push_back(Vec::Constant(2, a[i]));
    vb.push_back(Vec::Constant(2, a[i + 500]));
  }
  const auto per = ks_per_coordinate(va, vb);
  REQUIRE(per.size() == 2);
  CHECK(per[0].critical > ks_two_sample(std::span(a).first(500), std::span(a).subspan(500, 500)).critical);
}

TEST_CASE("realization seeds are distinct and reproducible", "[analysis]") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 10000; ++k) seen.insert(realization_seed(7, k));
  CHECK(seen.size() == 10000);
  CHECK(realization_seed(7, 3) == realization_seed(7, 3));
  CHECK(realization_seed(7, 3) != realization_seed(8, 3));
}

TEST_CASE("quiet epsilon study has slopes one and two", "[analysis]") {
  StudyParams p;
  p.x0 = Vec::Constant(1, 1.0);
  p.epsilons = {0.02, 0.01, 0.005};
  p.realizations = 1;
  p.solver.dt = 1e-2;
  const auto st = epsilon_study(examples::example1(0.01, 0.0), p);
  CHECK(st.h0.valid);
  CHECK_THAT(st.h0.slope, WithinAbs(1.0, 0.1));
  CHECK_THAT(st.h1.slope, WithinAbs(2.0, 0.25));
  for (std::size_t e = 0; e < 3; ++e) CHECK(st.h1.rows[e].distance < st.h0.rows[e].distance);
  std::ostringstream out;
  write_csv(out, st.h0);
  CHECK(out.str().rfind("epsilon,distance_h0,realizations,excluded\n", 0) == 0);
}

TEST_CASE("epsilon study input errors", "[analysis][errors]") {
  StudyParams p;
  p.x0 = Vec::Constant(1, 1.0);
  p.epsilons = {0.1};
  const auto sys = examples::example1(0.01, 0.0);
  CHECK_THROWS_AS(epsilon_study(sys, p), ConfigError);
  p.epsilons = {0.05, 0.1};
  CHECK_THROWS_AS(epsilon_study(sys, p), ConfigError);
  p.epsilons = {0.1, 0.05};
  p.x0 = Vec::Zero(2);
  CHECK_THROWS_AS(epsilon_study(sys, p), ConfigError);
  p.x0 = Vec::Constant(1, 1.0);
  p.realizations = 0;
  CHECK_THROWS_AS(epsilon_study(sys, p), ConfigError);
}
