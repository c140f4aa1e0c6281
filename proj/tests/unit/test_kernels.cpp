#include <catch_amalgamated.hpp>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "rsm/kernels.hpp"
#include "rsm/stable_noise.hpp"

using namespace rsm;

namespace {

Mat rotating_generator() {
  Mat F(2, 2);
  F << -1.0, 0.4, -0.4, -2.0;
  return F;
}

}  // namespace

TEST_CASE("convolution table holds the matrix exponentials", "[kernels]") {
  const Mat F = rotating_generator();
  Vec pre(2);
  pre << 2.0, 0.5;
  const auto t = kernels::ConvolutionTable::build(F, pre, 0.1, 5);
  REQUIRE(t.weights.size() == 5 * 4);
  for (std::size_t j = 0; j < 5; ++j) {
    const Mat W = (F * 0.1 * static_cast<double>(j + 1)).exp() * pre.asDiagonal();
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(t.weights[j * 4 + static_cast<std::size_t>(r * 2 + c)] - W(r, c)) < 1e-13);
      }
    }
  }
}

TEST_CASE("serial and OpenMP direct sums agree bit for bit", "[kernels]") {
  const auto path = generate_path(StableSpec::uniform(1.6, 2), 0.0, 30.0, 0.01, 3);
  const auto table = kernels::ConvolutionTable::build(rotating_generator(), Vec::Ones(2), 0.01, 900);
  const std::size_t n = 2000;
  std::vector<double> a(2 * n), b(2 * n);
  kernels::convolve_serial(table, path.increments(), 900, n, a);
  kernels::convolve_omp(table, path.increments(), 900, n, b);
  CHECK(a == b);
}

TEST_CASE("direct sum matches a hand-rolled scalar convolution", "[kernels]") {
  const auto path = generate_path(StableSpec::uniform(1.5, 1), 0.0, 1.0, 0.01, 12);
  const double f = -3.0;
  const std::size_t taps = 20;
  const auto table = kernels::ConvolutionTable::build(Mat::Constant(1, 1, f), Vec::Constant(1, 1.7), 0.01, taps);
  std::vector<double> out(10);
  kernels::convolve_serial(table, path.increments(), 50, 10, out);
  for (std::size_t i = 0; i < 10; ++i) {
    double ref = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
      ref += std::exp(f * 0.01 * static_cast<double>(j + 1)) * 1.7 * path.increment(50 + i - 1 - j, 0);
    }
    CHECK(std::abs(out[i] - ref) < 1e-13);
  }
}

TEST_CASE("recursive scan equals the direct sum over the same cells", "[kernels]") {
  const auto path = generate_path(StableSpec{{1.9, 1.3}, 1.0}, 0.0, 20.0, 0.01, 5);
  const Mat F = rotating_generator();
  Vec pre(2);
  pre << 1.0, 3.0;
  const std::size_t taps = 700;
  const auto table = kernels::ConvolutionTable::build(F, pre, 0.01, taps);
  const std::size_t n = 1;
  std::vector<double> direct(2 * n), scan(2 * n);
  // One output: the scan starts exactly taps cells back, so both sums cover
  // the same cells and differ only by rounding.
  kernels::convolve_serial(table, path.increments(), 1000, n, direct);
  kernels::convolve_recursive((F * 0.01).exp(), pre, path.increments(), 1000 - taps, 1000, n, scan);
  CHECK(std::abs(direct[0] - scan[0]) < 1e-9);
  CHECK(std::abs(direct[1] - scan[1]) < 1e-9);
}

TEST_CASE("recursive scan with a long warm-up approaches the truncated sum", "[kernels]") {
  const auto path = generate_path(StableSpec::uniform(1.8, 2), 0.0, 40.0, 0.01, 6);
  const Mat F = rotating_generator();
  const std::size_t taps = 1900;  // e^{-19} tail
  const auto table = kernels::ConvolutionTable::build(F, Vec::Ones(2), 0.01, taps);
  const std::size_t n = 500;
  std::vector<double> direct(2 * n), scan(2 * n);
  kernels::convolve_omp(table, path.increments(), 3000, n, direct);
  kernels::convolve_recursive((F * 0.01).exp(), Vec::Ones(2), path.increments(), 0, 3000, n, scan);
  double worst = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) worst = std::max(worst, std::abs(direct[i] - scan[i]));
  CHECK(worst < 1e-6);
}
