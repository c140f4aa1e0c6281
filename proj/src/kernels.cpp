#include "rsm/kernels.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "rsm/errors.hpp"

namespace rsm::kernels {

ConvolutionTable ConvolutionTable::build(const Mat& generator, const Vec& prefactor, double dt,
                                         std::size_t taps) {
  const auto n = generator.rows();
  if (generator.cols() != n || prefactor.size() != n) {
    throw ConfigError("convolution generator and prefactor shapes disagree");
  }
  ConvolutionTable t;
  t.dim = static_cast<std::size_t>(n);
  t.taps = taps;
  t.weights.resize(taps * t.dim * t.dim);
  const Mat step = (generator * dt).exp();
  Mat power = step;
  const Mat scale = prefactor.asDiagonal();
  for (std::size_t j = 0; j < taps; ++j) {
    const Mat w = power * scale;
    for (std::size_t r = 0; r < t.dim; ++r) {
      for (std::size_t c = 0; c < t.dim; ++c) {
        t.weights[(j * t.dim + r) * t.dim + c] = w(static_cast<Eigen::Index>(r),
                                                   static_cast<Eigen::Index>(c));
      }
    }
    power = step * power;
  }
  return t;
}

namespace {

void check_args(const ConvolutionTable& table, std::span<const double> increments,
                std::size_t first_end, std::size_t n_out, std::span<double> out) {
  const std::size_t d = table.dim;
  if (first_end < table.taps) throw SpanError("convolution lookback exceeds available cells");
  if ((first_end + n_out - 1) * d > increments.size()) {
    throw SpanError("convolution output extends past the increments");
  }
  if (out.size() != n_out * d) throw ConfigError("convolution output buffer has the wrong size");
}

inline void accumulate(const ConvolutionTable& table, const double* inc, std::size_t end,
                       double* dst) {
  const std::size_t d = table.dim;
  for (std::size_t r = 0; r < d; ++r) dst[r] = 0.0;
  for (std::size_t j = 0; j < table.taps; ++j) {
    const double* w = &table.weights[j * d * d];
    const double* dl = inc + (end - 1 - j) * d;
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += w[r * d + c] * dl[c];
      dst[r] += acc;
    }
  }
}

}  // namespace

void convolve_serial(const ConvolutionTable& table, std::span<const double> increments,
                     std::size_t first_end, std::size_t n_out, std::span<double> out) {
  check_args(table, increments, first_end, n_out, out);
  for (std::size_t i = 0; i < n_out; ++i) {
    accumulate(table, increments.data(), first_end + i, out.data() + i * table.dim);
  }
}

void convolve_omp(const ConvolutionTable& table, std::span<const double> increments,
                  std::size_t first_end, std::size_t n_out, std::span<double> out) {
  check_args(table, increments, first_end, n_out, out);
  const auto n = static_cast<std::ptrdiff_t>(n_out);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    accumulate(table, increments.data(), first_end + k, out.data() + k * table.dim);
  }
}

void convolve_recursive(const Mat& step, const Vec& prefactor, std::span<const double> increments,
                        std::size_t start_cell, std::size_t first_end, std::size_t n_out,
                        std::span<double> out) {
  const auto d = step.rows();
  const auto du = static_cast<std::size_t>(d);
  if (first_end < start_cell) throw SpanError("recursive convolution starts after its first output");
  if ((first_end + n_out - 1) * du > increments.size()) {
    throw SpanError("convolution output extends past the increments");
  }
  if (out.size() != n_out * du) throw ConfigError("convolution output buffer has the wrong size");
  Vec z = Vec::Zero(d);
  Vec dl(d);
  auto consume = [&](std::size_t cell) {
    for (Eigen::Index c = 0; c < d; ++c) dl[c] = prefactor[c] * increments[cell * du + c];
    z = step * (z + dl);
  };
  std::size_t cell = start_cell;
  for (; cell < first_end; ++cell) consume(cell);
  for (std::size_t i = 0; i < n_out; ++i) {
    if (i > 0) consume(cell++);
    for (std::size_t r = 0; r < du; ++r) out[i * du + r] = z[static_cast<Eigen::Index>(r)];
  }
}

}  // namespace rsm::kernels
