#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsm/system_model.hpp"

// Data-parallel convolution kernels behind the stationary processes.
// convolve_serial is the reference implementation kept for testing and
// benchmarking; convolve_omp is the same sum parallelised over output
// samples; convolve_recursive is the O(n) scan used for long windows.
namespace rsm::kernels {

// Stationary kernel W_j = e^{A (j+1) dt} diag(prefactor), j = 0..taps-1,
// stored row-major per tap.
struct ConvolutionTable {
  std::size_t dim = 0;
  std::size_t taps = 0;
  std::vector<double> weights;

  static ConvolutionTable build(const Mat& generator, const Vec& prefactor, double dt,
                                std::size_t taps);
};

// out[i] = sum_j W_j dL[first_end + i - 1 - j]   (left-endpoint sums)
// first_end >= taps, out has n_out * dim entries.
void convolve_serial(const ConvolutionTable& table, std::span<const double> increments,
                     std::size_t first_end, std::size_t n_out, std::span<double> out);

void convolve_omp(const ConvolutionTable& table, std::span<const double> increments,
                  std::size_t first_end, std::size_t n_out, std::span<double> out);

// z <- P (z + diag(prefactor) dL[k]) from k = start_cell with z = 0;
// out[i] is z after consuming cells [start_cell, first_end + i).
void convolve_recursive(const Mat& step, const Vec& prefactor, std::span<const double> increments,
                        std::size_t start_cell, std::size_t first_end, std::size_t n_out,
                        std::span<double> out);

}  // namespace rsm::kernels
