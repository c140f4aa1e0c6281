#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rsm {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto its exit-code contract (see commands.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent shapes or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A time is not an integer multiple of the grid step.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A requested window is not covered by the available data.
class SpanError : public Error {
 public:
  using Error::Error;
};

// The spectral-gap / contraction hypotheses could not be certified.
class ContractionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time);
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual, int iterations);
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class DerivativeError : public Error {
 public:
  using Error::Error;
};

// The reduced integrator left the x0 range covered by a manifold graph.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

class SampleSizeError : public Error {
 public:
  using Error::Error;
};

// Some points of a manifold graph failed; `failures` lists "index: reason".
class PartialResultError : public Error {
 public:
  PartialResultError(const std::string& what, std::vector<std::string> failures);
  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

}  // namespace rsm
